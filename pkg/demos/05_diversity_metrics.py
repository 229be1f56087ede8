"""Offline ILAD and MRT for simulated feeds: quality sort vs SSD."""
import numpy as np

from ssd_rerank import RerankConfig, SessionLog, ilad, mrt, pool_from_arrays, rerank

rng = np.random.default_rng(5)
n_topics, per_topic = 8, 40
centers = rng.standard_normal((n_topics, 12)) * 2
topic = np.repeat(np.arange(n_topics), per_topic)
raw = centers[topic] + 0.5 * rng.standard_normal((len(topic), 12))
ids = [f"i{k}" for k in range(len(topic))]
emb = dict(zip(ids, raw))
tax = {i: f"topic{t}" for i, t in zip(ids, topic)}

def sessions_for(gamma, users=30):
    out = []
    for u in range(users):
        # each user has their own topic taste on top of a shared quality signal
        taste = rng.standard_normal(n_topics)
        quality = taste[topic] + 0.3 * rng.standard_normal(len(topic))
        pool = pool_from_arrays(raw, quality, ids)
        feed = rerank(pool, RerankConfig(20, window=5, gamma=gamma, algorithm="ssd-star")).sequence
        clicks = [i for i in feed if rng.random() < 0.3]
        out.append(SessionLog(f"u{u}", feed, emb, clicks, tax))
    return out

for gamma in (0.0, 0.5, 1.5):
    s = sessions_for(gamma)
    print(f"gamma={gamma:<4} ILAD {ilad(s):.3f}  MRT {mrt(s):.2f}")
