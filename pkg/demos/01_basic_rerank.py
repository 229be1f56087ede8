"""Re-rank a small clustered pool and watch the topics interleave as gamma grows."""
import numpy as np

from ssd_rerank import RerankConfig, pool_from_arrays, rerank

rng = np.random.default_rng(0)

# Three tight topic clusters. Cluster 0 has the best scores, so a pure
# quality sort would fill the top of the feed with it.
centers = rng.standard_normal((3, 16)) * 3
topic = np.repeat([0, 1, 2], 20)
raw = centers[topic] + 0.3 * rng.standard_normal((60, 16))
quality = rng.normal(loc=[1.0, 0.0, -0.5], scale=0.3, size=(20, 3)).T.ravel()
ids = [f"t{t}-{k:02d}" for t, k in zip(topic, np.tile(np.arange(20), 3))]

pool = pool_from_arrays(raw, quality, ids)

for gamma in (0.0, 0.5, 1.0, 2.0):
    report = rerank(pool, RerankConfig(12, window=4, gamma=gamma, algorithm="ssd-star"))
    topics = "".join(s.item_id[1] for s in report.per_step)
    print(f"gamma={gamma:<4} topics of first 12: {topics}")

# gamma=0 is the quality sort; larger gamma interleaves topics.
report = rerank(pool, RerankConfig(6, window=4, gamma=1.0, algorithm="ssd-star"))
print()
print(f"{'step':>4} {'id':>8} {'quality':>9} {'diversity':>10} {'log vol':>9}")
for s in report.per_step:
    print(f"{s.step:>4} {s.item_id:>8} {s.quality_term:>9.3f} {s.diversity_term:>10.4f} {s.log_volume:>9.3f}")
