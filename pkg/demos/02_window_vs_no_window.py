"""Without a window the running volume shrinks every step and quality takes over.

With a window, only the last w picks count, so the diversity bonus stays
alive for the whole feed. The star variant drops the running product and
uses a fixed weight instead.
"""
import numpy as np

from ssd_rerank import RerankConfig, ssd_no_window, ssd_star, ssd_window
from ssd_rerank.bench import synthetic_pool

pool = synthetic_pool(600, 65, seed=3)
cfg = RerankConfig(80, window=10, gamma=0.5)

runs = {"no window": ssd_no_window(pool, cfg), "window 10": ssd_window(pool, cfg), "star": ssd_star(pool, cfg)}

def tail_overlap(report):
    # how many of the last 40 picks are also in the top 80 by quality
    top = set(np.argsort(-pool.qualities, kind="stable")[:80])
    return sum(i in top for i in report.indices[40:])

for name, report in runs.items():
    div = [s.diversity_term for s in report.per_step]
    print(f"{name:<10} bonus at step 2: {div[1]:.3e}  step 80: {div[-1]:.3e}  "
          f"quality-top overlap in second half: {tail_overlap(report)}/40")
