"""With equal qualities, SSD without a window and greedy DPP pick the same items.

The product of residual norms squared is the Gram determinant of the picks,
which is exactly what the DPP greedy step maximizes.
"""
import math

import numpy as np

from ssd_rerank import RerankConfig, build_kernel, dpp_greedy, pool_from_arrays, ssd_no_window

rng = np.random.default_rng(1)
# sign vectors normalize exactly, so the first pick is a true tie on both sides
raw = rng.choice([-1.0, 1.0], size=(50, 16))
pool = pool_from_arrays(raw, np.zeros(50))

ssd = ssd_no_window(pool, RerankConfig(10, gamma=1.0))
dpp = dpp_greedy(build_kernel(pool), RerankConfig(10, algorithm="dpp-nowindow"))
print("ssd:", ssd.indices)
print("dpp:", dpp.indices)

S = ssd.indices
X = pool.embeddings[S]
print("prod(norms)^2 =", math.prod(s.residual_norm for s in ssd.per_step) ** 2)
print("det(X X^T)    =", np.linalg.det(X @ X.T))
