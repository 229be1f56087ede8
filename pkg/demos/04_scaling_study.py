"""Time SSD and DPP across pool sizes and fit log-log slopes.

SSD is linear in N. The DPP baseline builds an N x N kernel first, so it
heads toward quadratic growth once the kernel
build dominates; run the full range to 8000 to see the slope near 2. Takes about half a minute.
"""
from ssd_rerank.bench import run_scaling_study, scaling_shapes

study = run_scaling_study(scaling_shapes(ns=(500, 1000, 2000, 4000)))
print(study.summary())
