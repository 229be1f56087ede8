"""Greedy MAP inference for a quality-weighted DPP kernel (the baseline).

``K_ij = q_i q_j <v_i, v_j>`` with ``q_i = exp(alpha * r_i)``. The full
``N x N`` kernel is materialized on purpose: its quadratic time and memory
are what the SSD engine is compared against.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .core import NumericalError, PreparedPool, RerankConfig, RerankReport, StepRecord

# Gains below this fraction of the largest diagonal count as zero; an absolute
# epsilon**2 threshold is far below the rounding noise of a scaled kernel.
RELATIVE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DppKernel:
    kernel: np.ndarray
    alpha: float
    pool: PreparedPool

    @property
    def qualities(self) -> np.ndarray:
        return self.pool.qualities

    @property
    def n(self) -> int:
        return self.kernel.shape[0]

    def tolerance(self, epsilon: float) -> float:
        """Threshold under which a marginal gain is treated as zero."""
        top = float(np.max(np.diagonal(self.kernel))) if self.n else 0.0
        return max(epsilon * epsilon, RELATIVE_TOL * max(top, 1.0))

    def windowed_gains(self, conditioning) -> np.ndarray:
        """Schur complements ``K_jj - K_jW K_WW^-1 K_Wj`` for every j."""
        diag = np.diagonal(self.kernel).copy()
        if len(conditioning) == 0:
            return diag
        w = np.asarray(conditioning)
        try:
            chol = cholesky(self.kernel[np.ix_(w, w)], lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"window kernel is not positive definite: {exc}") from None
        coef = solve_triangular(chol, self.kernel[w], lower=True, check_finite=False)
        return diag - np.einsum("ij,ij->j", coef, coef)


def quality_weights(qualities: np.ndarray, alpha: float) -> np.ndarray:
    return np.exp(alpha * np.asarray(qualities, dtype=np.float64))


def build_kernel(pool: PreparedPool, alpha: float = 1.0) -> DppKernel:
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    scaled = pool.embeddings * quality_weights(pool.qualities, alpha)[:, None]
    kernel = scaled @ scaled.T
    return DppKernel(kernel=kernel, alpha=float(alpha), pool=pool)


def _pad_by_quality(qualities, chosen, count):
    order = np.argsort(-qualities, kind="stable")
    return [int(j) for j in order if not chosen[j]][:count]


def _check_gains(gains, chosen, tol):
    worst = np.min(np.where(chosen, 0.0, gains))
    if worst < -tol:
        raise NumericalError(f"kernel is not PSD: marginal gain {worst:.3e}")


def _finish(kernel: DppKernel, picks, gains, chosen, length, start, nbytes) -> RerankReport:
    items = kernel.pool.items
    q = kernel.qualities
    log_vol = 0.0
    steps = []
    for t, (j, g) in enumerate(zip(picks, gains)):
        log_vol += 0.5 * math.log(g)
        steps.append(StepRecord(t + 1, j, items[j].id, float(q[j]), float(g), log_vol, math.sqrt(g)))
    for j in _pad_by_quality(q, chosen, length - len(picks)):
        steps.append(StepRecord(len(steps) + 1, j, items[j].id, float(q[j]), 0.0, log_vol, 0.0))
    return RerankReport(
        sequence=[s.item_id for s in steps],
        per_step=steps,
        elapsed=time.perf_counter() - start,
        peak_working_bytes=nbytes,
        indices=[s.index for s in steps],
    )


def dpp_greedy(kernel: DppKernel, config: RerankConfig, _start: float | None = None) -> RerankReport:
    """Incremental-Cholesky greedy MAP over the full kernel.

    Stops once no candidate adds volume and fills the rest by quality.
    """
    start = time.perf_counter() if _start is None else _start
    n = kernel.n
    length = config.sequence_length
    config.check_pool_size(n)
    K = kernel.kernel
    tol = kernel.tolerance(config.epsilon)
    cis = np.zeros((length, n))
    gains = np.diagonal(K).copy()
    masked = np.empty(n)
    chosen = np.zeros(n, dtype=bool)
    picks, picked_gains = [], []
    _check_gains(gains, chosen, tol)
    j = int(np.argmax(gains))
    while True:
        if gains[j] < tol:
            break
        picks.append(j)
        picked_gains.append(float(gains[j]))
        chosen[j] = True
        if len(picks) == length:
            break
        k = len(picks) - 1
        e = (K[j] - cis[:k, j] @ cis[:k]) / math.sqrt(gains[j])
        cis[k] = e
        gains -= e * e
        _check_gains(gains, chosen, tol)
        np.copyto(masked, gains)
        masked[chosen] = -np.inf
        j = int(np.argmax(masked))
    nbytes = K.nbytes + cis.nbytes + gains.nbytes + masked.nbytes + chosen.nbytes
    return _finish(kernel, picks, picked_gains, chosen, length, start, nbytes)


def dpp_greedy_window(kernel: DppKernel, config: RerankConfig, _start: float | None = None) -> RerankReport:
    """Greedy MAP conditioned only on the last ``w - 1`` picks.

    Each step factors the window's kernel block from scratch.
    """
    start = time.perf_counter() if _start is None else _start
    n = kernel.n
    length = config.sequence_length
    config.check_pool_size(n)
    keep = config.window - 1
    tol = kernel.tolerance(config.epsilon)
    chosen = np.zeros(n, dtype=bool)
    picks, picked_gains = [], []
    peak = 0
    while len(picks) < length:
        window = picks[-keep:] if picks else []
        gains = kernel.windowed_gains(window)
        peak = max(peak, gains.nbytes * (len(window) + 1))
        _check_gains(gains, chosen, tol)
        gains[chosen] = -np.inf
        j = int(np.argmax(gains))
        if gains[j] < tol:
            break
        picks.append(j)
        picked_gains.append(float(gains[j]))
        chosen[j] = True
    nbytes = kernel.kernel.nbytes + chosen.nbytes + peak
    return _finish(kernel, picks, picked_gains, chosen, length, start, nbytes)


def dpp_pipeline(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    """Kernel construction plus greedy inference, timed as one request."""
    start = time.perf_counter()
    kernel = build_kernel(pool, config.alpha)
    if config.algorithm == "dpp-window":
        report = dpp_greedy_window(kernel, config, _start=start)
    else:
        report = dpp_greedy(kernel, config, _start=start)
    report.peak_working_bytes += pool.embeddings.nbytes
    return report
