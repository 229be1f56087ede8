"""Slow reference implementations used to check the engines.

Nothing here shares code with the engines: residuals are rebuilt with
classical Gram-Schmidt from the original embeddings at every step, and DPP
gains come from explicit determinants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PreparedPool, RerankConfig, RerankReport, StepRecord
from .dpp import DppKernel


@dataclass(frozen=True, eq=False)
class TrajectoryTensor:
    """Stack of every length-``w`` window of an embedding sequence, ``L x w x d``."""

    data: np.ndarray
    window: int

    @property
    def L(self) -> int:
        return self.data.shape[0]


def build_trajectory_tensor(sequence_embeddings, w: int) -> TrajectoryTensor:
    seq = np.asarray(sequence_embeddings, dtype=np.float64)
    if w < 1:
        raise ValueError(f"window must be >= 1, got {w}")
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise ValueError("need a non-empty T x d sequence")
    T = seq.shape[0]
    width = min(w, T)
    L = max(1, T - w + 1)
    return TrajectoryTensor(np.stack([seq[k:k + width] for k in range(L)]), w)


def gram_det_volume(embeddings, epsilon: float = 1e-12) -> float:
    """``sqrt(det(X X^T))``: the volume spanned by the rows of ``X``."""
    X = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    det = np.linalg.det(X @ X.T)
    if det < 0:
        # only rounding can make a Gram determinant negative
        det = 0.0
    return math.sqrt(det)


def classical_gram_schmidt(X) -> np.ndarray:
    """Orthogonal (unnormalized) rows, each projection taken from the original row."""
    X = np.asarray(X, dtype=np.float64)
    out = np.zeros_like(X)
    for i, x in enumerate(X):
        v = x.copy()
        for k in range(i):
            b = out[k]
            bb = b @ b
            if bb > 0:
                v -= (x @ b) / bb * b
        out[i] = v
    return out


def _classical_residuals(V, bases, epsilon):
    live = [b for b in bases if b @ b >= epsilon * epsilon]
    if not live:
        return V.copy()
    B = np.array(live)
    coef = (V @ B.T) / np.einsum("ij,ij->i", B, B)
    return V - coef @ B


def _naive_ssd(pool: PreparedPool, config: RerankConfig, window: int, star: bool) -> RerankReport:
    config.check_pool_size(len(pool))
    V = pool.embeddings
    r = pool.qualities
    eps = config.epsilon
    gamma = config.gamma
    n = len(pool)
    selected, norms, bases, steps = [], [], {}, []
    for t in range(config.sequence_length):
        volume = gamma * math.prod(x if x >= eps else 0.0 for x in norms)
        if t == 0:
            j = int(np.argmax(r))
            res = V[j].copy()
            nrm = float(np.linalg.norm(res))
        else:
            context = selected if window == 0 else selected[-window:]
            R = _classical_residuals(V, [bases[i] for i in context], eps)
            best, best_score = -1, -math.inf
            for c in range(n):
                if c in bases:
                    continue
                cn = float(np.linalg.norm(R[c]))
                div = cn if cn >= eps else 0.0
                score = r[c] + (gamma * div if star else volume * div)
                if best < 0 or score > best_score:
                    best, best_score = c, score
            j = best
            res = R[j]
            nrm = float(np.linalg.norm(res))
        div = nrm if nrm >= eps else 0.0
        selected.append(j)
        norms.append(nrm)
        bases[j] = res
        new_volume = gamma * math.prod(x if x >= eps else 0.0 for x in norms)
        steps.append(StepRecord(
            t + 1, j, pool.items[j].id, float(r[j]),
            (gamma if star else volume) * div,
            math.log(new_volume) if new_volume > 0 else -math.inf,
            nrm,
        ))
    return RerankReport(
        sequence=[s.item_id for s in steps],
        per_step=steps,
        indices=[s.index for s in steps],
    )


def naive_ssd_no_window(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    return _naive_ssd(pool, config, 0, star=False)


def naive_ssd_window(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    return _naive_ssd(pool, config, config.window, star=False)


def naive_ssd_star(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    return _naive_ssd(pool, config, config.window, star=True)


def dpp_log_gain(K, conditioning, j) -> float:
    """``log det K[S+j] - log det K[S]``, or a Schur complement if ``K[S]`` is singular."""
    K = np.asarray(K, dtype=np.float64)
    S = list(conditioning)
    if S:
        sign, base = np.linalg.slogdet(K[np.ix_(S, S)])
    else:
        sign, base = 1.0, 0.0
    if sign > 0 and np.isfinite(base):
        idx = S + [j]
        s2, full = np.linalg.slogdet(K[np.ix_(idx, idx)])
        return float(full - base) if s2 > 0 else -math.inf
    schur = K[j, j] - K[j, S] @ np.linalg.pinv(K[np.ix_(S, S)]) @ K[S, j]
    return math.log(schur) if schur > 0 else -math.inf


def dpp_exhaustive_step(K, conditioning, candidates) -> tuple[int, float]:
    """Best candidate by explicit log-det gain; lowest index wins ties."""
    best, best_gain = -1, -math.inf
    for j in sorted(candidates):
        g = dpp_log_gain(K, conditioning, j)
        if best < 0 or g > best_gain:
            best, best_gain = j, g
    return best, best_gain


def naive_dpp_greedy(kernel: DppKernel, config: RerankConfig, window: int | None = None) -> list[int]:
    """Greedy trace built from :func:`dpp_exhaustive_step`.

    ``window`` conditions each step on the last ``window - 1`` picks only.
    Halting and quality padding follow the engine's documented rule.
    """
    K = kernel.kernel
    n = kernel.n
    tol = kernel.tolerance(config.epsilon)
    picks: list[int] = []
    while len(picks) < config.sequence_length:
        cond = picks if window is None else picks[max(0, len(picks) - (window - 1)):]
        j, gain = dpp_exhaustive_step(K, cond, [c for c in range(n) if c not in picks])
        if not math.exp(gain) >= tol:
            break
        picks.append(j)
    q = kernel.qualities
    rest = sorted((c for c in range(n) if c not in picks), key=lambda c: (-q[c], c))
    return picks + rest[: config.sequence_length - len(picks)]
