"""Greedy SSD inference with and without a sliding window.

Every candidate keeps a working embedding (a row of ``residuals``). After an
item is picked, all remaining rows are orthogonalized against the picked row
with one modified Gram-Schmidt step, so a row's norm is the volume that
candidate would add. With a window of size ``w``, the projection coefficients
of the last ``w`` picks live in a circular queue; when a pick leaves the
window its projection is added back (reverted) before the next MGS step. The
cost of a step is one pass over the ``N x d`` residual matrix regardless of
``w``.

The running volume (``gamma`` times the product of the picked residual norms)
is tracked as a logarithm; it underflows double precision within 80 steps.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import DEFAULT_EPSILON, PreparedPool, RerankConfig, RerankReport, StepRecord

# no "nnan"/"ninf": the volume legitimately reaches -inf in log space
_FASTMATH = {"reassoc", "contract", "arcp", "nsz"}


def mgs_step(residuals: np.ndarray, basis: np.ndarray, mask: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Orthogonalize every unmasked row of ``residuals`` against ``basis`` in place.

    ``mask`` marks already-selected rows, which are left untouched. Returns the
    projection coefficients ``<v_j, b> / <b, b>`` (zero for masked rows). A
    basis with squared norm below ``epsilon**2`` is treated as absent.
    """
    coefs = np.zeros(residuals.shape[0])
    basis = np.array(basis, dtype=np.float64)
    bb = basis @ basis
    if bb < epsilon * epsilon:
        return coefs
    free = ~np.asarray(mask, dtype=bool)
    coefs[free] = residuals[free] @ basis / bb
    residuals[free] -= coefs[free, None] * basis
    return coefs


def revert_projection(residuals: np.ndarray, basis: np.ndarray, coefs: np.ndarray, mask: np.ndarray) -> None:
    """Undo an :func:`mgs_step` on the unmasked rows: ``v_j += p_j * b``."""
    free = ~np.asarray(mask, dtype=bool)
    residuals[free] += coefs[free, None] * np.asarray(basis, dtype=np.float64)


@njit(cache=True, fastmath=_FASTMATH)
def _advance(residuals, chosen, qualities, basis_row, revert_row, revert_coefs, coefs, scale, epsilon):
    # One greedy step fused into a single pass over the rows: optional revert
    # of the item leaving the window, MGS against the last pick, residual norm,
    # score and argmax. revert_coefs may alias coefs (same ring slot), so each
    # row reads its old coefficient before writing the new one.
    n, d = residuals.shape
    b = residuals[basis_row].copy()
    bb = 0.0
    for k in range(d):
        bb += b[k] * b[k]
    project = bb >= epsilon * epsilon
    inv = 1.0 / bb if project else 0.0
    revert = revert_row >= 0
    old = residuals[revert_row].copy() if revert else b
    best = -1
    best_score = 0.0
    best_norm = 0.0
    for j in range(n):
        if chosen[j]:
            coefs[j] = 0.0
            continue
        row = residuals[j]
        if revert:
            a = revert_coefs[j]
            if a != 0.0:
                for k in range(d):
                    row[k] += a * old[k]
        p = 0.0
        if project:
            for k in range(d):
                p += row[k] * b[k]
            p *= inv
        coefs[j] = p
        sq = 0.0
        for k in range(d):
            x = row[k] - p * b[k]
            row[k] = x
            sq += x * x
        norm = math.sqrt(sq)
        score = qualities[j] + scale * (norm if norm >= epsilon else 0.0)
        if best < 0 or score > best_score:
            best = j
            best_score = score
            best_norm = norm
    return best, best_norm


@njit(cache=True)
def _run_steps(residuals, chosen, qualities, selected, norms, diversity, log_volumes,
               basis_items, projections, head, size, t, t_stop, log_volume,
               window, gamma, star, epsilon):
    while t < t_stop:
        scale = gamma if star else math.exp(log_volume)
        if t == 0:
            j = np.argmax(qualities)
            row = residuals[j]
            nrm = math.sqrt(np.dot(row, row))
        else:
            last = selected[t - 1]
            revert_row = -1
            revert_coefs = projections[0]
            slot = 0
            if window > 0:
                if size == window:
                    revert_row = basis_items[head]
                    revert_coefs = projections[head]
                    head = (head + 1) % window
                    size -= 1
                slot = (head + size) % window
            j, nrm = _advance(residuals, chosen, qualities, last, revert_row,
                              revert_coefs, projections[slot], scale, epsilon)
            if window > 0:
                basis_items[slot] = last
                size += 1
        live = nrm >= epsilon
        diversity[t] = scale * nrm if live else 0.0
        log_volume = log_volume + math.log(nrm) if live else -np.inf
        chosen[j] = True
        selected[t] = j
        norms[t] = nrm
        log_volumes[t] = log_volume
        t += 1
    return t, head, size, log_volume


@dataclass
class SelectionState:
    """Working state of one greedy SSD run.

    ``basis_items``/``projections`` form the circular queues of window bases
    and their projection coefficients; ``head`` and ``size`` locate the live
    entries. Without a window a single scratch coefficient row is kept.
    """

    qualities: np.ndarray
    residuals: np.ndarray
    chosen_mask: np.ndarray
    selected: np.ndarray
    residual_norms: np.ndarray
    diversity_terms: np.ndarray
    log_volumes: np.ndarray
    basis_items: np.ndarray
    projections: np.ndarray
    window: int
    gamma: float
    star: bool
    epsilon: float
    log_volume: float = 0.0
    head: int = 0
    size: int = 0
    t: int = 0

    @classmethod
    def start(cls, pool: PreparedPool, length: int, window: int, gamma: float,
              star: bool = False, epsilon: float = DEFAULT_EPSILON) -> "SelectionState":
        n = len(pool)
        capacity = max(window, 1)
        return cls(
            qualities=pool.qualities,
            residuals=np.array(pool.embeddings, dtype=np.float64, order="C"),
            chosen_mask=np.zeros(n, dtype=np.bool_),
            selected=np.full(length, -1, dtype=np.int64),
            residual_norms=np.zeros(length),
            diversity_terms=np.zeros(length),
            log_volumes=np.zeros(length),
            basis_items=np.full(capacity, -1, dtype=np.int64),
            projections=np.zeros((capacity, n)),
            window=window,
            gamma=float(gamma),
            star=star,
            epsilon=float(epsilon),
            log_volume=math.log(gamma) if gamma > 0 else -math.inf,
        )

    @property
    def length(self) -> int:
        return self.selected.shape[0]

    def advance(self, steps: int | None = None) -> "SelectionState":
        stop = self.length if steps is None else min(self.length, self.t + steps)
        self.t, self.head, self.size, self.log_volume = _run_steps(
            self.residuals, self.chosen_mask, self.qualities, self.selected,
            self.residual_norms, self.diversity_terms, self.log_volumes,
            self.basis_items, self.projections, self.head, self.size, self.t, stop,
            self.log_volume, self.window, self.gamma, self.star, self.epsilon,
        )
        return self

    @property
    def done(self) -> bool:
        return self.t >= self.length

    @property
    def volume(self) -> float:
        return math.exp(self.log_volume)

    def window_items(self) -> list[int]:
        """Selected items whose projections are currently subtracted, oldest first."""
        if self.window == 0:
            return [int(i) for i in self.selected[: max(self.t - 1, 0)]]
        cap = self.window
        return [int(self.basis_items[(self.head + k) % cap]) for k in range(self.size)]

    def window_projections(self) -> np.ndarray:
        cap = self.window
        rows = [(self.head + k) % cap for k in range(self.size)]
        return self.projections[rows]

    def basis_vectors(self, items=None) -> np.ndarray:
        """Orthogonalized vectors of selected items (rows frozen at pick time)."""
        items = self.window_items() if items is None else items
        return self.residuals[list(items)]

    def working_bytes(self) -> int:
        arrays = (self.residuals, self.chosen_mask, self.selected, self.residual_norms,
                  self.diversity_terms, self.log_volumes, self.basis_items, self.projections)
        # plus the two d-length basis copies made inside every step
        return sum(a.nbytes for a in arrays) + 2 * self.residuals.shape[1] * 8

    def report(self, pool: PreparedPool, elapsed: float = 0.0) -> RerankReport:
        items = pool.items
        q = self.qualities
        steps = []
        for t in range(self.t):
            j = int(self.selected[t])
            steps.append(StepRecord(
                step=t + 1,
                index=j,
                item_id=items[j].id,
                quality_term=float(q[j]),
                diversity_term=float(self.diversity_terms[t]),
                log_volume=float(self.log_volumes[t]),
                residual_norm=float(self.residual_norms[t]),
            ))
        return RerankReport(
            sequence=[s.item_id for s in steps],
            per_step=steps,
            elapsed=elapsed,
            peak_working_bytes=self.working_bytes(),
            indices=[s.index for s in steps],
        )


def _ssd(pool: PreparedPool, config: RerankConfig, window: int, star: bool) -> RerankReport:
    config.check_pool_size(len(pool))
    start = time.perf_counter()
    state = SelectionState.start(pool, config.sequence_length, window, config.gamma, star, config.epsilon)
    state.advance()
    return state.report(pool, time.perf_counter() - start)


def ssd_no_window(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    """Greedy selection without a window: orthogonalize against every pick so far.

    Each step scores ``r_j + |v_j| * V`` where ``V`` is the running volume.
    """
    return _ssd(pool, config, 0, star=False)


def ssd_window(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    """Sliding-window SSD: candidates stay orthogonal to the last ``w`` picks.

    The score keeps the volume of every pick, so information from windows
    that already slid past still damps the diversity bonus.
    """
    return _ssd(pool, config, config.window, star=False)


def ssd_star(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    """Sliding-window SSD scored by ``r_j + gamma * |v_j|`` (no volume factor)."""
    return _ssd(pool, config, config.window, star=True)
