"""Turn raw candidates into a PreparedPool.

Three request-scoped steps, applied in this order:

1. drop candidates that fail a business constraint (``blocked``),
2. map every raw embedding onto ``[v / |v|, 1]`` so all rows share the norm
   sqrt(2) and inner products become ``cos + 1`` (range ``[0, 2]``),
3. standardize the surviving qualities to zero mean and unit population std.

Filtering runs first so blocked items never shift the quality distribution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (
    DEFAULT_EPSILON,
    DegenerateEmbeddingError,
    InputError,
    ItemCandidate,
    OverConstrainedError,
    PreparedPool,
)


@dataclass(frozen=True)
class RawPool:
    items: tuple

    def __init__(self, items: Iterable[ItemCandidate]):
        items = tuple(items)
        if not items:
            raise InputError("candidate pool is empty")
        dims = {it.raw_embedding.shape[0] for it in items}
        if len(dims) != 1:
            raise InputError(f"inconsistent raw embedding dimensions: {sorted(dims)}")
        seen = set()
        for it in items:
            if it.id in seen:
                raise InputError(f"duplicate id {it.id!r}")
            seen.add(it.id)
        object.__setattr__(self, "items", items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def raw_dim(self) -> int:
        return self.items[0].raw_embedding.shape[0]


def prepare_embedding(raw, epsilon: float = DEFAULT_EPSILON, item_id: str = "?") -> np.ndarray:
    """Return ``[raw / |raw|, 1]``; the result has squared norm 2."""
    raw = np.asarray(raw, dtype=np.float64)
    norm = np.linalg.norm(raw)
    if not norm > epsilon:
        raise DegenerateEmbeddingError(item_id)
    out = np.empty(raw.shape[0] + 1)
    out[:-1] = raw / norm
    out[-1] = 1.0
    return out


def prepare_embeddings(raw: np.ndarray, epsilon: float = DEFAULT_EPSILON, ids=None) -> np.ndarray:
    """Row-wise :func:`prepare_embedding` over an ``N x d_raw`` matrix."""
    raw = np.asarray(raw, dtype=np.float64)
    norms = np.linalg.norm(raw, axis=1)
    bad = np.flatnonzero(~(norms > epsilon))
    if bad.size:
        k = int(bad[0])
        raise DegenerateEmbeddingError(ids[k] if ids is not None else str(k))
    out = np.empty((raw.shape[0], raw.shape[1] + 1))
    np.divide(raw, norms[:, None], out=out[:, :-1])
    out[:, -1] = 1.0
    return out


def standardize_qualities(qualities, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Zero-mean, unit (population) std; all zeros if the input is flat."""
    q = np.asarray(qualities, dtype=np.float64)
    if q.size == 0:
        raise InputError("cannot standardize an empty quality vector")
    centered = q - q.mean()
    std = np.sqrt(np.mean(centered * centered))
    if std < epsilon:
        return np.zeros_like(q)
    return centered / std


def filter_constraints(pool: RawPool) -> RawPool:
    kept = [it for it in pool.items if not it.blocked]
    if not kept:
        raise OverConstrainedError()
    if len(kept) == len(pool.items):
        return pool
    return RawPool(kept)


def prepare(pool: RawPool, epsilon: float = DEFAULT_EPSILON) -> PreparedPool:
    pool = filter_constraints(pool)
    ids = [it.id for it in pool.items]
    raw = np.stack([it.raw_embedding for it in pool.items])
    emb = prepare_embeddings(raw, epsilon, ids)
    q = standardize_qualities([it.quality for it in pool.items], epsilon)
    return PreparedPool(items=pool.items, embeddings=emb, qualities=q)


def pool_from_arrays(embeddings, qualities, ids=None, epsilon: float = DEFAULT_EPSILON) -> PreparedPool:
    """Shortcut for callers that already hold dense arrays (tests, benchmarks)."""
    embeddings = np.asarray(embeddings, dtype=np.float64)
    qualities = np.asarray(qualities, dtype=np.float64)
    if ids is None:
        ids = [str(k) for k in range(embeddings.shape[0])]
    items = [ItemCandidate(i, q, e) for i, q, e in zip(ids, qualities, embeddings)]
    return prepare(RawPool(items), epsilon)
