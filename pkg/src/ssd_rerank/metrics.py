"""Sequence diversity metrics: intra-list average distance and mean read taxonomies."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SessionLog:
    user: str
    impressed: Sequence[str]
    embeddings: Mapping[str, np.ndarray]
    clicked: Sequence[str] = ()
    taxonomy: Mapping[str, Optional[str]] = field(default_factory=dict)

    def __post_init__(self):
        missing = set(self.clicked) - set(self.impressed)
        if missing:
            raise MetricError(f"user {self.user!r} clicked items never impressed: {sorted(missing)}")


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def _session_ilad(session: SessionLog, similarity) -> float:
    ids = list(session.impressed)
    if similarity is cosine_similarity:
        X = np.array([session.embeddings[i] for i in ids], dtype=np.float64)
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        S = X @ X.T
        upper = np.triu_indices(len(ids), k=1)
        return float(np.mean(1.0 - S[upper]))
    vals = [1.0 - similarity(session.embeddings[ids[a]], session.embeddings[ids[b]])
            for a in range(len(ids)) for b in range(a + 1, len(ids))]
    return float(np.mean(vals))


def ilad(sessions: Sequence[SessionLog], similarity: Callable = cosine_similarity) -> float:
    """Mean over users of the mean pairwise ``1 - S(i, j)`` among impressions.

    Users with fewer than two impressions carry no pairs and are skipped.
    """
    per_user = [_session_ilad(s, similarity) for s in sessions if len(s.impressed) >= 2]
    if not per_user:
        raise MetricError("ILAD undefined: no session has two or more impressions")
    return float(np.mean(per_user))


def mrt(sessions: Sequence[SessionLog]) -> float:
    """Mean number of distinct taxonomies among each user's clicks."""
    if not sessions:
        raise MetricError("MRT undefined for an empty session list")
    counts = [len({s.taxonomy.get(i) for i in s.clicked}) for s in sessions]
    return float(np.mean(counts))
