"""Domain types shared by the re-ranking engines."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

ALGORITHMS = ("ssd-nowindow", "ssd-window", "ssd-star", "dpp-nowindow", "dpp-window")
WINDOWED = frozenset({"ssd-window", "ssd-star", "dpp-window"})

DEFAULT_EPSILON = 1e-12


class RerankError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InputError(RerankError, ValueError):
    """Malformed or unusable candidate data."""

    exit_code = 2


class DegenerateEmbeddingError(InputError):
    def __init__(self, item_id: str):
        super().__init__(f"item {item_id!r} has a zero-norm embedding")
        self.item_id = item_id


class OverConstrainedError(InputError):
    def __init__(self):
        super().__init__("every candidate is blocked; nothing left to rank")


class ConfigError(RerankError, ValueError):
    """Invalid re-rank configuration for the given pool."""

    exit_code = 3


class NumericalError(RerankError, ArithmeticError):
    """A kernel or factorization turned out numerically unusable."""

    exit_code = 4


@dataclass(frozen=True, eq=False)
class ItemCandidate:
    id: str
    quality: float
    raw_embedding: np.ndarray
    taxonomy: Optional[str] = None
    blocked: bool = False

    def __post_init__(self):
        emb = np.asarray(self.raw_embedding, dtype=np.float64)
        if emb.ndim != 1:
            raise InputError(f"item {self.id!r}: embedding must be a vector")
        emb.flags.writeable = False
        object.__setattr__(self, "raw_embedding", emb)
        object.__setattr__(self, "quality", float(self.quality))


@dataclass(frozen=True, eq=False)
class PreparedPool:
    """Candidate set after embedding transform, standardization and filtering.

    ``embeddings`` is a contiguous row-major ``N x d`` matrix. Candidates are
    addressed by their dense row index; ``ids`` maps back to identifiers.
    """

    items: tuple
    embeddings: np.ndarray
    qualities: np.ndarray
    index_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = tuple(self.items)
        emb = np.ascontiguousarray(self.embeddings, dtype=np.float64)
        q = np.ascontiguousarray(self.qualities, dtype=np.float64)
        if emb.ndim != 2 or q.ndim != 1 or emb.shape[0] != q.shape[0] or len(items) != q.shape[0]:
            raise InputError(
                f"inconsistent pool shapes: {len(items)} items, embeddings {emb.shape}, qualities {q.shape}"
            )
        emb.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "qualities", q)
        object.__setattr__(self, "index_of", {it.id: k for k, it in enumerate(items)})

    @property
    def ids(self) -> list[str]:
        return [it.id for it in self.items]

    @property
    def d(self) -> int:
        return self.embeddings.shape[1]

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class RerankConfig:
    sequence_length: int
    window: int = 10
    gamma: float = 0.5
    algorithm: str = "ssd-window"
    epsilon: float = DEFAULT_EPSILON
    alpha: float = 1.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
        if int(self.sequence_length) != self.sequence_length or self.sequence_length < 1:
            raise ConfigError(f"sequence length must be a positive integer, got {self.sequence_length}")
        if int(self.window) != self.window or self.window < 1:
            raise ConfigError(f"window must be a positive integer, got {self.window}")
        if self.algorithm in WINDOWED and self.window < 2:
            raise ConfigError(f"{self.algorithm} needs a window of at least 2, got {self.window}")
        if not self.gamma >= 0:
            raise ConfigError(f"gamma must be non-negative, got {self.gamma}")
        if not self.epsilon >= 0:
            raise ConfigError(f"epsilon must be non-negative, got {self.epsilon}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")

    @property
    def windowed(self) -> bool:
        return self.algorithm in WINDOWED

    def check_pool_size(self, n: int) -> None:
        if self.sequence_length > n:
            raise ConfigError(f"sequence length {self.sequence_length} exceeds pool size {n}")


@dataclass(frozen=True)
class StepRecord:
    step: int
    index: int
    item_id: str
    quality_term: float
    diversity_term: float
    log_volume: float
    residual_norm: float


@dataclass
class RerankReport:
    sequence: list[str]
    per_step: list[StepRecord]
    elapsed: float = 0.0
    peak_working_bytes: int = 0
    indices: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass
class ValidationResult:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_pool(pool: PreparedPool, tol: float = 1e-9) -> ValidationResult:
    """Check every PreparedPool invariant, collecting all violations."""
    problems = []
    seen = set()
    for k, it in enumerate(pool.items):
        if it.id in seen:
            problems.append(f"duplicate id {it.id!r} at row {k}")
        seen.add(it.id)
        if it.blocked:
            problems.append(f"blocked item {it.id!r} at row {k}")
    emb = pool.embeddings
    if len(pool):
        last = emb[:, -1]
        for k in np.flatnonzero(np.abs(last - 1.0) > tol):
            problems.append(f"row {k} ({pool.items[k].id!r}): appended coordinate is {last[k]!r}, expected 1")
        prefix = np.linalg.norm(emb[:, :-1], axis=1)
        for k in np.flatnonzero(np.abs(prefix - 1.0) > tol):
            problems.append(f"row {k} ({pool.items[k].id!r}): embedding prefix has norm {prefix[k]!r}, expected 1")
        q = pool.qualities
        if np.any(q != 0.0):
            if abs(q.mean()) > tol:
                problems.append(f"qualities have mean {q.mean()!r}, expected 0")
            if abs(q.std() - 1.0) > tol:
                problems.append(f"qualities have std {q.std()!r}, expected 1")
    return ValidationResult(problems)
