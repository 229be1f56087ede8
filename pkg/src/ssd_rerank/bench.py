"""Timing and working-set measurements across pool sizes.

A scaling study runs every ``(algorithm, N, T, w, d)`` shape on synthetic
pools (isotropic Gaussian raw embeddings, standard-normal qualities), takes
the median wall time over repetitions, and fits the slope of ``log(time)``
against ``log(N)`` for each group of shapes that differ only in ``N``.
"""
from __future__ import annotations

import csv
import io
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import ItemCandidate, PreparedPool, RerankConfig
from .engine import rerank
from .preprocess import prepare_embeddings, standardize_qualities

log = logging.getLogger(__name__)

# typical request shape: 600 candidates, an 80-item feed, 64-d embeddings plus the appended 1
FEED_N = 600
FEED_T = 80
FEED_D = 65
SCALING_NS = (500, 1000, 2000, 4000, 8000)
BENCH_ALGORITHMS = ("ssd-nowindow", "ssd-window", "dpp-nowindow", "dpp-window")
CSV_COLUMNS = ("algorithm", "N", "T", "w", "d", "median_ns", "bytes", "slope_group")


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    n: int
    t: int
    w: int
    d: int
    median_ns: int
    working_bytes: int
    repetitions: int
    group: str


@dataclass
class ScalingStudy:
    records: list[BenchRecord]
    slopes: dict[str, float]
    sequences: dict = field(default_factory=dict, repr=False)

    def by_group(self) -> dict[str, list[BenchRecord]]:
        return dict(_grouped(self.records))

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO() if stream is None else stream
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow([r.algorithm, r.n, r.t, r.w, r.d, r.median_ns, r.working_bytes, r.group])
        return buf.getvalue() if stream is None else ""

    def summary(self) -> str:
        lines = [f"{'algorithm':<14}{'N':>7}{'T':>5}{'w':>5}{'d':>5}{'median ms':>12}{'MiB':>10}"]
        for r in self.records:
            lines.append(f"{r.algorithm:<14}{r.n:>7}{r.t:>5}{r.w:>5}{r.d:>5}"
                         f"{r.median_ns / 1e6:>12.3f}{r.working_bytes / 2**20:>10.2f}")
        if self.slopes:
            lines.append("")
            lines.append("log-log slope of time vs N:")
            for group, slope in self.slopes.items():
                lines.append(f"  {group}: {slope:.3f}")
        return "\n".join(lines)


def synthetic_pool(n: int, d: int = FEED_D, seed: int = 0) -> PreparedPool:
    """Prepared pool of ``n`` items with ``d - 1`` raw Gaussian dimensions."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, d - 1))
    quality = rng.standard_normal(n)
    width = len(str(n - 1))
    items = tuple(ItemCandidate(f"s{k:0{width}d}", quality[k], raw[k]) for k in range(n))
    return PreparedPool(items=items, embeddings=prepare_embeddings(raw), qualities=standardize_qualities(quality))


def group_key(algorithm: str, t: int, w: int, d: int) -> str:
    return f"{algorithm}/T{t}/w{w}/d{d}"


def time_rerank(pool: PreparedPool, config: RerankConfig, repetitions: int = 9, warmup: int = 1):
    """Median wall time in ns plus the reports of every timed repetition."""
    medians, reports = time_interleaved([(pool, config)], repetitions, warmup)
    return medians[0], reports[0]


def time_interleaved(cases: Sequence[tuple], repetitions: int = 9, warmup: int = 1):
    """Time several ``(pool, config)`` cases round-robin.

    Each round runs every case once, so slow phases of a shared machine land
    on all cases alike instead of biasing whichever happened to run then.
    Returns per-case median ns and per-case lists of reports.
    """
    if repetitions < 5:
        raise ValueError("need at least 5 repetitions")
    for pool, config in cases:
        for _ in range(warmup):
            rerank(pool, config)
    times = [[] for _ in cases]
    reports = [[] for _ in cases]
    for _ in range(repetitions):
        for k, (pool, config) in enumerate(cases):
            start = time.perf_counter_ns()
            report = rerank(pool, config)
            times[k].append(time.perf_counter_ns() - start)
            reports[k].append(report)
    return [int(np.median(t)) for t in times], reports


def loglog_slope(ns: Sequence[float], times: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(times, float)), 1)
    return float(slope)


def run_scaling_study(shapes: Iterable[tuple], seeds: Sequence[int] = (0,), repetitions: int = 9,
                      warmup: int = 1, gamma: float = 0.5, alpha: float = 1.0) -> ScalingStudy:
    """Time every shape, interleaving repetitions across shapes per seed."""
    shapes = sorted(shapes, key=lambda s: (s[0], s[2], s[3], s[4], s[1]))
    configs = [RerankConfig(sequence_length=t, window=w, gamma=gamma, algorithm=a, alpha=alpha)
               for a, n, t, w, d in shapes]
    samples = [[] for _ in shapes]
    nbytes = [0] * len(shapes)
    sequences = {}
    for seed in seeds:
        pools = {}
        for _, n, _, _, d in shapes:
            if (n, d) not in pools:
                pools[n, d] = synthetic_pool(n, d, seed)
        cases = [(pools[n, d], cfg) for (_, n, _, _, d), cfg in zip(shapes, configs)]
        medians, reports = time_interleaved(cases, repetitions, warmup)
        for k, shape in enumerate(shapes):
            samples[k].append(medians[k])
            nbytes[k] = max(nbytes[k], max(r.peak_working_bytes for r in reports[k]))
            sequences[(*shape, seed)] = [tuple(r.sequence) for r in reports[k]]
        del pools, cases, reports
    records = []
    for k, (algorithm, n, t, w, d) in enumerate(shapes):
        rec = BenchRecord(algorithm, n, t, w, d, int(np.median(samples[k])), nbytes[k],
                          repetitions * len(seeds), group_key(algorithm, t, w, d))
        log.info("%s N=%d: %.3f ms", algorithm, n, rec.median_ns / 1e6)
        records.append(rec)
    slopes = {}
    for group, recs in _grouped(records).items():
        if len({r.n for r in recs}) >= 2:
            slopes[group] = loglog_slope([r.n for r in recs], [r.median_ns for r in recs])
    return ScalingStudy(records, slopes, sequences)


def _grouped(records):
    out = defaultdict(list)
    for r in records:
        out[r.group].append(r)
    return out


def scaling_shapes(ns: Sequence[int] = SCALING_NS, t: int = FEED_T, w: int = 10, d: int = FEED_D,
                  algorithms: Sequence[str] = BENCH_ALGORITHMS) -> list[tuple]:
    return [(a, n, t, w, d) for a in algorithms for n in ns]


@dataclass(frozen=True)
class SpaceFit:
    per_nd: float
    per_wn: float
    max_rel_error: float
    quadratic_share: float


def fit_space_model(records: Sequence[BenchRecord]) -> SpaceFit:
    """Regress working bytes on ``N*d`` and ``w*N``.

    ``quadratic_share`` is the fraction of the largest pool's bytes that an
    added ``N**2`` regressor would explain; near zero means no quadratic term.
    """
    n = np.array([r.n for r in records], float)
    d = np.array([r.d for r in records], float)
    w = np.array([r.w for r in records], float)
    y = np.array([r.working_bytes for r in records], float)
    A = np.column_stack([n * d, w * n])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    rel = np.abs(A @ coef - y) / y
    A2 = np.column_stack([n * d, w * n, n * n])
    coef2, *_ = np.linalg.lstsq(A2, y, rcond=None)
    k = int(np.argmax(n))
    share = abs(coef2[2]) * n[k] ** 2 / y[k]
    return SpaceFit(float(coef[0]), float(coef[1]), float(rel.max()), float(share))

