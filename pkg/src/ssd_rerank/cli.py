"""Command line: re-rank a candidate file, or run the scaling benchmark.

Exit codes: 0 success, 2 input error, 3 config error, 4 numerical error.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys

from . import bench
from .core import ALGORITHMS, DEFAULT_EPSILON, ConfigError, InputError, RerankConfig, RerankError
from .engine import rerank
from .io import load_candidates, write_sequence, write_step_report
from .preprocess import RawPool, prepare

log = logging.getLogger("ssd_rerank")

SYNTHETIC_N = bench.FEED_N
SYNTHETIC_RAW_DIM = bench.FEED_D - 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssd-rerank", description="Diversified re-ranking of scored candidates.")
    p.add_argument("--input", metavar="PATH", help="newline-delimited JSON candidates")
    p.add_argument("--algo", choices=ALGORITHMS, default=None,
                   help="engine (default ssd-window; --bench runs all but ssd-star)")
    p.add_argument("--length", type=int, default=bench.FEED_T, metavar="T", help="items to return (default 80)")
    p.add_argument("--window", type=int, default=None, metavar="W", help="sliding window size (default 10)")
    p.add_argument("--gamma", type=float, default=0.5, metavar="G", help="quality/diversity trade-off")
    p.add_argument("--alpha", type=float, default=None, metavar="A", help="DPP quality exponent (default 1)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, metavar="E", help="numerical tolerance")
    p.add_argument("--output", metavar="PATH", help="chosen ids (or bench CSV); default stdout")
    p.add_argument("--report", metavar="PATH", help="per-step diagnostics CSV")
    p.add_argument("--seed", type=int, default=None, metavar="S",
                   help="seed for a synthetic 600-item pool when --input is absent")
    p.add_argument("--bench", action="store_true", help="run the scaling study instead of one re-rank")
    return p


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _synthetic_raw_pool(seed: int) -> RawPool:
    pool = bench.synthetic_pool(SYNTHETIC_N, SYNTHETIC_RAW_DIM + 1, seed)
    return RawPool(pool.items)


def _run_bench(args) -> int:
    window = args.window or 10
    algorithms = (args.algo,) if args.algo else bench.BENCH_ALGORITHMS
    shapes = bench.scaling_shapes(t=args.length, w=window, algorithms=algorithms)
    seeds = (args.seed if args.seed is not None else 0,)
    study = bench.run_scaling_study(shapes, seeds=seeds, gamma=args.gamma, alpha=args.alpha or 1.0)
    with _open_out(args.output) as out:
        study.to_csv(out)
    print(study.summary(), file=sys.stderr)
    return 0


def _run_rerank(args) -> int:
    algo = args.algo or "ssd-window"
    if args.window is not None and algo not in ("ssd-window", "ssd-star", "dpp-window"):
        log.warning("--window is ignored by %s", algo)
    if args.alpha is not None and not algo.startswith("dpp"):
        log.warning("--alpha only affects dpp engines; ignored")
    if args.input is not None:
        if args.seed is not None:
            log.warning("--seed is ignored when --input is given")
        raw = load_candidates(args.input)
    elif args.seed is not None:
        raw = _synthetic_raw_pool(args.seed)
    else:
        raise ConfigError("need --input PATH (or --seed S for a synthetic pool)")
    config = RerankConfig(
        sequence_length=args.length,
        window=args.window if args.window is not None else 10,
        gamma=args.gamma,
        algorithm=algo,
        epsilon=args.epsilon,
        alpha=args.alpha if args.alpha is not None else 1.0,
    )
    pool = prepare(raw, config.epsilon)
    report = rerank(pool, config)
    with _open_out(args.output) as out:
        write_sequence(report.sequence, out)
    if args.report:
        with _open_out(args.report) as out:
            write_step_report(report, out)
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.bench:
            return _run_bench(args)
        return _run_rerank(args)
    except RerankError as exc:
        print(f"ssd-rerank: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"ssd-rerank: {exc}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
