"""Batch command line: run a model file and write CSV traces.

Usage::

    fcm4drv --model academic.fcm --activation s_exp --aggregator percentile_rank --k 100 --out results/

Writes ``trace.csv``, ``percentiles.csv`` and ``summary.json`` into ``--out``.
Exit status is 0 on success, 1 on a usage, model or configuration error and
2 when the run itself fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .activation import KINDS as ACTIVATIONS
from .activation import ActivationSpec
from .aggregate import KINDS as AGGREGATORS
from .aggregate import AggregatorSpec
from .drv import DISTANCES, emd_distance, expected_value
from .engine import run
from .io import DEFAULT_PERCENTILES, ModelParseError, check_ranks, load_model, write_percentile_csv, write_trace_csv

log = logging.getLogger("fcm4drv")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _ConfigError(f"{self.prog}: error: {message}")


def _ranks(text: str) -> tuple[float, ...]:
    try:
        return check_ranks(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fcm4drv", description="FCM reasoning with discrete random variables.")
    p.add_argument("--model", required=True, type=Path, help="model file")
    p.add_argument("--activation", default="s_exp", choices=ACTIVATIONS)
    p.add_argument("--m", type=float, default=1.0, help="slope of s_exp")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="steepness of logistic")
    p.add_argument("--aggregator", default="percentile_rank", choices=AGGREGATORS)
    p.add_argument("--k", type=int, default=100, help="support size bound")
    p.add_argument("--minpts", type=int, default=6, help="DBSCAN minimal cluster size")
    p.add_argument("--max-iters", type=int, default=25)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--metric", default="emd", choices=tuple(DISTANCES))
    p.add_argument("--percentiles", type=_ranks, default=DEFAULT_PERCENTILES, help="comma-separated ranks")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    return p


def _mc_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fcm4drv mc-check", description="Compare DRV reasoning with Monte Carlo sampling.")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--activation", default="s_exp", choices=ACTIVATIONS)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--k", type=int, default=200)
    p.add_argument("--iters", type=int, default=5)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    return p


def _mc_check(argv) -> int:
    from .oracle import OracleConfig, empirical_drv, monte_carlo_run

    args = _mc_parser().parse_args(argv)
    try:
        model = load_model(args.model)
        activation = ActivationSpec(args.activation, m=args.m, lam=args.lam)
        aggregator = AggregatorSpec("percentile_rank", k=args.k)
        config = OracleConfig(samples=args.samples, seed=args.seed)
    except (OSError, ValueError) as exc:
        print(f"fcm4drv: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    trace = run(model, activation, aggregator, max_iters=args.iters, tol=0.0)
    samples = monte_carlo_run(model, activation, args.iters, config)
    for j, name in enumerate(model.concepts):
        d = emd_distance(trace.states[args.iters][j], empirical_drv(samples[:, j]))
        print(f"{name}\t{d:.6g}")
    return EXIT_OK


def summarize(trace, model) -> dict:
    return {
        "converged": trace.converged,
        "convergence_iteration": trace.convergence_iteration,
        "iterations": trace.n_iter,
        "final_distance": trace.per_iteration_distances[-1] if trace.per_iteration_distances else None,
        "final_means": {c: expected_value(d) for c, d in zip(model.concepts, trace.final_state)},
    }


def _main(argv) -> int:
    if argv and argv[0] == "mc-check":
        return _mc_check(argv[1:])
    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model)
        activation = ActivationSpec(args.activation, m=args.m, lam=args.lam)
        aggregator = AggregatorSpec(args.aggregator, k=args.k, minpts=args.minpts)
        if args.max_iters < 1:
            raise ValueError("--max-iters must be >= 1")
        if not args.tol > 0:
            raise ValueError("--tol must be positive")
    except ModelParseError as exc:
        print(f"fcm4drv: {args.model}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"fcm4drv: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        trace = run(model, activation, aggregator, args.max_iters, args.tol, args.metric)
        args.out.mkdir(parents=True, exist_ok=True)
        write_trace_csv(trace, model, args.out / "trace.csv")
        write_percentile_csv(trace, model, args.percentiles, args.out / "percentiles.csv")
        summary = summarize(trace, model)
        (args.out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    except Exception as exc:
        log.debug("run failed", exc_info=True)
        print(f"fcm4drv: run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    state = "converged" if trace.converged else "did not converge"
    print(f"{state} after {trace.n_iter} iterations")
    for name, mean in summary["final_means"].items():
        print(f"  {name:<24} {mean: .6f}")
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return _main(argv)
    except _ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
