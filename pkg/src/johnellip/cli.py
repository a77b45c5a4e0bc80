"""Command-line entry point.

Subcommands: ``solve`` (exact weights), ``solve-sketched`` (randomized
weights), ``verify`` (grade supplied weights), ``oracle`` (reference
weights via greedy ascent), ``gen`` (write a generated instance), and
``bench`` (timing sweeps).  Exit codes: 0 when the run certified (or the
action simply succeeded), 1 when it ran but did not certify, 2 for invalid
requests, 3 for runtime failures; failures print one JSON object
``{"error": ..., "message": ...}`` to stderr.

The environment variable ``JOHN_THREADS`` caps BLAS/OpenMP parallelism
(0 or unset means automatic).  The cap is applied by exporting the usual
thread-count variables before the numerical stack loads, which is why this
module and the package root import nothing heavy at module scope.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

__all__ = ["RunRequest", "main"]

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
)


@dataclass(frozen=True)
class RunRequest:
    """One CLI invocation, validated before any computation starts."""

    command: str
    input_path: str | None = None
    generator: str | None = None
    epsilon: float = 0.1
    delta: float = 0.1
    seed: int = 0
    iterations: int | None = None
    sketch_rows: int | None = None
    tol: float = 1e-6
    max_iters: int = 200_000
    volume_mode: bool = False
    samples: int = 1000
    trace: bool = False
    weights_path: str | None = None
    out_path: str | None = None
    fmt: str = "json"
    grid_m: tuple[int, ...] = (200, 400)
    grid_n: tuple[int, ...] = (10,)
    grid_eps: tuple[float, ...] = (0.5,)
    repeats: int = 5


def _apply_thread_cap(value: str | None) -> None:
    if not value:
        return
    try:
        count = int(value)
    except ValueError:
        print(f"warning: ignoring non-integer JOHN_THREADS={value!r}", file=sys.stderr)
        return
    if count > 0:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, str(count))


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", metavar="PATH",
                        help="Matrix Market file with the constraint matrix")
    source.add_argument("--gen", metavar="SPEC",
                        help="generator spec, e.g. gaussian-dense:200x10:seed=7")


def _add_report_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", metavar="PATH",
                        help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="json: certificate report; csv: per-iteration trace")
    parser.add_argument("--samples", type=int, default=1000,
                        help="containment sample count (0 disables)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for generation, sketching and sampling")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="johnellip",
        description="Approximate maximum-volume inscribed ellipsoids of "
                    "symmetric polytopes {x : -1 <= Ax <= 1}.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="exact fixed-point solver")
    _add_instance_args(solve)
    _add_report_args(solve)
    solve.add_argument("--eps", type=float, default=0.1, help="target epsilon in (0, 1)")
    solve.add_argument("--iters", type=int, help="override the iteration count")
    solve.add_argument("--volume-mode", action="store_true",
                       help="aim for a (1+eps) volume factor by solving at eps/n")
    solve.add_argument("--trace", action="store_true", help="record the per-iteration trace")

    sketched = sub.add_parser("solve-sketched", help="Gaussian-sketched solver")
    _add_instance_args(sketched)
    _add_report_args(sketched)
    sketched.add_argument("--eps", type=float, default=0.1, help="target epsilon in (0, 1)")
    sketched.add_argument("--delta", type=float, default=0.1, help="failure probability in (0, 1)")
    sketched.add_argument("--iters", type=int, help="override the iteration count")
    sketched.add_argument("--sketch-rows", type=int, help="override the sketch size")
    sketched.add_argument("--volume-mode", action="store_true",
                          help="aim for a (1+eps) volume factor by solving at eps/n")
    sketched.add_argument("--trace", action="store_true",
                          help="record the per-iteration trace (computes exact scores)")

    verify = sub.add_parser("verify", help="grade weights from a JSON file")
    _add_instance_args(verify)
    _add_report_args(verify)
    verify.add_argument("--weights", required=True, metavar="PATH",
                        help="JSON array with one weight per constraint row")
    verify.add_argument("--eps", type=float, default=0.1, help="target epsilon in (0, 1)")

    oracle = sub.add_parser("oracle", help="reference weights via greedy ascent")
    _add_instance_args(oracle)
    _add_report_args(oracle)
    oracle.add_argument("--tol", type=float, default=1e-6, help="score tolerance")
    oracle.add_argument("--max-iters", type=int, default=200_000,
                        help="iteration budget before giving up")

    gen = sub.add_parser("gen", help="write a generated instance as Matrix Market")
    gen.add_argument("--gen", required=True, metavar="SPEC", help="generator spec")
    gen.add_argument("--seed", type=int, default=0, help="seed when SPEC has none")
    gen.add_argument("--out", required=True, metavar="PATH", help="output file")

    bench = sub.add_parser("bench", help="timing sweep over gaussian instances")
    bench.add_argument("--grid-m", type=_int_list, default=(200, 400),
                       help="comma-separated row counts")
    bench.add_argument("--grid-n", type=_int_list, default=(10,),
                       help="comma-separated column counts")
    bench.add_argument("--grid-eps", type=_float_list, default=(0.5,),
                       help="comma-separated epsilon values")
    bench.add_argument("--repeats", type=int, default=5, help="solves per grid cell")
    bench.add_argument("--seed", type=int, default=0, help="base seed for the sweep")
    bench.add_argument("--out", metavar="PATH", help="write the CSV here instead of stdout")

    return parser


def _request_from_args(args: argparse.Namespace) -> RunRequest:
    fields = {"command": args.command}
    mapping = {
        "input": "input_path",
        "gen": "generator",
        "eps": "epsilon",
        "delta": "delta",
        "seed": "seed",
        "iters": "iterations",
        "sketch_rows": "sketch_rows",
        "tol": "tol",
        "max_iters": "max_iters",
        "volume_mode": "volume_mode",
        "samples": "samples",
        "trace": "trace",
        "weights": "weights_path",
        "out": "out_path",
        "format": "fmt",
        "grid_m": "grid_m",
        "grid_n": "grid_n",
        "grid_eps": "grid_eps",
        "repeats": "repeats",
    }
    for arg_name, field in mapping.items():
        if hasattr(args, arg_name) and getattr(args, arg_name) is not None:
            fields[field] = getattr(args, arg_name)
    return RunRequest(**fields)


def main(argv=None) -> int:
    _apply_thread_cap(os.environ.get("JOHN_THREADS"))
    parser = _build_parser()
    args = parser.parse_args(argv)
    request = _request_from_args(args)
    from . import _driver

    return _driver.run(request)
