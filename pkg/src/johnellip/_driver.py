"""Implementation behind the CLI: request validation and dispatch."""

from __future__ import annotations

import json
import statistics
import sys
import time

import numpy as np

from .certification import certify, oracle_solve
from .cli import RunRequest
from .core import PolytopeInstance, validate_weights
from .errors import DomainError, JohnEllipsoidError
from .fixed_point import FixedPointConfig, SolveTrace, default_iterations, fixed_point_solve
from .generators import generate, parse_generator_spec
from .mmio import read_matrix_market, write_matrix_market
from .reports import render_report_json, render_trace_csv, write_report
from .sketched import SketchConfig, sketched_solve

__all__ = ["run"]

_VOLUME_MODE_ITER_WARN = 10**6

_EXIT_OK = 0
_EXIT_NOT_CERTIFIED = 1
_EXIT_BAD_REQUEST = 2
_EXIT_RUNTIME = 3


def _fail(exc: BaseException, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _validate(request: RunRequest) -> None:
    if request.command in ("solve", "solve-sketched", "verify", "oracle"):
        if (request.input_path is None) == (request.generator is None):
            raise DomainError("exactly one of --input and --gen is required")
    if request.fmt not in ("json", "csv"):
        raise DomainError(f"unknown report format {request.fmt!r}")
    if request.samples < 0:
        raise DomainError(f"--samples must be >= 0, got {request.samples}")
    if request.command in ("solve", "solve-sketched", "verify"):
        if not 0.0 < request.epsilon < 1.0:
            raise DomainError(f"--eps must lie in (0, 1), got {request.epsilon!r}")
    if request.command == "solve-sketched" and not 0.0 < request.delta < 1.0:
        raise DomainError(f"--delta must lie in (0, 1), got {request.delta!r}")
    if request.command == "verify" and request.weights_path is None:
        raise DomainError("verify requires --weights")
    if request.command == "gen":
        if request.generator is None:
            raise DomainError("gen requires --gen")
        if request.out_path is None:
            raise DomainError("gen requires --out")
    if request.command == "bench":
        if request.repeats < 1:
            raise DomainError(f"--repeats must be >= 1, got {request.repeats}")
        if not request.grid_m or not request.grid_n or not request.grid_eps:
            raise DomainError("bench grids must be non-empty")


def _load_instance(request: RunRequest) -> PolytopeInstance:
    if request.input_path is not None:
        return read_matrix_market(request.input_path)
    spec = parse_generator_spec(request.generator, default_seed=request.seed)
    return generate(spec)


def _effective_epsilon(request: RunRequest, inst: PolytopeInstance) -> float:
    if not request.volume_mode:
        return request.epsilon
    eps = request.epsilon / inst.n
    if request.iterations is None:
        implied = default_iterations(inst.m, inst.n, eps)
        if implied > _VOLUME_MODE_ITER_WARN:
            print(
                f"warning: volume mode implies {implied} iterations "
                f"(eps={eps:.3e}); consider --iters",
                file=sys.stderr,
            )
    return eps


def _emit(request: RunRequest, fields: dict, trace: SolveTrace | None) -> None:
    if request.out_path is not None:
        write_report(fields, trace, request.out_path, request.fmt)
    elif request.fmt == "json":
        sys.stdout.write(render_report_json(fields))
    else:
        sys.stdout.write(render_trace_csv(trace if trace is not None else SolveTrace()))


def _report_fields(
    inst: PolytopeInstance,
    report,
    *,
    iterations: int,
    wall_ms: float,
    seed: int,
    algorithm: str,
) -> dict:
    return {
        "m": inst.m,
        "n": inst.n,
        "epsilon_target": report.target_epsilon,
        "epsilon_achieved": report.epsilon_achieved,
        "max_sigma": report.max_sigma,
        "weight_sum": report.weight_sum,
        "duality_gap": report.duality_gap,
        "logdet": report.logdet,
        "iterations": iterations,
        "wall_ms": wall_ms,
        "seed": seed,
        "algorithm": algorithm,
        "certified": report.passed,
    }


def _run_solve(request: RunRequest) -> int:
    inst = _load_instance(request)
    eps = _effective_epsilon(request, inst)
    record = request.trace or request.fmt == "csv"
    config = FixedPointConfig(epsilon=eps, iterations=request.iterations, record_history=record)
    start = time.perf_counter()
    weights, trace = fixed_point_solve(inst, config)
    wall_ms = (time.perf_counter() - start) * 1e3
    report = certify(
        inst, weights, eps,
        containment_samples=request.samples, containment_seed=request.seed,
    )
    fields = _report_fields(
        inst, report,
        iterations=config.resolve_iterations(inst.m, inst.n),
        wall_ms=wall_ms, seed=request.seed, algorithm="fixed-point",
    )
    _emit(request, fields, trace)
    return _EXIT_OK if report.passed else _EXIT_NOT_CERTIFIED


def _run_solve_sketched(request: RunRequest) -> int:
    inst = _load_instance(request)
    eps = _effective_epsilon(request, inst)
    record = request.trace or request.fmt == "csv"
    config = SketchConfig(
        epsilon=eps, delta=request.delta, seed=request.seed,
        sketch_rows=request.sketch_rows, iterations=request.iterations,
        record_history=record,
    )
    start = time.perf_counter()
    weights, trace = sketched_solve(inst, config)
    wall_ms = (time.perf_counter() - start) * 1e3
    # The sketched guarantee is multiplicative: certify at (1+eps)^2 - 1.
    target = (1.0 + eps) ** 2 - 1.0
    report = certify(
        inst, weights, target,
        containment_samples=request.samples, containment_seed=request.seed,
    )
    fields = _report_fields(
        inst, report,
        iterations=config.resolve_iterations(inst.m),
        wall_ms=wall_ms, seed=request.seed, algorithm="sketched",
    )
    _emit(request, fields, trace)
    return _EXIT_OK if report.passed else _EXIT_NOT_CERTIFIED


def _run_verify(request: RunRequest) -> int:
    inst = _load_instance(request)
    with open(request.weights_path, "r", encoding="ascii") as handle:
        weights = validate_weights(json.load(handle), inst.m)
    start = time.perf_counter()
    report = certify(
        inst, weights, request.epsilon,
        containment_samples=request.samples, containment_seed=request.seed,
    )
    wall_ms = (time.perf_counter() - start) * 1e3
    fields = _report_fields(
        inst, report, iterations=0, wall_ms=wall_ms,
        seed=request.seed, algorithm="verify",
    )
    _emit(request, fields, None)
    return _EXIT_OK if report.passed else _EXIT_NOT_CERTIFIED


def _run_oracle(request: RunRequest) -> int:
    inst = _load_instance(request)
    start = time.perf_counter()
    solution = oracle_solve(inst, request.tol, request.max_iters)
    wall_ms = (time.perf_counter() - start) * 1e3
    report = certify(
        inst, solution.weights, request.tol,
        containment_samples=request.samples, containment_seed=request.seed,
    )
    fields = _report_fields(
        inst, report, iterations=solution.iterations, wall_ms=wall_ms,
        seed=request.seed, algorithm="oracle",
    )
    _emit(request, fields, None)
    return _EXIT_OK if report.passed else _EXIT_NOT_CERTIFIED


def _run_gen(request: RunRequest) -> int:
    spec = parse_generator_spec(request.generator, default_seed=request.seed)
    inst = generate(spec)
    write_matrix_market(request.out_path, inst)
    return _EXIT_OK


def _run_bench(request: RunRequest) -> int:
    lines = ["m,n,eps,iters,repeats,median_wall_ms,mean_wall_ms,model_cost"]
    cell = 0
    for m in request.grid_m:
        for n in request.grid_n:
            for eps in request.grid_eps:
                seed = np.random.SeedSequence([request.seed, cell]).generate_state(1)[0]
                spec = parse_generator_spec(f"gaussian-dense:{m}x{n}", default_seed=int(seed))
                inst = generate(spec)
                iters = default_iterations(m, n, eps)
                config = FixedPointConfig(epsilon=eps, iterations=iters)
                walls = []
                for _ in range(request.repeats):
                    start = time.perf_counter()
                    fixed_point_solve(inst, config)
                    walls.append((time.perf_counter() - start) * 1e3)
                model = iters * m * n * n
                lines.append(
                    f"{m},{n},{eps:.17g},{iters},{request.repeats},"
                    f"{statistics.median(walls):.17g},{statistics.fmean(walls):.17g},{model}"
                )
                cell += 1
    text = "\n".join(lines) + "\n"
    if request.out_path is not None:
        with open(request.out_path, "w", encoding="ascii") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return _EXIT_OK


_COMMANDS = {
    "solve": _run_solve,
    "solve-sketched": _run_solve_sketched,
    "verify": _run_verify,
    "oracle": _run_oracle,
    "gen": _run_gen,
    "bench": _run_bench,
}


def run(request: RunRequest) -> int:
    """Execute a validated request; returns the process exit code."""
    try:
        _validate(request)
    except DomainError as exc:
        return _fail(exc, _EXIT_BAD_REQUEST)
    try:
        return _COMMANDS[request.command](request)
    except DomainError as exc:
        return _fail(exc, _EXIT_BAD_REQUEST)
    except JohnEllipsoidError as exc:
        return _fail(exc, _EXIT_RUNTIME)
    except (OSError, ValueError) as exc:
        return _fail(exc, _EXIT_RUNTIME)
