"""Gaussian-sketched variant of the fixed-point solver.

Each sweep replaces the exact scores by unbiased sketched estimates: with
``B = sqrt(W) A`` and a fresh ``s x m`` standard Gaussian ``S`` drawn per
iteration,

    w_i <- (1/s) * || S B (B^T B)^{-1} (sqrt(w_i) a_i) ||^2 .

After averaging the T iterates the weights are rescaled to sum exactly to
n.  Defaults ``s = ceil(80/eps)`` and ``T = ceil((10/eps) log(m/delta))``
give ``max_i sigma_i(v) <= (1+eps)^2`` with probability at least
``1 - 2 delta``.

Randomness contract: a single ``numpy.random.default_rng(seed)`` stream
(PCG64) supplies every sketch; iteration k consumes exactly ``s * m``
standard normals via one ``standard_normal((s, m))`` call, so the stream is
spent iteration-major, then row-major within each sketch matrix.  Runs with
identical inputs and seeds are bitwise reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .core import PolytopeInstance, cholesky_of_weighted_gram, leverage_scores
from .errors import DomainError
from .fixed_point import SolveTrace

__all__ = [
    "SketchConfig",
    "RowSumCheck",
    "default_sketch_rows",
    "default_sketch_iterations",
    "sketched_solve",
    "expected_row_sum_distribution_check",
]


def default_sketch_rows(epsilon: float) -> int:
    """Sketch size ``ceil(80 / epsilon)``."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return math.ceil(80.0 / epsilon)


def default_sketch_iterations(m: int, epsilon: float, delta: float) -> int:
    """Iteration count ``ceil((10/epsilon) * log(m/delta))``."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    return max(1, math.ceil((10.0 / epsilon) * math.log(m / delta)))


@dataclass(frozen=True)
class SketchConfig:
    """Sketched-solver knobs.

    ``sketch_rows`` and ``iterations`` default to the values above when
    left as None.  ``record_history`` computes exact score maxima per
    iterate for the trace, which costs one exact sweep per iteration and
    exists for diagnostics only.
    """

    epsilon: float
    delta: float
    seed: int = 0
    sketch_rows: int | None = None
    iterations: int | None = None
    record_history: bool = False

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.sketch_rows is not None and self.sketch_rows < 1:
            raise DomainError(f"sketch_rows must be >= 1, got {self.sketch_rows!r}")
        if self.iterations is not None and self.iterations < 1:
            raise DomainError(f"iterations must be >= 1, got {self.iterations!r}")

    def resolve_sketch_rows(self) -> int:
        if self.sketch_rows is not None:
            return self.sketch_rows
        return default_sketch_rows(self.epsilon)

    def resolve_iterations(self, m: int) -> int:
        if self.iterations is not None:
            return self.iterations
        return default_sketch_iterations(m, self.epsilon, self.delta)


def _sketch_step(
    inst: PolytopeInstance, w: np.ndarray, rows: int, rng: np.random.Generator
) -> np.ndarray:
    """One sketched sweep: estimate ``w_i * sigma_i(w)`` for every row.

    Computes ``S B`` first (rows x n), then solves against the Cholesky
    factor of ``B^T B``; never forms an inverse.
    """
    root = np.sqrt(w)
    quad = cholesky_of_weighted_gram(inst, w)
    sketch = rng.standard_normal((rows, inst.m))
    scaled = sketch * root
    if inst.is_sparse:
        projected = (inst.matrix.T @ scaled.T).T
    else:
        projected = scaled @ inst.matrix
    flat = cho_solve((quad.L, True), projected.T, check_finite=False).T
    image = inst.matrix @ flat.T
    return w * np.einsum("ij,ij->i", image, image) / rows


def sketched_solve(
    inst: PolytopeInstance, config: SketchConfig
) -> tuple[np.ndarray, SolveTrace]:
    """Run T sketched sweeps and return (rescaled weights, trace).

    The returned vector averages all T iterates and is rescaled by
    ``n / sum`` so it sums to n up to rounding in the final multiply.
    """
    m, n = inst.m, inst.n
    rows = config.resolve_sketch_rows()
    total = config.resolve_iterations(m)
    rng = np.random.default_rng(config.seed)
    trace = SolveTrace()

    w = np.full(m, n / m)
    accum = w.copy()
    for k in range(1, total):
        start = time.perf_counter()
        if config.record_history:
            exact = leverage_scores(inst, w)
            trace.add(k, float(exact.max()), float(w.sum()),
                      (time.perf_counter() - start) * 1e3)
            start = time.perf_counter()
        w = _sketch_step(inst, w, rows, rng)
        accum += w
    if config.record_history:
        start = time.perf_counter()
        exact = leverage_scores(inst, w)
        trace.add(total, float(exact.max()), float(w.sum()),
                  (time.perf_counter() - start) * 1e3)

    averaged = accum / total
    rescaled = averaged * (n / averaged.sum())
    return rescaled, trace


@dataclass(frozen=True)
class RowSumCheck:
    """Summary of repeated single-sweep mass draws.

    A single sketched sweep from uniform weights has total mass distributed
    as ``chi^2(n * s) / s`` (mean n, variance 2n/s); ``within_band`` states
    whether the sample mean landed inside the three-sigma band for
    ``trials`` draws.  The band is only meaningful for large ``trials``.
    """

    sample_mean: float
    sample_variance: float
    expected_mean: float
    expected_variance: float
    band: float
    within_band: bool
    trials: int
    sketch_rows: int


def expected_row_sum_distribution_check(
    inst: PolytopeInstance, config: SketchConfig, trials: int
) -> RowSumCheck:
    """Draw ``trials`` single sketched sweeps and compare mass statistics.

    Per-trial generators are spawned from ``SeedSequence(config.seed)`` so
    the trials are independent yet fully reproducible.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    m, n = inst.m, inst.n
    rows = config.resolve_sketch_rows()
    uniform = np.full(m, n / m)

    children = np.random.SeedSequence(config.seed).spawn(trials)
    sums = np.empty(trials)
    for t, child in enumerate(children):
        rng = np.random.default_rng(child)
        sums[t] = _sketch_step(inst, uniform, rows, rng).sum()

    band = 3.0 * math.sqrt(2.0 * n / (rows * trials))
    mean = float(sums.mean())
    variance = float(sums.var(ddof=1)) if trials > 1 else 0.0
    return RowSumCheck(
        sample_mean=mean,
        sample_variance=variance,
        expected_mean=float(n),
        expected_variance=2.0 * n / rows,
        band=band,
        within_band=abs(mean - n) <= band,
        trials=trials,
        sketch_rows=rows,
    )
