"""The Gaussian-sketched solver.

Frozen expected values are tied to numpy's seeded PCG64 stream; the RNG
consumption order is part of the solver's documented contract.
"""

import math

import numpy as np
import pytest

from conftest import gaussian, reference_scores
from johnellip import (
    DomainError,
    SketchConfig,
    build_instance,
    certify,
    default_sketch_iterations,
    default_sketch_rows,
    expected_row_sum_distribution_check,
    leverage_scores,
    sketched_solve,
)
from johnellip.sketched import _sketch_step


class TestDefaults:
    def test_sketch_rows(self):
        assert default_sketch_rows(0.5) == 160
        assert default_sketch_rows(0.1) == 800

    def test_iterations(self):
        assert default_sketch_iterations(100, 0.5, 0.1) == 139
        assert default_sketch_iterations(4, 0.5, 0.1) == 74
        # At eps = 0.5, delta = 0.1 the count reduces to ceil(20 log(10 m)).
        for m in (4, 100, 10_000):
            assert default_sketch_iterations(m, 0.5, 0.1) == math.ceil(
                20.0 * math.log(10.0 * m)
            )

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
    def test_bad_epsilon(self, eps):
        with pytest.raises(DomainError):
            default_sketch_rows(eps)
        with pytest.raises(DomainError):
            default_sketch_iterations(10, eps, 0.1)

    def test_bad_delta(self):
        with pytest.raises(DomainError):
            default_sketch_iterations(10, 0.5, 0.0)


class TestConfig:
    def test_defaults_resolved(self):
        config = SketchConfig(epsilon=0.5, delta=0.1)
        assert config.resolve_sketch_rows() == 160
        assert config.resolve_iterations(100) == 139

    def test_overrides_win(self):
        config = SketchConfig(epsilon=0.5, delta=0.1, sketch_rows=7, iterations=3)
        assert config.resolve_sketch_rows() == 7
        assert config.resolve_iterations(100) == 3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon": 0.0, "delta": 0.1},
            {"epsilon": 0.5, "delta": 1.0},
            {"epsilon": 0.5, "delta": 0.1, "seed": -1},
            {"epsilon": 0.5, "delta": 0.1, "seed": 1.5},
            {"epsilon": 0.5, "delta": 0.1, "sketch_rows": 0},
            {"epsilon": 0.5, "delta": 0.1, "iterations": 0},
        ],
    )
    def test_bad_config(self, kwargs):
        with pytest.raises(DomainError):
            SketchConfig(**kwargs)


class TestSolve:
    def test_mass_rescaled_exactly(self):
        inst = gaussian(50, 4, seed=0)
        v, _ = sketched_solve(inst, SketchConfig(epsilon=0.5, delta=0.1, seed=1))
        assert abs(v.sum() - 4.0) <= 1e-12 * 4.0
        assert np.all(v >= 0.0)

    def test_bitwise_reproducible(self):
        inst = gaussian(50, 4, seed=0)
        config = SketchConfig(epsilon=0.5, delta=0.1, seed=3)
        first, _ = sketched_solve(inst, config)
        second, _ = sketched_solve(inst, config)
        assert np.array_equal(first, second)

    def test_seed_changes_output(self):
        inst = gaussian(50, 4, seed=0)
        a, _ = sketched_solve(inst, SketchConfig(epsilon=0.5, delta=0.1, seed=0))
        b, _ = sketched_solve(inst, SketchConfig(epsilon=0.5, delta=0.1, seed=1))
        assert not np.array_equal(a, b)

    def test_identity_frozen_run(self):
        inst = build_instance(np.eye(2))
        v, _ = sketched_solve(inst, SketchConfig(epsilon=0.5, delta=0.1, seed=42))
        assert abs(v.sum() - 2.0) <= 1e-12
        assert np.allclose(v, [0.97096595, 1.02903405], rtol=0.0, atol=1e-6)
        assert leverage_scores(inst, v).max() <= (1.0 + 0.5) ** 2
        assert certify(inst, v, (1.0 + 0.5) ** 2 - 1.0).passed

    def test_two_iterations_average_the_single_step(self, diamond):
        config = SketchConfig(epsilon=0.5, delta=0.1, seed=6, iterations=2)
        v, _ = sketched_solve(diamond, config)
        w1 = np.full(4, 0.5)
        w2 = _sketch_step(diamond, w1, config.resolve_sketch_rows(), np.random.default_rng(6))
        averaged = (w1 + w2) / 2.0
        assert np.array_equal(v, averaged * (2.0 / averaged.sum()))

    def test_trace_records_exact_scores(self, diamond):
        config = SketchConfig(
            epsilon=0.5, delta=0.1, seed=0, iterations=4, record_history=True
        )
        _, trace = sketched_solve(diamond, config)
        assert len(trace) == 4
        assert trace.iterations == [1, 2, 3, 4]
        uniform = np.full(4, 0.5)
        assert trace.max_sigma[0] == leverage_scores(diamond, uniform).max()

    def test_trace_empty_without_history(self, diamond):
        _, trace = sketched_solve(diamond, SketchConfig(epsilon=0.5, delta=0.1, iterations=3))
        assert len(trace) == 0


class TestSingleStep:
    def test_unbiased_over_seeds(self, diamond):
        uniform = np.full(4, 0.5)
        exact = uniform * reference_scores(diamond.toarray(), uniform)
        draws = np.empty((2000, 4))
        for k in range(2000):
            draws[k] = _sketch_step(diamond, uniform, 16, np.random.default_rng(k))
        errors = np.abs(draws.mean(axis=0) - exact)
        stderr = draws.std(axis=0, ddof=1) / math.sqrt(2000)
        assert np.all(errors <= 4.0 * stderr)

    def test_error_shrinks_with_sketch_size(self, diamond):
        uniform = np.full(4, 0.5)
        exact = uniform * reference_scores(diamond.toarray(), uniform)
        errors = {}
        for rows in (100, 10_000):
            approx = _sketch_step(diamond, uniform, rows, np.random.default_rng(5))
            errors[rows] = np.linalg.norm(approx - exact) / np.linalg.norm(exact)
        assert errors[100] <= 0.05
        assert errors[10_000] <= 0.015
        assert errors[10_000] < errors[100] / 2.0


class TestRowSumDistribution:
    def test_identity_reference_band(self):
        inst = build_instance(np.eye(4))
        config = SketchConfig(epsilon=0.5, delta=0.1, seed=0, sketch_rows=80)
        check = expected_row_sum_distribution_check(inst, config, trials=1000)
        assert check.band == 3.0 * math.sqrt(2.0 * 4 / (80 * 1000))
        assert check.band == pytest.approx(0.03)
        assert check.expected_mean == 4.0
        assert check.expected_variance == pytest.approx(0.1)
        assert check.within_band
        assert check.sample_mean == pytest.approx(4.004274459581967, abs=1e-9)
        assert abs(check.sample_variance - 0.1) <= 0.02

    def test_large_sketch_tightens_the_mean(self, diamond):
        config = SketchConfig(epsilon=0.5, delta=0.1, seed=1, sketch_rows=10_000)
        check = expected_row_sum_distribution_check(diamond, config, trials=100)
        assert abs(check.sample_mean - 2.0) <= 0.01 * 2.0

    def test_single_trial_accepted(self, diamond):
        config = SketchConfig(epsilon=0.5, delta=0.1, seed=0, sketch_rows=1)
        check = expected_row_sum_distribution_check(diamond, config, trials=1)
        assert check.trials == 1 and check.sample_mean >= 0.0

    def test_zero_trials_rejected(self, diamond):
        with pytest.raises(DomainError):
            expected_row_sum_distribution_check(
                diamond, SketchConfig(epsilon=0.5, delta=0.1), trials=0
            )
