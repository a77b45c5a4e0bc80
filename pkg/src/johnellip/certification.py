"""Independent verification of candidate weights.

Nothing here trusts solver internals: every quantity is recomputed from the
instance and the weights through the shared kernel, the reference solution
comes from a greedy single-coordinate ascent that shares no iteration logic
with either solver, and the geometric containment checks sample the actual
ellipsoids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .core import (
    PolytopeInstance,
    _leverage_from_factor,
    cholesky_of_weighted_gram,
    leverage_scores,
    validate_weights,
)
from .errors import DomainError, NoConvergenceError

__all__ = [
    "CertificateReport",
    "ContainmentResult",
    "OracleSolution",
    "certify",
    "containment_check",
    "duality_gap",
    "oracle_solve",
    "volume_ratio",
]

# Weights above this are treated as support points when checking score
# flatness of reference solutions.
SUPPORT_THRESHOLD = 1e-8
# |sum(w) - n| <= WEIGHT_SUM_RTOL * n is required for a pass verdict.
WEIGHT_SUM_RTOL = 1e-6
# Additive slack for the sampled containment inequalities.
CONTAINMENT_SLACK = 1e-9

_REFRESH_EVERY = 256


@dataclass(frozen=True)
class ContainmentResult:
    """Outcome of sampled inner/outer containment tests."""

    inner_pass: bool
    outer_pass: bool
    inner_violations: int
    outer_violations: int
    samples: int


@dataclass(frozen=True)
class CertificateReport:
    """Everything certify() measured about a weight vector.

    ``passed`` is True exactly when ``max_sigma <= 1 + target_epsilon`` and
    ``|weight_sum - n| <= 1e-6 * n``; the containment fields report the
    sampled geometry checks alongside.
    """

    target_epsilon: float
    max_sigma: float
    weight_sum: float
    epsilon_achieved: float
    duality_gap: float
    objective: float
    logdet: float
    sigma_ok: bool
    weight_sum_ok: bool
    passed: bool
    containment_inner_pass: bool
    containment_outer_pass: bool
    containment_inner_violations: int
    containment_outer_violations: int
    containment_samples: int


def certify(
    inst: PolytopeInstance,
    w,
    target_epsilon: float,
    *,
    containment_samples: int = 1000,
    containment_seed: int = 0,
) -> CertificateReport:
    """Recompute scores from scratch and grade ``w`` against the target."""
    if target_epsilon <= 0.0:
        raise DomainError(f"target_epsilon must be positive, got {target_epsilon!r}")
    w = validate_weights(w, inst.m)
    n = inst.n

    quad = cholesky_of_weighted_gram(inst, w)
    sigma = _leverage_from_factor(inst, quad.L)
    max_sigma = float(sigma.max())
    weight_sum = float(w.sum())
    eps_hat = max_sigma - 1.0
    gap = n * math.log(max_sigma)
    objective = weight_sum - quad.logdet - n

    sigma_ok = max_sigma <= 1.0 + target_epsilon
    sum_ok = abs(weight_sum - n) <= WEIGHT_SUM_RTOL * n

    if containment_samples > 0:
        cont = containment_check(inst, w, containment_samples, containment_seed)
    else:
        cont = ContainmentResult(True, True, 0, 0, 0)

    return CertificateReport(
        target_epsilon=float(target_epsilon),
        max_sigma=max_sigma,
        weight_sum=weight_sum,
        epsilon_achieved=eps_hat,
        duality_gap=gap,
        objective=objective,
        logdet=quad.logdet,
        sigma_ok=sigma_ok,
        weight_sum_ok=sum_ok,
        passed=sigma_ok and sum_ok,
        containment_inner_pass=cont.inner_pass,
        containment_outer_pass=cont.outer_pass,
        containment_inner_violations=cont.inner_violations,
        containment_outer_violations=cont.outer_violations,
        containment_samples=cont.samples,
    )


def duality_gap(inst: PolytopeInstance, w, oracle: "OracleSolution | None" = None):
    """Primal-dual gap ``n * log(1 + eps_hat)`` with ``eps_hat = max sigma - 1``.

    The scaled quadratic ``(1 + eps_hat) Q(w)`` is feasible for the inscribed
    ellipsoid program while ``w`` (with ``sum(w) = n``) is feasible for its
    dual, and this is exactly the difference of their objectives.  When an
    :class:`OracleSolution` is supplied the return value is the pair
    ``(gap, logdet difference against the reference weights)``.
    """
    w = validate_weights(w, inst.m)
    sigma = leverage_scores(inst, w)
    gap = inst.n * math.log(float(sigma.max()))
    if oracle is None:
        return gap
    mine = cholesky_of_weighted_gram(inst, w).logdet
    refs = cholesky_of_weighted_gram(inst, oracle.weights).logdet
    return gap, refs - mine


def containment_check(
    inst: PolytopeInstance, w, samples: int, seed: int = 0
) -> ContainmentResult:
    """Sample directions and test the rounding sandwich numerically.

    For each of ``samples`` uniform directions u the inner test puts x on
    the boundary of the ellipsoid shrunk by ``1/sqrt(1 + eps_hat)`` (so
    ``x^T Q x = 1/(1+eps_hat)``) and requires ``||A x||_inf <= 1 + slack``;
    the outer test puts ``y = u / ||A u||_inf`` on the polytope boundary and
    requires ``y^T Q y <= n + slack``.  One Gaussian block of shape
    ``(n, samples)`` is drawn from ``default_rng(seed)``, column j belonging
    to sample j.
    """
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples!r}")
    w = validate_weights(w, inst.m)
    n = inst.n

    quad = cholesky_of_weighted_gram(inst, w)
    sigma = _leverage_from_factor(inst, quad.L)
    eps_hat = float(sigma.max()) - 1.0

    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, samples))
    u /= np.linalg.norm(u, axis=0)

    # x = u / (sqrt(1+eps_hat) * ||L^T u||), so x^T Q x = 1/(1+eps_hat).
    lt_u = quad.L.T @ u
    scale = np.sqrt(1.0 + eps_hat) * np.linalg.norm(lt_u, axis=0)
    x = u / scale
    inner_inf = np.abs(inst.matrix @ x).max(axis=0)
    inner_violations = int(np.count_nonzero(inner_inf > 1.0 + CONTAINMENT_SLACK))

    au_inf = np.abs(inst.matrix @ u).max(axis=0)
    y = u / au_inf
    lt_y = quad.L.T @ y
    outer_val = np.einsum("ij,ij->j", lt_y, lt_y)
    outer_violations = int(np.count_nonzero(outer_val > n + CONTAINMENT_SLACK))

    return ContainmentResult(
        inner_pass=inner_violations == 0,
        outer_pass=outer_violations == 0,
        inner_violations=inner_violations,
        outer_violations=outer_violations,
        samples=samples,
    )


@dataclass(frozen=True)
class OracleSolution:
    """Reference weights from the greedy ascent.

    ``support_deviation`` is ``max |sigma_i - 1|`` over rows whose weight
    exceeds ``support_threshold``; at an exact optimum it is zero.
    ``history`` holds per-step logdet values when requested, else None.
    """

    weights: np.ndarray
    iterations: int
    max_sigma: float
    support_deviation: float
    logdet: float
    support_threshold: float = SUPPORT_THRESHOLD
    history: list[float] | None = None


def _exact_state(inst: PolytopeInstance, w: np.ndarray):
    quad = cholesky_of_weighted_gram(inst, w)
    inv = cho_solve((quad.L, True), np.eye(inst.n), check_finite=False)
    inv = 0.5 * (inv + inv.T)
    sigma = _leverage_from_factor(inst, quad.L)
    return inv, sigma, quad.logdet


def _step_gain(n: int, tau: float, d: float) -> float:
    # logdet change of M <- (1-tau) M + tau * n * a a^T when a^T M^{-1} a = d/n.
    if 1.0 + tau * (d - 1.0) <= 0.0:
        return -math.inf
    if n == 1:
        return math.log1p(tau * (d - 1.0))
    return (n - 1) * math.log1p(-tau) + math.log1p(tau * (d - 1.0))


def _is_flat(w: np.ndarray, sigma: np.ndarray, tol: float) -> bool:
    # Optimality needs sigma <= 1+tol everywhere and, by complementary
    # slackness, sigma >= 1-tol on every supported row.
    if float(sigma.max()) > 1.0 + tol:
        return False
    support = w > SUPPORT_THRESHOLD
    return float(sigma[support].min()) >= 1.0 - tol


def oracle_solve(
    inst: PolytopeInstance,
    tol: float = 1e-6,
    max_iters: int = 200_000,
    *,
    record_history: bool = False,
) -> OracleSolution:
    """Greedy single-coordinate ascent to reference weights.

    Maintains ``sum(w) = n`` and repeatedly moves mass along one coordinate
    with the exact line-search step: toward the row with the largest score
    (``tau = (d - n) / (n (d - 1))`` for ``d = n * sigma_j``), or away from
    the worst supported row when that gains more, clamping away steps at the
    bound so weights can reach exactly zero.  Stops once an exactly
    recomputed score vector is flat: ``max sigma <= 1 + tol`` and
    ``sigma >= 1 - tol`` on every supported row.  The score vector and Gram
    inverse are updated rank-one per step and refreshed from a fresh
    factorization every few hundred steps.

    Raises :class:`NoConvergenceError` when ``max_iters`` steps were not
    enough.
    """
    if not 0.0 < tol < 1.0:
        raise DomainError(f"tol must lie in (0, 1), got {tol!r}")
    if max_iters < 1:
        raise DomainError(f"max_iters must be >= 1, got {max_iters!r}")

    m, n = inst.m, inst.n
    w = np.full(m, n / m)
    inv, sigma, logdet = _exact_state(inst, w)
    fresh = True
    history: list[float] | None = [logdet] if record_history else None

    steps = 0
    while True:
        if _is_flat(w, sigma, tol):
            if fresh:
                break
            inv, sigma, logdet = _exact_state(inst, w)
            fresh = True
            continue
        if steps >= max_iters:
            inv, sigma, logdet = _exact_state(inst, w)
            if _is_flat(w, sigma, tol):
                break
            raise NoConvergenceError(max_iters, float(sigma.max()))
        steps += 1

        jmax = int(np.argmax(sigma))
        smax = float(sigma[jmax])
        d_add = n * smax
        tau_add = (d_add - n) / (n * (d_add - 1.0))
        gain_add = _step_gain(n, tau_add, d_add)
        j, tau = jmax, tau_add

        support = np.flatnonzero(w > 0.0)
        if support.size > 1:
            jmin = int(support[np.argmin(sigma[support])])
            d_away = n * float(sigma[jmin])
            if d_away < n and n > w[jmin]:
                bound = -w[jmin] / (n - w[jmin])
                if d_away > 1.0:
                    tau_away = max((d_away - n) / (n * (d_away - 1.0)), bound)
                else:
                    tau_away = bound
                if _step_gain(n, tau_away, d_away) > gain_add:
                    j, tau = jmin, tau_away

        if tau >= 1.0:
            # n == 1 only: the exact step jumps to the vertex outright.
            w = np.zeros(m)
            w[j] = float(n)
            inv, sigma, logdet = _exact_state(inst, w)
            fresh = True
            if record_history:
                history.append(logdet)
            continue

        a_j = inst.row_dense(j)
        c = inv @ a_j
        p = inst.matrix @ c
        beta = tau * n / (1.0 - tau)
        den = 1.0 + beta * float(p[j])
        if not math.isfinite(den) or den <= 0.0:
            # Rank-one drift produced an unusable pivot: retry from exact data.
            steps -= 1
            inv, sigma, logdet = _exact_state(inst, w)
            fresh = True
            continue
        factor = beta / den
        inv = (inv - factor * np.outer(c, c)) / (1.0 - tau)
        inv = 0.5 * (inv + inv.T)
        sigma = (sigma - factor * p * p) / (1.0 - tau)
        logdet += n * math.log1p(-tau) + math.log(den)
        w = (1.0 - tau) * w
        w[j] += tau * n
        if tau < 0.0 and w[j] < 1e-15:
            w[j] = 0.0
        fresh = False

        if record_history:
            quad = cholesky_of_weighted_gram(inst, w)
            history.append(quad.logdet)
        if steps % _REFRESH_EVERY == 0:
            inv, sigma, logdet = _exact_state(inst, w)
            fresh = True

    w = w * (n / w.sum())
    _, sigma, logdet = _exact_state(inst, w)
    supported = w > SUPPORT_THRESHOLD
    deviation = float(np.abs(sigma[supported] - 1.0).max())
    return OracleSolution(
        weights=w,
        iterations=steps,
        max_sigma=float(sigma.max()),
        support_deviation=deviation,
        logdet=logdet,
        history=history,
    )


def volume_ratio(inst: PolytopeInstance, w, w_star) -> float:
    """Volume of the certified shrunk ellipsoid relative to the reference.

    With ``Q = A^T diag(w) A``, ``eps_hat = max sigma(w) - 1`` and reference
    quadratic ``Q* = A^T diag(w*) A``, returns

        vol({x : (1+eps_hat) x^T Q x <= 1}) / vol({x : x^T Q* x <= 1})
        = exp((logdet Q* - n*log(1+eps_hat) - logdet Q) / 2)

    (the volume of ``{x : x^T M x <= 1}`` scales as ``det(M)^{-1/2}``).  For
    weights summing to n this is at least ``exp(-n * eps_hat / 2)`` and at
    most 1 up to reference slack.
    """
    w = validate_weights(w, inst.m)
    w_star = validate_weights(w_star, inst.m)
    n = inst.n

    quad = cholesky_of_weighted_gram(inst, w)
    sigma = _leverage_from_factor(inst, quad.L)
    eps_hat = float(sigma.max()) - 1.0
    ref = cholesky_of_weighted_gram(inst, w_star)
    return math.exp((ref.logdet - n * math.log1p(eps_hat) - quad.logdet) / 2.0)
