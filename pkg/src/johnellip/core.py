"""Constraint storage and the weighted-Gram / leverage-score kernel.

Everything in this package works on the centrally symmetric polytope
``{x : -1 <= A x <= 1}`` given by an m-by-n constraint matrix A with full
column rank.  The primitives below are shared by both solvers and the
verification layer:

* the weighted Gram matrix ``Q(w) = sum_i w_i a_i a_i^T`` and its Cholesky
  factor,
* the scores ``sigma_i(w) = a_i^T Q(w)^{-1} a_i`` (leverage scores of row i
  of ``sqrt(W) A`` divided by ``w_i``),
* the penalized design objective ``sum(w) - logdet Q(w) - n``.

Dense matrices are stored row-major, sparse ones in CSR.  All arrays are
float64 and instances are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cholesky, lapack, solve_triangular

from .errors import (
    DimensionError,
    DomainError,
    NotPositiveDefiniteError,
    RankDeficientError,
    ZeroRowError,
)

__all__ = [
    "PolytopeInstance",
    "EllipsoidQuadratic",
    "build_instance",
    "cholesky_of_weighted_gram",
    "leverage_scores",
    "objective_value",
    "validate_weights",
]

# Relative pivot cutoff for the construction-time rank check on A^T A.
RANK_PIVOT_RTOL = 1e-10
# A Cholesky pivot at or below GRAM_PIVOT_FLOOR * trace(Q) / n means the
# weighted Gram matrix has effectively lost rank.
GRAM_PIVOT_FLOOR = 1e-14
# Row-block size when densifying CSR slices for triangular solves.
_SPARSE_BLOCK_ROWS = 8192


@dataclass(frozen=True, eq=False)
class PolytopeInstance:
    """Validated constraint matrix of ``{x : -1 <= Ax <= 1}``.

    Construct through :func:`build_instance`; the matrix buffer is locked
    read-only so instances are safe to share across threads.
    """

    matrix: np.ndarray | sp.csr_array

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    @property
    def storage(self) -> str:
        return "csr" if self.is_sparse else "dense"

    def row_dense(self, i: int) -> np.ndarray:
        """Row i as a dense 1-D array."""
        if self.is_sparse:
            return self.matrix[[i], :].toarray().ravel()
        return np.asarray(self.matrix[i])

    def toarray(self) -> np.ndarray:
        """Dense copy of the constraint matrix."""
        if self.is_sparse:
            return self.matrix.toarray()
        return self.matrix.copy()


@dataclass(frozen=True, eq=False)
class EllipsoidQuadratic:
    """SPD quadratic ``Q`` defining the ellipsoid ``{x : x^T Q x <= 1}``.

    ``L`` is the lower Cholesky factor of ``Q`` and ``logdet`` equals
    ``2 * sum(log(diag(L)))`` by construction.
    """

    Q: np.ndarray
    L: np.ndarray
    logdet: float

    @property
    def n(self) -> int:
        return self.Q.shape[0]


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_instance(entries, m: int | None = None, n: int | None = None) -> PolytopeInstance:
    """Validate a constraint matrix and wrap it as a :class:`PolytopeInstance`.

    ``entries`` may be anything `numpy.asarray` accepts or a scipy sparse
    matrix (stored as CSR).  Optional ``m``/``n`` assert the expected shape.

    Raises
    ------
    DimensionError
        Not 2-D, empty, m < n, or shape mismatch with ``m``/``n``.
    ZeroRowError
        Some row is identically zero.
    RankDeficientError
        Column rank below n, judged by a pivoted Cholesky of ``A^T A`` with
        relative pivot cutoff ``RANK_PIVOT_RTOL``.
    """
    if sp.issparse(entries):
        a = sp.csr_array(entries, dtype=np.float64, copy=True)
        a.sum_duplicates()
        a.eliminate_zeros()
    else:
        a = np.array(entries, dtype=np.float64, order="C", copy=True)
        if a.ndim != 2:
            raise DimensionError(f"constraint matrix must be 2-D, got ndim={a.ndim}")

    rows, cols = a.shape
    if m is not None and rows != m:
        raise DimensionError(f"expected {m} rows, got {rows}")
    if n is not None and cols != n:
        raise DimensionError(f"expected {n} columns, got {cols}")
    if cols < 1:
        raise DimensionError("constraint matrix needs at least one column")
    if rows < cols:
        raise DimensionError(f"need m >= n, got m={rows}, n={cols}")

    if sp.issparse(a):
        if not np.all(np.isfinite(a.data)):
            raise DomainError("constraint matrix has non-finite entries")
        row_nnz = np.diff(a.indptr)
        zero = np.flatnonzero(row_nnz == 0)
    else:
        if not np.all(np.isfinite(a)):
            raise DomainError("constraint matrix has non-finite entries")
        zero = np.flatnonzero(~np.any(a != 0.0, axis=1))
    if zero.size:
        raise ZeroRowError(int(zero[0]))

    _check_full_column_rank(a)

    if sp.issparse(a):
        for buf in (a.data, a.indices, a.indptr):
            buf.setflags(write=False)
    else:
        _lock(a)
    return PolytopeInstance(a)


def _check_full_column_rank(a) -> None:
    if sp.issparse(a):
        g = (a.T @ a).toarray()
    else:
        g = a.T @ a
    g = 0.5 * (g + g.T)
    tol = RANK_PIVOT_RTOL * float(np.trace(g))
    _, _, rank, info = lapack.dpstrf(g, tol=tol, lower=1)
    if info < 0:
        raise LinAlgError(f"dpstrf failed with info={info}")
    if rank < g.shape[0]:
        raise RankDeficientError(
            f"constraint matrix has column rank {int(rank)} < {g.shape[0]}"
        )


def validate_weights(w, m: int) -> np.ndarray:
    """Return ``w`` as a float64 array of shape (m,), rejecting bad values."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.shape != (m,):
        raise DomainError(f"weight vector must have shape ({m},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("weight vector has non-finite entries")
    if np.any(arr < 0.0):
        raise DomainError("weight vector has negative entries")
    return arr


def cholesky_of_weighted_gram(inst: PolytopeInstance, w) -> EllipsoidQuadratic:
    """Factor ``Q(w) = A^T diag(w) A`` for nonnegative weights ``w``.

    Assembled as ``B^T B`` with ``B = sqrt(W) A`` (O(m n^2) dense,
    O(nnz n) sparse) and symmetrized, so ``Q`` is exactly symmetric.

    Raises :class:`NotPositiveDefiniteError` when the factorization fails or
    any pivot falls at or below ``GRAM_PIVOT_FLOOR * trace(Q) / n``.
    """
    w = validate_weights(w, inst.m)
    root = np.sqrt(w)
    if inst.is_sparse:
        b = inst.matrix.multiply(root[:, None]).tocsr()
        q = (b.T @ b).toarray()
    else:
        b = inst.matrix * root[:, None]
        q = b.T @ b
    q = 0.5 * (q + q.T)

    try:
        lower = cholesky(q, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise NotPositiveDefiniteError(f"weighted Gram matrix is singular: {exc}") from exc
    pivots = np.diag(lower) ** 2
    floor = GRAM_PIVOT_FLOOR * float(np.trace(q)) / inst.n
    if pivots.min() <= floor:
        raise NotPositiveDefiniteError(
            f"weighted Gram pivot {pivots.min():.3e} at or below floor {floor:.3e}"
        )
    logdet = 2.0 * float(np.sum(np.log(np.diag(lower))))
    return EllipsoidQuadratic(Q=_lock(q), L=_lock(lower), logdet=logdet)


def _leverage_from_factor(inst: PolytopeInstance, lower: np.ndarray) -> np.ndarray:
    """Scores ``sigma_i = ||L^{-1} a_i||^2`` given the Cholesky factor of Q.

    One batched forward triangular solve; the inverse is never formed and
    the squared norm keeps every score nonnegative in floating point.
    """
    if not inst.is_sparse:
        x = solve_triangular(lower, inst.matrix.T, lower=True, check_finite=False)
        return np.einsum("ij,ij->j", x, x)
    sigma = np.empty(inst.m)
    for start in range(0, inst.m, _SPARSE_BLOCK_ROWS):
        stop = min(start + _SPARSE_BLOCK_ROWS, inst.m)
        block = inst.matrix[start:stop, :].toarray()
        x = solve_triangular(lower, block.T, lower=True, check_finite=False)
        sigma[start:stop] = np.einsum("ij,ij->j", x, x)
    return sigma


def leverage_scores(inst: PolytopeInstance, w) -> np.ndarray:
    """Scores ``sigma_i(w) = a_i^T Q(w)^{-1} a_i`` for all rows at once.

    ``w_i * sigma_i(w)`` is the leverage score of row i of ``sqrt(W) A``;
    those products lie in [0, 1] and sum to n for any valid weights.
    """
    quad = cholesky_of_weighted_gram(inst, w)
    return _leverage_from_factor(inst, quad.L)


def objective_value(inst: PolytopeInstance, w) -> float:
    """Penalized design objective ``sum(w) - logdet Q(w) - n``."""
    w = validate_weights(w, inst.m)
    quad = cholesky_of_weighted_gram(inst, w)
    return float(np.sum(w)) - quad.logdet - inst.n
