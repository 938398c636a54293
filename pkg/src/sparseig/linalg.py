"""Symmetric-matrix kernels: PSD square roots, leading eigenpairs, trace-plus.

All heavy decompositions are delegated to LAPACK (dense) or ARPACK
(iterative, above ``DENSE_EIG_MAX``).  Every routine is deterministic:
iterative solves use a fixed seeded start vector unless a warm start is
passed in, and returned eigenvectors follow a sign convention (the entry
of largest magnitude is nonnegative).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import EmptyPattern, NoConvergence, NotPositiveSemidefinite

__all__ = [
    "DENSE_EIG_MAX",
    "DEFAULT_EIG_TOL",
    "DEFAULT_SQRT_TOL",
    "SymMatrix",
    "FactorMatrix",
    "EigenPair",
    "square_root",
    "leading_eigenpair",
    "trace_plus",
    "pattern_eigvec",
    "as_factor",
    "normalize_pattern",
]

log = logging.getLogger("sparseig.linalg")

# Dense eigendecomposition below this size, Lanczos iteration above.
DENSE_EIG_MAX = 64
DEFAULT_EIG_TOL = 1e-10
DEFAULT_SQRT_TOL = 1e-8

_START_SEED = 206071


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix; storage is exactly symmetric.

    The constructor symmetrizes, so ``values[i, j] == values[j, i]``
    holds bitwise.  Inputs that are not even approximately symmetric
    are rejected.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {v.shape}")
        if v.shape[0] < 1:
            raise ValueError("dimension must be at least 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("matrix entries must be finite")
        scale = float(np.abs(v).max()) if v.size else 0.0
        if np.abs(v - v.T).max() > 1e-8 * (1.0 + scale):
            raise ValueError("matrix is not symmetric")
        object.__setattr__(self, "values", 0.5 * (v + v.T))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.values.diagonal().copy()


@dataclass(frozen=True)
class FactorMatrix:
    """Rectangular factor A, shape (r, n); column i belongs to variable i.

    Represents the symmetric matrix A'A without forming it.  r can be
    smaller than n when the represented matrix is rank deficient.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("factor must be a 2-d array")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("factor must have at least one row and column")
        if not np.all(np.isfinite(v)):
            raise ValueError("factor entries must be finite")
        object.__setattr__(self, "values", v)

    @property
    def r(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def gram(self) -> np.ndarray:
        g = self.values.T @ self.values
        return 0.5 * (g + g.T)

    def column_sq_norms(self) -> np.ndarray:
        return np.einsum("ri,ri->i", self.values, self.values)


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue together with a unit eigenvector."""

    value: float
    vector: np.ndarray


def _sym_values(matrix) -> np.ndarray:
    if isinstance(matrix, SymMatrix):
        return matrix.values
    if isinstance(matrix, FactorMatrix):
        raise TypeError("expected a symmetric matrix, got a FactorMatrix")
    return SymMatrix(np.asarray(matrix, dtype=float)).values


def _orient(vec: np.ndarray) -> np.ndarray:
    # sign convention: the entry of largest magnitude is made nonnegative
    j = int(np.argmax(np.abs(vec)))
    if vec[j] < 0.0:
        return -vec
    return vec


def _canonical_unit(r: int) -> np.ndarray:
    e = np.zeros(r)
    e[0] = 1.0
    return e


def _default_start(n: int) -> np.ndarray:
    v = np.random.default_rng(_START_SEED).standard_normal(n)
    return v / np.linalg.norm(v)


def normalize_pattern(pattern, n: int) -> tuple[int, ...]:
    """Validate an index set: nonempty, unique, within range; returns it sorted."""
    idx = tuple(sorted(int(i) for i in pattern))
    if not idx:
        raise EmptyPattern("pattern must contain at least one index")
    if len(set(idx)) != len(idx):
        raise ValueError("pattern has repeated indices")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"pattern index out of range for dimension {n}")
    return idx


def square_root(sigma, sqrt_tol: float = DEFAULT_SQRT_TOL, psd_slack: float | None = None) -> FactorMatrix:
    """Factor a PSD matrix as A'A using its eigendecomposition.

    Parameters
    ----------
    sigma : array or SymMatrix
        Symmetric positive semidefinite matrix.  Eigenvalues are allowed
        to dip to ``-psd_slack`` (default ``1e-10 * ||sigma||_F``) and are
        clamped to zero.
    sqrt_tol : float
        Relative reconstruction guarantee: ``||A'A - sigma||_F`` stays
        within ``sqrt_tol * (1 + ||sigma||_F)``.

    Returns
    -------
    FactorMatrix
        Factor with r <= n rows; rows for numerically zero eigenvalues
        are dropped.

    Raises
    ------
    NotPositiveSemidefinite
        If an eigenvalue falls below the slack.
    """
    S = _sym_values(sigma)
    n = S.shape[0]
    scale = float(np.linalg.norm(S, "fro"))
    slack = 1e-10 * scale if psd_slack is None else float(psd_slack)
    w, V = np.linalg.eigh(S)
    if w[0] < -slack:
        raise NotPositiveSemidefinite(
            f"smallest eigenvalue {w[0]:.6e} is below the allowed slack {-slack:.6e}"
        )
    w = np.clip(w[::-1], 0.0, None)
    V = V[:, ::-1]
    cutoff = w[0] * 1e-14
    keep = w > cutoff
    if not np.any(keep):
        rows = np.zeros((1, n))
    else:
        rows = np.sqrt(w[keep])[:, None] * V[:, keep].T
        rows = np.vstack([_orient(row) for row in rows])
    err = float(np.linalg.norm(rows.T @ rows - S, "fro"))
    if err > sqrt_tol * (1.0 + scale):
        raise ArithmeticError(f"square root reconstruction error {err:.3e} exceeds tolerance")
    return FactorMatrix(rows)


def leading_eigenpair(
    matrix,
    eig_tol: float = DEFAULT_EIG_TOL,
    v0: np.ndarray | None = None,
    max_iter: int | None = None,
) -> EigenPair:
    """Algebraically largest eigenpair of a symmetric matrix.

    Dense decomposition up to ``DENSE_EIG_MAX``; above that a Lanczos
    iteration with a deterministic (or caller-supplied) start vector,
    capped at ``10 * n`` restarts and residual-checked against
    ``eig_tol * (1 + |value|)``.

    Raises
    ------
    NoConvergence
        If the iteration cap is reached or the residual check fails.
        Callers may fall back to a full decomposition.
    """
    S = _sym_values(matrix)
    n = S.shape[0]
    if n <= DENSE_EIG_MAX:
        w, V = np.linalg.eigh(S)
        return EigenPair(float(w[-1]), _orient(V[:, -1]))
    if v0 is None:
        v0 = _default_start(n)
    cap = 10 * n if max_iter is None else int(max_iter)
    try:
        vals, vecs = spla.eigsh(S, k=1, which="LA", v0=np.asarray(v0, dtype=float), maxiter=cap, tol=eig_tol)
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(f"Lanczos iteration did not converge within {cap} restarts") from exc
    value = float(vals[0])
    vector = vecs[:, 0]
    residual = float(np.linalg.norm(S @ vector - value * vector))
    if residual > eig_tol * (1.0 + abs(value)):
        raise NoConvergence(
            f"residual {residual:.3e} exceeds {eig_tol:.1e} * (1 + |value|) after {cap} restarts"
        )
    return EigenPair(value, _orient(vector))


def _leading_eigenpair_safe(
    matrix, eig_tol: float = DEFAULT_EIG_TOL, v0: np.ndarray | None = None
) -> EigenPair:
    """leading_eigenpair with a dense fallback instead of NoConvergence."""
    try:
        return leading_eigenpair(matrix, eig_tol=eig_tol, v0=v0)
    except NoConvergence:
        log.info("iterative eigensolve failed, falling back to dense decomposition")
        S = _sym_values(matrix)
        w, V = np.linalg.eigh(S)
        return EigenPair(float(w[-1]), _orient(V[:, -1]))


def trace_plus(matrix) -> float:
    """Sum of the positive eigenvalues of a symmetric matrix."""
    w = np.linalg.eigvalsh(_sym_values(matrix))
    return float(w[w > 0.0].sum())


def pattern_eigvec(
    factor: FactorMatrix,
    pattern,
    eig_tol: float = DEFAULT_EIG_TOL,
    v0: np.ndarray | None = None,
) -> EigenPair:
    """Leading eigenpair of ``sum_{i in pattern} a_i a_i'`` in factor space.

    The value equals the top eigenvalue of the principal submatrix of
    A'A indexed by the pattern; the vector lives in R^r.  For patterns
    smaller than r the pair is computed through the k x k Gram submatrix
    and mapped back, otherwise directly in factor space.

    Raises
    ------
    EmptyPattern
        If the pattern is empty.
    """
    if not isinstance(factor, FactorMatrix):
        raise TypeError("pattern_eigvec expects a FactorMatrix")
    idx = normalize_pattern(pattern, factor.n)
    cols = factor.values[:, idx]
    r = factor.r
    if len(idx) < r:
        g = cols.T @ cols
        pair = _leading_eigenpair_safe(0.5 * (g + g.T), eig_tol=eig_tol)
        value = float(pair.value)
        if value <= 0.0:
            x = _canonical_unit(r)
        else:
            x = cols @ pair.vector
            nrm = float(np.linalg.norm(x))
            x = x / nrm if nrm > 0.0 else _canonical_unit(r)
    else:
        m = cols @ cols.T
        pair = _leading_eigenpair_safe(0.5 * (m + m.T), eig_tol=eig_tol, v0=v0)
        value = float(pair.value)
        x = pair.vector if value > 0.0 else _canonical_unit(r)
    return EigenPair(value, _orient(x))


def as_factor(matrix, sqrt_tol: float = DEFAULT_SQRT_TOL, psd_slack: float | None = None) -> FactorMatrix:
    """Coerce input to a FactorMatrix.

    FactorMatrix passes through untouched (data mode); anything square and
    symmetric goes through :func:`square_root` (gram mode).
    """
    if isinstance(matrix, FactorMatrix):
        return matrix
    return square_root(matrix, sqrt_tol=sqrt_tol, psd_slack=psd_slack)
