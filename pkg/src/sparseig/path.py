"""Variable-selection paths for the sparse maximum-eigenvalue problem.

Four rankings over nested index sets, from cheapest to most expensive:

``path_sort``
    variables ordered by diagonal entry (variance).
``path_threshold``
    variables ordered by squared projection onto the top eigenspace.
``path_greedy_approx``
    one-pass greedy driven by squared scores (a_i'x_k)^2, which lower
    bound the eigenvalue increase of adding variable i; optional
    lookahead re-checks the top candidates exactly.
``path_greedy_full``
    greedy with an exact eigenvalue solve for every candidate at every
    step.

All paths report indices in the original numbering, ascending, and all
four reuse one incremental engine: the factor-space matrix
``M_k = sum_{i in I_k} a_i a_i'`` is updated in place and its leading
eigenpair is warm-started from the previous step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyPattern
from .linalg import (
    DEFAULT_EIG_TOL,
    DENSE_EIG_MAX,
    EigenPair,
    FactorMatrix,
    SymMatrix,
    _canonical_unit,
    _leading_eigenpair_safe,
    _orient,
    _sym_values,
    as_factor,
)

__all__ = [
    "PathPoint",
    "Path",
    "preprocess",
    "prune_variables",
    "path_sort",
    "path_threshold",
    "path_greedy_full",
    "path_greedy_approx",
]

log = logging.getLogger("sparseig.path")


@dataclass(frozen=True)
class PathPoint:
    """One cardinality level of a path.

    indices are ascending in the original numbering; loadings is the
    unit loading vector supported on them; variance is the top
    eigenvalue of the corresponding principal submatrix.  gain is the
    squared score (a_i'x)^2 of the variable whose addition produced this
    point (None at k = 1 and for rankings that do not use scores).
    """

    k: int
    indices: tuple[int, ...]
    loadings: np.ndarray
    variance: float
    gain: float | None = None


@dataclass(frozen=True)
class Path:
    """Sequence of nested PathPoints for k = 1 .. k_max."""

    method: str
    points: tuple[PathPoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def point(self, k: int) -> PathPoint:
        """Point at cardinality k (1-based)."""
        if k < 1 or k > len(self.points):
            raise IndexError(f"no path point at cardinality {k}")
        pt = self.points[k - 1]
        assert pt.k == k
        return pt

    def pattern(self, k: int) -> tuple[int, ...]:
        return self.point(k).indices

    def variances(self) -> np.ndarray:
        return np.array([p.variance for p in self.points])


class _Workspace:
    """Factor plus (exact, if available) diagonal of the represented matrix."""

    def __init__(self, matrix, eig_tol: float):
        if isinstance(matrix, FactorMatrix):
            self.sigma = None
            self.factor = matrix
            self.diag = matrix.column_sq_norms()
        else:
            values = _sym_values(matrix)
            self.sigma = values
            self.factor = as_factor(values)
            # read the diagonal off the original matrix so exact ties survive
            self.diag = values.diagonal().copy()
        self.A = self.factor.values
        self.n = self.factor.n
        self.r = self.factor.r
        self.eig_tol = eig_tol

    def allowed(self, rho: float | None) -> np.ndarray:
        if rho is None:
            return np.ones(self.n, dtype=bool)
        return self.diag >= rho


def _top_pair(M: np.ndarray, v0: np.ndarray | None, eig_tol: float) -> EigenPair:
    return _leading_eigenpair_safe(0.5 * (M + M.T), eig_tol=eig_tol, v0=v0)


def _loading_vector(ws: _Workspace, idx: list[int], x: np.ndarray, value: float) -> np.ndarray:
    z = np.zeros(ws.n)
    if value > 0.0:
        zi = ws.A[:, idx].T @ x / np.sqrt(value)
        nrm = float(np.linalg.norm(zi))
        zi = zi / nrm if nrm > 0.0 else _canonical_unit(len(idx))
    else:
        zi = _canonical_unit(len(idx))
    z[idx] = zi
    return _orient(z)


def _ranked_first(scores: np.ndarray, count: int) -> np.ndarray:
    """Indices of the `count` largest scores, ties broken by lowest index."""
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    return order[:count]


def _exact_candidate_values(
    ws: _Workspace, chosen: list[int], gram: np.ndarray, M: np.ndarray, cands: np.ndarray, x_warm: np.ndarray
) -> np.ndarray:
    """lambda_max of the pattern extended by each candidate, computed exactly."""
    k = len(chosen)
    out = np.empty(len(cands))
    if k + 1 <= ws.r:
        # bordered Gram submatrix: cheaper than factor space while k < r
        cross = ws.A[:, chosen].T @ ws.A[:, cands]
        aug = np.empty((k + 1, k + 1))
        aug[:k, :k] = gram[:k, :k]
        for j, i in enumerate(cands):
            aug[:k, k] = cross[:, j]
            aug[k, :k] = cross[:, j]
            aug[k, k] = ws.diag[i]
            out[j] = np.linalg.eigvalsh(aug)[-1] if k + 1 <= DENSE_EIG_MAX else _top_pair(
                aug, None, ws.eig_tol
            ).value
    else:
        for j, i in enumerate(cands):
            a = ws.A[:, i]
            out[j] = _top_pair(M + np.outer(a, a), x_warm, ws.eig_tol).value
    return out


def _greedy_path(
    ws: _Workspace,
    method: str,
    exact_all: bool,
    lookahead: int,
    k_max: int | None,
    rho: float | None,
) -> Path:
    mask = ws.allowed(rho)
    if not mask.any():
        return Path(method=method, points=())
    cap = int(mask.sum()) if k_max is None else min(int(k_max), int(mask.sum()))

    d = np.where(mask, ws.diag, -np.inf)
    first = int(_ranked_first(d, 1)[0])
    chosen = [first]
    mask = mask.copy()
    mask[first] = False

    M = np.outer(ws.A[:, first], ws.A[:, first])
    gram = np.empty((cap, cap))
    gram[0, 0] = ws.diag[first]
    a0 = ws.A[:, first]
    nrm = float(np.linalg.norm(a0))
    x = a0 / nrm if nrm > 0.0 else _canonical_unit(ws.r)
    value = ws.diag[first]

    points = [
        PathPoint(
            k=1,
            indices=(first,),
            loadings=_loading_vector(ws, [first], x, value),
            variance=float(value),
            gain=None,
        )
    ]

    for k in range(2, cap + 1):
        scores = (ws.A.T @ x) ** 2
        scores[~mask] = -np.inf
        cands = np.flatnonzero(mask)
        if exact_all:
            exact = _exact_candidate_values(ws, chosen, gram, M, cands, x)
            j = int(np.argmax(exact))  # first max wins: lowest index
            sel = int(cands[j])
        elif lookahead > 1:
            top = _ranked_first(scores, min(lookahead, len(cands)))
            exact = _exact_candidate_values(ws, chosen, gram, M, top, x)
            sel = int(top[int(np.argmax(exact))])
        else:
            sel = int(_ranked_first(scores, 1)[0])
        gain = float(scores[sel])

        # grow the Gram submatrix and the factor-space matrix
        cross = ws.A[:, chosen].T @ ws.A[:, sel]
        m = len(chosen)
        gram[:m, m] = cross
        gram[m, :m] = cross
        gram[m, m] = ws.diag[sel]
        chosen.append(sel)
        mask[sel] = False
        a = ws.A[:, sel]
        M += np.outer(a, a)

        pair = _top_pair(M, x, ws.eig_tol)
        value, x = pair.value, pair.vector
        idx = sorted(chosen)
        points.append(
            PathPoint(
                k=k,
                indices=tuple(idx),
                loadings=_loading_vector(ws, idx, x, value),
                variance=float(value),
                gain=gain,
            )
        )
    return Path(method=method, points=tuple(points))


def _ordered_path(ws: _Workspace, order: np.ndarray, method: str, k_max: int | None, rho: float | None) -> Path:
    mask = ws.allowed(rho)
    order = [int(i) for i in order if mask[i]]
    if not order:
        return Path(method=method, points=())
    cap = len(order) if k_max is None else min(int(k_max), len(order))

    M = np.zeros((ws.r, ws.r))
    x: np.ndarray | None = None
    chosen: list[int] = []
    points = []
    for k in range(1, cap + 1):
        i = order[k - 1]
        chosen.append(i)
        a = ws.A[:, i]
        M += np.outer(a, a)
        warm = x
        if warm is None:
            nrm = float(np.linalg.norm(a))
            warm = a / nrm if nrm > 0.0 else _canonical_unit(ws.r)
        pair = _top_pair(M, warm, ws.eig_tol)
        value, x = pair.value, pair.vector
        idx = sorted(chosen)
        points.append(
            PathPoint(
                k=k,
                indices=tuple(idx),
                loadings=_loading_vector(ws, idx, x, value),
                variance=float(value),
                gain=None,
            )
        )
    return Path(method=method, points=tuple(points))


def preprocess(sigma, sqrt_tol: float = 1e-8, psd_slack: float | None = None):
    """Sort variables by decreasing diagonal and factor the permuted matrix.

    Returns ``(perm, factor)`` where perm is the permutation (0-based
    positions into the original numbering, stable under ties) and factor
    is a square root of the permuted matrix.
    """
    values = _sym_values(sigma)
    d = values.diagonal()
    perm = np.lexsort((np.arange(d.shape[0]), -d))
    permuted = values[np.ix_(perm, perm)]
    return perm, as_factor(permuted, sqrt_tol=sqrt_tol, psd_slack=psd_slack)


def prune_variables(sigma, rho: float) -> tuple[int, ...]:
    """Variables that can still appear at penalty rho: diagonal >= rho.

    A variable with diagonal below the penalty never enters an optimal
    solution of the penalized problem, so callers may drop it outright.
    """
    if isinstance(sigma, FactorMatrix):
        d = sigma.column_sq_norms()
    else:
        d = _sym_values(sigma).diagonal()
    return tuple(int(i) for i in np.flatnonzero(d >= rho))


def path_sort(matrix, k_max: int | None = None, rho: float | None = None, eig_tol: float = DEFAULT_EIG_TOL) -> Path:
    """Path that ranks variables by diagonal entry, ties to the lowest index."""
    ws = _Workspace(matrix, eig_tol)
    order = _ranked_first(ws.diag.astype(float), ws.n)
    return _ordered_path(ws, order, "sort", k_max, rho)


def path_threshold(
    matrix, k_max: int | None = None, rho: float | None = None, eig_tol: float = DEFAULT_EIG_TOL
) -> Path:
    """Path that ranks variables by squared projection onto the top eigenspace.

    With a simple top eigenvalue this is the usual |entry| ranking of the
    leading eigenvector; with a degenerate top eigenvalue the projection
    onto the whole eigenspace makes the ranking well defined (and ties
    fall back to the lowest index, e.g. every k-set for the identity).
    """
    ws = _Workspace(matrix, eig_tol)
    if ws.sigma is not None:
        w, V = np.linalg.eigh(ws.sigma)
        top = w[-1]
        mask = w >= top - 1e-10 * (1.0 + abs(top))
        weights = (V[:, mask] ** 2).sum(axis=1)
    else:
        m = ws.A @ ws.A.T
        w, V = np.linalg.eigh(0.5 * (m + m.T))
        top = w[-1]
        if top <= 0.0:
            weights = np.zeros(ws.n)
        else:
            mask = (w >= top - 1e-10 * (1.0 + abs(top))) & (w > 0.0)
            basis = ws.A.T @ V[:, mask] / np.sqrt(w[mask])
            weights = (basis**2).sum(axis=1)
    order = _ranked_first(weights, ws.n)
    return _ordered_path(ws, order, "threshold", k_max, rho)


def path_greedy_full(
    matrix, k_max: int | None = None, rho: float | None = None, eig_tol: float = DEFAULT_EIG_TOL
) -> Path:
    """Greedy path with an exact eigenvalue solve for every candidate."""
    ws = _Workspace(matrix, eig_tol)
    return _greedy_path(ws, "greedy-full", exact_all=True, lookahead=1, k_max=k_max, rho=rho)


def path_greedy_approx(
    matrix,
    lookahead: int = 1,
    k_max: int | None = None,
    rho: float | None = None,
    eig_tol: float = DEFAULT_EIG_TOL,
) -> Path:
    """Greedy path driven by squared scores (a_i'x)^2.

    The squared score of a candidate lower-bounds the eigenvalue gain of
    adding it, so each step of this path satisfies
    ``variance(k) >= variance(k-1) + gain(k)``.  With ``lookahead = p``
    the top p candidates by score are re-checked with an exact solve.
    """
    if lookahead < 1:
        raise ValueError("lookahead must be at least 1")
    ws = _Workspace(matrix, eig_tol)
    return _greedy_path(ws, "greedy-approx", exact_all=False, lookahead=lookahead, k_max=k_max, rho=rho)
