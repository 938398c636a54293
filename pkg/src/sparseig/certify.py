"""Dual witnesses, duality gaps, and upper bounds for sparse eigenvalue problems.

The penalized problem

    phi(rho) = max_{|x| = 1} sum_i ((a_i' x)^2 - rho)_+

admits an explicit family of dual-feasible witnesses Y_1 .. Y_n built
from a candidate pattern I and its leading eigenvector x:

* for i in I:    Y_i = (B_i x)(B_i x)' / (x' B_i x),  B_i = a_i a_i' - rho I
* for i not in I: Y_i = c_i d_i d_i' with
      c_i = max(0, rho (a_i'a_i - rho) / (rho - (a_i'x)^2)),
      d_i the unit direction of (I - xx') a_i.

The witness is well defined for rho strictly inside the consistency
interval  max_{i not in I} (a_i'x)^2 < rho < min_{i in I} (a_i'x)^2.
lambda_max(sum Y_i) is then an upper bound on phi(rho); when it meets
the primal value sum_{i in I}((a_i'x)^2 - rho), the pattern is globally
optimal.  The gap is convex in rho, so `minimize_gap` locates its
minimizer by bisection on an analytic subgradient.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import path as path_mod
from .errors import EmptySet, InconsistentRho, InfeasibleWitness, DegeneratePivot
from .linalg import (
    DEFAULT_EIG_TOL,
    EigenPair,
    FactorMatrix,
    _leading_eigenpair_safe,
    _sym_values,
    as_factor,
    normalize_pattern,
    pattern_eigvec,
    trace_plus,
)

__all__ = [
    "STATUS_OPTIMAL",
    "STATUS_INCONCLUSIVE",
    "STATUS_EMPTY_INTERVAL",
    "DEFAULT_CERT_TOL",
    "DISPLAY_CERT_TOL",
    "DualWitness",
    "Certificate",
    "consistency_interval",
    "build_dual",
    "gap",
    "minimize_gap",
    "phi_upper_bound",
    "baseline_upper_bound",
    "card_bound",
    "certify_pattern",
    "certify_path",
    "build_bound_pool",
    "expansion_residual",
]

log = logging.getLogger("sparseig.certify")

STATUS_OPTIMAL = "optimal"
STATUS_INCONCLUSIVE = "inconclusive"
STATUS_EMPTY_INTERVAL = "empty-interval"

DEFAULT_CERT_TOL = 1e-6
# looser threshold used when flagging points on reported curves
DISPLAY_CERT_TOL = 1e-4


@dataclass(frozen=True)
class DualWitness:
    """Compact rank-one representation of the dual matrices Y_1 .. Y_n."""

    rho: float
    pattern: tuple[int, ...]
    x: np.ndarray
    inside_vectors: np.ndarray  # (r, |I|), column j holds B_i x
    inside_values: np.ndarray  # (|I|,), x' B_i x, strictly positive
    outside_indices: tuple[int, ...]
    outside_scales: np.ndarray  # (q,), c_i >= 0
    outside_dirs: np.ndarray  # (r, q), unit columns (zero column when c_i = 0)

    @property
    def primal_value(self) -> float:
        """sum_{i in I} ((a_i'x)^2 - rho)."""
        return float(self.inside_values.sum())

    def matrix(self) -> np.ndarray:
        """Dense sum of all dual terms (r x r)."""
        m = _assemble(self.inside_vectors, self.inside_values, self.outside_dirs, self.outside_scales)
        return m

    def term_matrix(self, i: int) -> np.ndarray:
        """Dense Y_i for a single variable index."""
        if i in self.pattern:
            j = self.pattern.index(i)
            v = self.inside_vectors[:, j]
            return np.outer(v, v) / self.inside_values[j]
        if i in self.outside_indices:
            j = self.outside_indices.index(i)
            d = self.outside_dirs[:, j]
            return self.outside_scales[j] * np.outer(d, d)
        raise ValueError(f"index {i} not covered by this witness")


@dataclass(frozen=True)
class Certificate:
    """Outcome of minimizing the duality gap over a pattern's interval."""

    pattern: tuple[int, ...]
    x: np.ndarray
    rho_min: float
    rho_max: float
    rho_star: float | None
    gap_value: float | None
    primal_value: float | None
    phi_upper: float | None
    variance: float
    status: str

    @property
    def relative_gap(self) -> float | None:
        if self.gap_value is None or self.primal_value is None:
            return None
        return self.gap_value / max(1.0, self.primal_value)

    @property
    def certified(self) -> bool:
        return self.status == STATUS_OPTIMAL


def _assemble(vin: np.ndarray, vals: np.ndarray, dirs: np.ndarray, scales: np.ndarray) -> np.ndarray:
    r = vin.shape[0] if vin.size else dirs.shape[0]
    m = np.zeros((r, r))
    if vin.size:
        m += (vin / vals) @ vin.T
    if dirs.size:
        m += (dirs * scales) @ dirs.T
    return 0.5 * (m + m.T)


def consistency_interval(
    factor: FactorMatrix, pattern, eig_tol: float = DEFAULT_EIG_TOL, x: np.ndarray | None = None
):
    """Pattern eigenvector and the open interval of admissible penalties.

    Returns ``(x, rho_min, rho_max)`` with
    ``rho_min = max_{i not in I} (a_i'x)^2`` (0 when I covers everything,
    since penalties are nonnegative) and ``rho_max = min_{i in I}
    (a_i'x)^2``.  The interior may be empty; callers must check.
    """
    factor = _require_factor(factor)
    idx = normalize_pattern(pattern, factor.n)
    if x is None:
        x = pattern_eigvec(factor, idx, eig_tol=eig_tol).vector
    scores = (factor.values.T @ x) ** 2
    inside = np.asarray(idx, dtype=int)
    outside = np.setdiff1d(np.arange(factor.n), inside, assume_unique=True)
    rho_max = float(scores[inside].min())
    rho_min = float(scores[outside].max()) if outside.size else 0.0
    return x, rho_min, rho_max


def _require_factor(factor) -> FactorMatrix:
    if not isinstance(factor, FactorMatrix):
        raise TypeError("expected a FactorMatrix; use as_factor() on a symmetric matrix first")
    return factor


def _witness_parts(A: np.ndarray, diag: np.ndarray, inside: np.ndarray, outside: np.ndarray,
                   x: np.ndarray, rho: float):
    """Rank-one pieces of every dual term at penalty rho.

    Caller guarantees rho is strictly admissible for x.
    """
    proj = A.T @ x
    sq = proj**2
    vin = A[:, inside] * proj[inside] - rho * x[:, None]
    vals = sq[inside] - rho
    s = diag[outside]
    den = rho - sq[outside]
    num = rho * (s - rho)
    g = A[:, outside] - x[:, None] * proj[outside]
    gn = np.linalg.norm(g, axis=0)
    active = (num > 0.0) & (gn > 1e-300)
    scales = np.zeros(outside.shape[0])
    dirs = np.zeros_like(g)
    if active.any():
        scales[active] = num[active] / den[active]
        dirs[:, active] = g[:, active] / gn[active]
    return proj, sq, vin, vals, scales, dirs


def build_dual(factor: FactorMatrix, pattern, x: np.ndarray, rho: float) -> DualWitness:
    """Assemble the dual witness at penalty rho for a pattern and its vector x.

    Raises
    ------
    InconsistentRho
        If rho is not strictly inside the open consistency interval
        implied by x, or is negative.
    """
    factor = _require_factor(factor)
    idx = normalize_pattern(pattern, factor.n)
    A = factor.values
    x = np.asarray(x, dtype=float)
    inside = np.asarray(idx, dtype=int)
    outside = np.setdiff1d(np.arange(factor.n), inside, assume_unique=True)
    scores = (A.T @ x) ** 2
    if rho < 0.0:
        raise InconsistentRho(f"penalty must be nonnegative, got {rho}")
    lo = float(scores[outside].max()) if outside.size else 0.0
    hi = float(scores[inside].min())
    # full patterns have no outside scores, so rho = 0 is admissible there
    above = rho > lo or (outside.size == 0 and rho >= lo)
    if not (above and rho < hi):
        raise InconsistentRho(f"penalty {rho} outside the open interval ({lo}, {hi})")
    diag = factor.column_sq_norms()
    _, _, vin, vals, scales, dirs = _witness_parts(A, diag, inside, outside, x, rho)
    return DualWitness(
        rho=float(rho),
        pattern=idx,
        x=x,
        inside_vectors=vin,
        inside_values=vals,
        outside_indices=tuple(int(i) for i in outside),
        outside_scales=scales,
        outside_dirs=dirs,
    )


def gap(factor: FactorMatrix, pattern, x: np.ndarray, rho: float, eig_tol: float = DEFAULT_EIG_TOL) -> float:
    """Duality gap lambda_max(sum Y_i) - sum_{i in I}((a_i'x)^2 - rho) at rho.

    Nonnegative up to eigensolver tolerance: x itself witnesses
    x' (sum Y_i) x = primal value.
    """
    witness = build_dual(factor, pattern, x, rho)
    pair = _leading_eigenpair_safe(witness.matrix(), eig_tol=eig_tol)
    return float(pair.value - witness.primal_value)


def _gap_eval(A, diag, inside, outside, x, rho, eig_tol, u_warm):
    """One gap evaluation: returns (gap, lam, u, primal, derivative)."""
    proj, sq, vin, vals, scales, dirs = _witness_parts(A, diag, inside, outside, x, rho)
    m = _assemble(vin, vals, dirs, scales)
    pair = _leading_eigenpair_safe(m, eig_tol=eig_tol, v0=u_warm)
    lam, u = pair.value, pair.vector
    primal = float(vals.sum())
    gap_value = float(lam - primal)

    # analytic rho-derivative of sum_i u'Y_i u + |I| (subgradient of the gap)
    beta = float(u @ x)
    gamma = A.T @ u
    t1 = gamma[inside] * proj[inside] - rho * beta
    den_in = vals
    d_in = (t1**2 - 2.0 * beta * t1 * den_in) / den_in**2
    s = diag[outside]
    den_out = rho - sq[outside]
    d_out = np.zeros(outside.shape[0])
    live = s > rho  # right derivative at the kink c_i = 0
    if live.any():
        cp = ((s[live] - 2.0 * rho) * den_out[live] - rho * (s[live] - rho)) / den_out[live] ** 2
        ud = u @ dirs[:, live]
        d_out[live] = cp * ud**2
    deriv = float(d_in.sum() + d_out.sum() + inside.shape[0])
    return gap_value, float(lam), u, primal, deriv


def minimize_gap(
    factor: FactorMatrix,
    pattern,
    cert_tol: float = DEFAULT_CERT_TOL,
    eig_tol: float = DEFAULT_EIG_TOL,
    shrink_tol: float = 1e-8,
    margin: float = 1e-9,
    max_iter: int = 200,
) -> Certificate:
    """Minimize the duality gap over the pattern's penalty interval.

    The gap is convex on the open interval, so bisection on the sign of
    its analytic subgradient converges; the search stops once the
    bracket shrinks to ``shrink_tol`` times the interval width.  A
    midpoint evaluation that already meets ``cert_tol`` is accepted
    immediately.  Status is ``optimal`` iff the final gap is within
    ``cert_tol * max(1, primal value)``.
    """
    factor = _require_factor(factor)
    idx = normalize_pattern(pattern, factor.n)
    pair = pattern_eigvec(factor, idx, eig_tol=eig_tol)
    x = pair.vector
    variance = float(pair.value)
    _, rho_min, rho_max = consistency_interval(factor, idx, eig_tol=eig_tol, x=x)
    width = rho_max - rho_min
    delta = max(1e-12, margin * width)
    if width <= 0.0 or rho_min + delta >= rho_max - delta:
        return Certificate(
            pattern=idx, x=x, rho_min=rho_min, rho_max=rho_max, rho_star=None,
            gap_value=None, primal_value=None, phi_upper=None, variance=variance,
            status=STATUS_EMPTY_INTERVAL,
        )

    A = factor.values
    diag = factor.column_sq_norms()
    inside = np.asarray(idx, dtype=int)
    outside = np.setdiff1d(np.arange(factor.n), inside, assume_unique=True)
    lo, hi = rho_min + delta, rho_max - delta

    def evaluate(rho, warm):
        return _gap_eval(A, diag, inside, outside, x, rho, eig_tol, warm)

    mid = 0.5 * (lo + hi)
    gap_value, lam, u, primal, deriv = evaluate(mid, x)
    best = (gap_value, lam, mid, primal)
    if gap_value <= cert_tol * max(1.0, primal):
        return Certificate(
            pattern=idx, x=x, rho_min=rho_min, rho_max=rho_max, rho_star=mid,
            gap_value=gap_value, primal_value=primal, phi_upper=lam, variance=variance,
            status=STATUS_OPTIMAL,
        )

    if deriv < 0.0:
        lo = mid
    else:
        hi = mid
    for _ in range(max_iter):
        if hi - lo <= shrink_tol * width:
            break
        mid = 0.5 * (lo + hi)
        gap_value, lam, u, primal, deriv = evaluate(mid, u)
        if gap_value < best[0]:
            best = (gap_value, lam, mid, primal)
        if deriv < 0.0:
            lo = mid
        else:
            hi = mid
    gap_value, lam, rho_star, primal = best
    status = STATUS_OPTIMAL if gap_value <= cert_tol * max(1.0, primal) else STATUS_INCONCLUSIVE
    log.debug("minimize_gap |I|=%d rho*=%.6g gap=%.3e status=%s", len(idx), rho_star, gap_value, status)
    return Certificate(
        pattern=idx, x=x, rho_min=rho_min, rho_max=rho_max, rho_star=rho_star,
        gap_value=gap_value, primal_value=primal, phi_upper=lam, variance=variance,
        status=status,
    )


def phi_upper_bound(
    witness: DualWitness,
    feas_tol: float = 1e-8,
    eig_tol: float = DEFAULT_EIG_TOL,
    full_check: bool = False,
) -> float:
    """Dual objective lambda_max(sum Y_i): an upper bound on phi(witness.rho).

    Structural feasibility (positive inside values, nonnegative scales,
    outside directions orthogonal to x) is always verified; with
    ``full_check`` every per-index condition lambda_min(Y_i - B_i) >=
    -feas_tol * (1 + |B_i|_F) is checked by dense eigendecomposition.

    Raises
    ------
    InfeasibleWitness
        If a feasibility invariant is violated beyond tolerance.
    """
    w = witness
    if not (np.all(np.isfinite(w.inside_vectors)) and np.all(np.isfinite(w.outside_scales))):
        raise InfeasibleWitness("witness contains non-finite entries")
    if w.rho < 0.0:
        raise InfeasibleWitness("penalty is negative")
    if w.inside_values.size and w.inside_values.min() <= 0.0:
        raise InfeasibleWitness("an inside term has nonpositive x'B_i x")
    if w.outside_scales.size and w.outside_scales.min() < 0.0:
        raise InfeasibleWitness("an outside term has negative scale")
    if w.outside_dirs.size:
        overlap = np.abs(w.x @ w.outside_dirs)
        live = w.outside_scales > 0.0
        if live.any() and overlap[live].max() > 1e-10:
            raise InfeasibleWitness("an outside direction is not orthogonal to x")
    if full_check:
        _check_feasibility_dense(w, feas_tol)
    pair = _leading_eigenpair_safe(w.matrix(), eig_tol=eig_tol)
    return float(pair.value)


def _check_feasibility_dense(w: DualWitness, feas_tol: float) -> None:
    r = w.x.shape[0]
    eye = np.eye(r)
    for pos, i in enumerate(w.pattern):
        v = w.inside_vectors[:, pos]
        # recover a_i (a_i'x) = B_i x + rho x and (a_i'x)^2 = x'B_i x + rho
        scaled = v + w.rho * w.x
        alpha_sq = w.inside_values[pos] + w.rho
        b = np.outer(scaled, scaled) / alpha_sq - w.rho * eye
        y = np.outer(v, v) / w.inside_values[pos]
        _feasibility_one(y, b, feas_tol, i)


def _feasibility_one(y: np.ndarray, b: np.ndarray, feas_tol: float, i: int) -> None:
    diff = y - b
    lam_min = float(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0])
    norm_b = float(np.linalg.norm(b, "fro"))
    if lam_min < -feas_tol * (1.0 + norm_b):
        raise InfeasibleWitness(f"Y_{i} - B_{i} has minimum eigenvalue {lam_min:.3e}")


def witness_feasibility_slack(factor: FactorMatrix, witness: DualWitness) -> float:
    """Worst per-index slack min_i lambda_min(Y_i - B_i), for diagnostics/tests."""
    A = _require_factor(factor).values
    r = factor.r
    eye = np.eye(r)
    worst = np.inf
    for i in range(factor.n):
        a = A[:, i]
        b = np.outer(a, a) - witness.rho * eye
        y = witness.term_matrix(i)
        diff = y - b
        lam_min = float(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0])
        worst = min(worst, lam_min / (1.0 + float(np.linalg.norm(b, "fro"))))
    return worst


def baseline_upper_bound(factor: FactorMatrix, rho: float, eig_tol: float = DEFAULT_EIG_TOL) -> float:
    """Pattern-free upper bound on phi(rho), valid for every rho >= 0.

    Uses the always-feasible witness Y_i = (a_i'a_i - rho)_+ on the unit
    direction of a_i; evaluates to lambda_max(Sigma) at rho = 0 and to 0
    once rho clears every diagonal entry.
    """
    factor = _require_factor(factor)
    if rho < 0.0:
        raise ValueError("penalty must be nonnegative")
    s = factor.column_sq_norms()
    w = s - rho
    keep = (w > 0.0) & (s > 0.0)
    if not keep.any():
        return 0.0
    c = factor.values[:, keep] * np.sqrt(w[keep] / s[keep])
    pair = _leading_eigenpair_safe(c @ c.T, eig_tol=eig_tol)
    return float(max(pair.value, 0.0))


def card_bound(bounds, k: int) -> float:
    """Upper bound on the cardinality-k constrained maximum: min phi_ub + rho k.

    ``bounds`` is any iterable of (rho, phi_ub) pairs, each a valid
    penalized upper bound.  Raises EmptySet when no pairs are given.
    """
    best = np.inf
    count = 0
    for rho, phi_ub in bounds:
        if rho < 0.0:
            raise ValueError(f"bound pool contains a negative penalty {rho}")
        count += 1
        val = float(phi_ub) + float(rho) * k
        if val < best:
            best = val
    if count == 0:
        raise EmptySet("bound pool is empty")
    return best


def certify_pattern(matrix, pattern, **kwargs) -> Certificate:
    """minimize_gap on a symmetric matrix or factor (convenience wrapper)."""
    return minimize_gap(as_factor(matrix), pattern, **kwargs)


def certify_path(factor: FactorMatrix, path, jobs: int = 1, **kwargs) -> list[Certificate]:
    """Certificates for every point of a path, optionally in parallel."""
    factor = _require_factor(factor)
    patterns = [pt.indices for pt in path.points]
    if jobs > 1 and len(patterns) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda p: minimize_gap(factor, p, **kwargs), patterns))
    return [minimize_gap(factor, p, **kwargs) for p in patterns]


def _witness_bound_at(factor, cert: Certificate, rho: float, eig_tol: float) -> float:
    A = factor.values
    diag = factor.column_sq_norms()
    inside = np.asarray(cert.pattern, dtype=int)
    outside = np.setdiff1d(np.arange(factor.n), inside, assume_unique=True)
    _, _, vin, vals, scales, dirs = _witness_parts(A, diag, inside, outside, cert.x, rho)
    m = _assemble(vin, vals, dirs, scales)
    return float(_leading_eigenpair_safe(m, eig_tol=eig_tol).value)


def build_bound_pool(
    matrix,
    path=None,
    certificates: list[Certificate] | None = None,
    grid_size: int = 50,
    extra_rho=(),
    jobs: int = 1,
    eig_tol: float = DEFAULT_EIG_TOL,
    cert_tol: float = DEFAULT_CERT_TOL,
) -> list[tuple[float, float]]:
    """Pool of (rho, phi_upper) pairs for card_bound.

    Penalty values come from path gains, certificate minimizers and
    interval midpoints, topped up to ``grid_size`` with a geometric
    grid.  Each pool value is the best of the pattern-free baseline and
    the witness bounds of every certificate whose interval strictly
    contains that penalty; all are valid upper bounds on phi.
    """
    factor = as_factor(matrix)
    if path is None:
        path = path_mod.path_greedy_approx(factor, eig_tol=eig_tol)
    if certificates is None:
        certificates = certify_path(factor, path, jobs=jobs, eig_tol=eig_tol, cert_tol=cert_tol)

    smax = float(factor.column_sq_norms().max())
    if smax <= 0.0:
        return [(0.0, 0.0)]
    cands: list[float] = [1e-6 * smax]
    for pt in path.points:
        if pt.gain is not None and pt.gain > 0.0:
            cands.append(float(pt.gain))
    for cert in certificates:
        if cert.rho_star is not None:
            cands.append(float(cert.rho_star))
        if cert.rho_max > cert.rho_min:
            cands.append(0.5 * (cert.rho_min + cert.rho_max))
    cands.extend(float(r) for r in extra_rho)
    grid = np.unique([r for r in cands if 0.0 < r < np.inf])
    if grid.size > grid_size:
        pick = np.unique(np.linspace(0, grid.size - 1, grid_size).round().astype(int))
        grid = grid[pick]
    elif grid.size < grid_size:
        filler = np.geomspace(1e-6 * smax, smax * (1.0 - 1e-9), grid_size - grid.size)
        grid = np.unique(np.concatenate([grid, filler]))

    intervals = []
    for cert in certificates:
        width = cert.rho_max - cert.rho_min
        if width > 0.0:
            d = max(1e-12, 1e-9 * width)
            intervals.append((cert.rho_min + d, cert.rho_max - d, cert))

    def pool_value(rho: float) -> tuple[float, float]:
        best = baseline_upper_bound(factor, rho, eig_tol=eig_tol)
        for lo, hi, cert in intervals:
            if lo < rho < hi:
                best = min(best, _witness_bound_at(factor, cert, rho, eig_tol))
        return (float(rho), best)

    if jobs > 1 and grid.size > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(pool_value, grid))
    else:
        points = [pool_value(r) for r in grid]

    for cert in certificates:
        if cert.rho_star is not None and cert.phi_upper is not None:
            points.append((float(cert.rho_star), float(cert.phi_upper)))
    points.sort(key=lambda p: (p[0], p[1]))
    return points


def expansion_residual(B, x: np.ndarray, Y, t: float) -> float:
    """Gap between the trace-plus objective and its first-order expansion.

    Evaluates F(X) = trace_plus(X^{1/2} B X^{1/2}) at
    X = (1 - t) xx' + t Y and subtracts the branch prediction:

    * x'Bx > 0:  x'Bx + (t / x'Bx) * (x'BYBx - (x'Bx)^2)
    * x'Bx < 0:  t * trace_plus(Y^{1/2} (B - Bxx'B / x'Bx) Y^{1/2})

    Intended for order-of-remainder property tests; the remainder decays
    like t^{3/2} when B has a single positive eigenvalue direction.

    Raises
    ------
    DegeneratePivot
        If |x'Bx| < 1e-10.
    """
    BV = _sym_values(B)
    x = np.asarray(x, dtype=float)
    YV = _sym_values(Y)
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie strictly between 0 and 1")
    nx = float(np.linalg.norm(x))
    if abs(nx - 1.0) > 1e-8:
        raise ValueError("x must be a unit vector")
    tr = float(np.trace(YV))
    if abs(tr - 1.0) > 1e-6 * (1.0 + abs(tr)):
        raise ValueError("Y must have unit trace")
    pivot = float(x @ BV @ x)
    if abs(pivot) < 1e-10:
        raise DegeneratePivot(f"|x'Bx| = {abs(pivot):.3e} is below 1e-10")

    X = (1.0 - t) * np.outer(x, x) + t * YV
    root = _psd_root(X)
    value = trace_plus(root @ BV @ root)

    bx = BV @ x
    if pivot > 0.0:
        predicted = pivot + (t / pivot) * (float(bx @ YV @ bx) - pivot**2)
    else:
        yroot = _psd_root(YV)
        compressed = BV - np.outer(bx, bx) / pivot
        predicted = t * trace_plus(yroot @ compressed @ yroot)
    return float(abs(value - predicted))


def _psd_root(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T
