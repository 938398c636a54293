"""Exhaustive reference solvers, used to validate paths, bounds and certificates.

Everything here enumerates index sets outright, so dimensions must stay
small; a budget guards against accidental blow-ups.  Enumeration order
is cardinality-ascending, lexicographic within a cardinality, and only
strict improvements replace the incumbent, which pins the reported
argmax deterministically (smallest cardinality first, then
lexicographically smallest pattern).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .linalg import FactorMatrix, _sym_values

__all__ = [
    "OracleBudget",
    "PatternTable",
    "exact_sparse_eigmax",
    "exact_phi",
    "exact_subset",
    "exact_delta",
]

log = logging.getLogger("sparseig.oracle")

_CHUNK = 4096


@dataclass(frozen=True)
class OracleBudget:
    """Cap on the number of index sets an oracle call may enumerate."""

    max_enumerations: int = 2_000_000

    def check(self, needed: int) -> None:
        if needed > self.max_enumerations:
            raise BudgetExceeded(
                f"enumeration needs {needed} subsets, budget allows {self.max_enumerations}"
            )


def _as_square(matrix) -> np.ndarray:
    if isinstance(matrix, FactorMatrix):
        return matrix.gram()
    return _sym_values(matrix)


def _count_subsets(n: int, k_max: int) -> int:
    return sum(math.comb(n, c) for c in range(1, k_max + 1))


def _eigmax_by_cardinality(values: np.ndarray, card: int):
    """Yield (patterns, top eigenvalues) for all subsets of one cardinality, chunked."""
    n = values.shape[0]
    combos = itertools.combinations(range(n), card)
    while True:
        block = list(itertools.islice(combos, _CHUNK))
        if not block:
            return
        idx = np.asarray(block, dtype=int)
        sub = values[idx[:, :, None], idx[:, None, :]]
        top = np.linalg.eigvalsh(sub)[:, -1]
        yield idx, top


class PatternTable:
    """All principal-submatrix top eigenvalues of one matrix, by cardinality.

    Shared scaffolding for exact_sparse_eigmax and exact_phi so repeated
    queries on the same instance enumerate only once.
    """

    def __init__(self, matrix, max_card: int | None = None, budget: OracleBudget | None = None):
        values = _as_square(matrix)
        self.n = values.shape[0]
        self.max_card = self.n if max_card is None else min(int(max_card), self.n)
        budget = budget or OracleBudget()
        budget.check(_count_subsets(self.n, self.max_card))
        self._patterns: dict[int, np.ndarray] = {}
        self._eigmax: dict[int, np.ndarray] = {}
        for card in range(1, self.max_card + 1):
            pats, tops = [], []
            for idx, top in _eigmax_by_cardinality(values, card):
                pats.append(idx)
                tops.append(top)
            self._patterns[card] = np.concatenate(pats, axis=0)
            self._eigmax[card] = np.concatenate(tops, axis=0)

    def sparse_eigmax(self, k: int) -> tuple[float, tuple[int, ...]]:
        """Exact max of lambda_max over patterns of cardinality <= k."""
        if k < 1 or k > self.max_card:
            raise ValueError(f"cardinality {k} outside the tabulated range 1..{self.max_card}")
        best = -np.inf
        best_pattern: tuple[int, ...] = ()
        for card in range(1, k + 1):
            tops = self._eigmax[card]
            j = int(np.argmax(tops))
            if tops[j] > best:
                best = float(tops[j])
                best_pattern = tuple(int(i) for i in self._patterns[card][j])
        return best, best_pattern

    def phi(self, rho: float) -> tuple[float, tuple[int, ...]]:
        """Exact penalized value max(0, max_I lambda_max(Sigma_II) - rho |I|).

        The empty pattern contributes 0, so the value is never negative;
        an empty argmax means the zero vector wins.
        """
        if rho < 0.0:
            raise ValueError("penalty must be nonnegative")
        if self.max_card != self.n:
            raise ValueError("phi needs the full table (max_card = n)")
        best = 0.0
        best_pattern: tuple[int, ...] = ()
        for card in range(1, self.n + 1):
            vals = self._eigmax[card] - rho * card
            j = int(np.argmax(vals))
            if vals[j] > best:
                best = float(vals[j])
                best_pattern = tuple(int(i) for i in self._patterns[card][j])
        return best, best_pattern


def exact_sparse_eigmax(
    matrix, k: int, budget: OracleBudget | None = None, table: PatternTable | None = None
) -> tuple[float, tuple[int, ...]]:
    """Exhaustive cardinality-constrained maximum eigenvalue.

    Returns ``(value, pattern)`` with the deterministic tie-break
    described in the module docstring.
    """
    if table is None:
        table = PatternTable(matrix, max_card=k, budget=budget)
    return table.sparse_eigmax(k)


def exact_phi(
    matrix, rho: float, budget: OracleBudget | None = None, table: PatternTable | None = None
) -> tuple[float, tuple[int, ...]]:
    """Exhaustive penalized maximum, enumerating all nonempty patterns."""
    if table is None:
        table = PatternTable(matrix, budget=budget)
    return table.phi(rho)


def exact_subset(
    X, y, k: int, budget: OracleBudget | None = None
) -> tuple[float, tuple[int, ...]]:
    """Best least-squares error over supports of cardinality <= k.

    Returns ``(error, pattern)``; the empty support (error |y|^2) is the
    starting incumbent.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be 2-d and y 1-d with matching row count")
    n = X.shape[1]
    k = min(int(k), n)
    budget = budget or OracleBudget()
    budget.check(_count_subsets(n, k))
    best = float(y @ y)
    best_pattern: tuple[int, ...] = ()
    for card in range(1, k + 1):
        for combo in itertools.combinations(range(n), card):
            cols = X[:, combo]
            w, *_ = np.linalg.lstsq(cols, y, rcond=None)
            resid = y - cols @ w
            err = float(resid @ resid)
            if err < best:
                best = err
                best_pattern = combo
    return best, best_pattern


def exact_delta(F, S: int, budget: OracleBudget | None = None) -> float:
    """Exhaustive restricted-isometry constant of order S for columns of F.

    max over column subsets of size <= S of max(lambda_max - 1,
    1 - lambda_min) of the subset Gram matrix.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError("F must be a 2-d array")
    gram = F.T @ F
    gram = 0.5 * (gram + gram.T)
    m = gram.shape[0]
    S = min(int(S), m)
    if S < 1:
        raise ValueError("S must be at least 1")
    budget = budget or OracleBudget()
    budget.check(_count_subsets(m, S))
    worst = 0.0
    for card in range(1, S + 1):
        combos = itertools.combinations(range(m), card)
        while True:
            block = list(itertools.islice(combos, _CHUNK))
            if not block:
                break
            idx = np.asarray(block, dtype=int)
            sub = gram[idx[:, :, None], idx[:, None, :]]
            w = np.linalg.eigvalsh(sub)
            worst = max(worst, float((w[:, -1] - 1.0).max()), float((1.0 - w[:, 0]).max()))
    return worst
