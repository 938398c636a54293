"""Exception hierarchy shared across the package."""


class SparseEigError(Exception):
    """Base class for every error raised by this package."""


class NotPositiveSemidefinite(SparseEigError):
    """Matrix has an eigenvalue below the allowed negative slack."""


class NoConvergence(SparseEigError):
    """Iterative eigenvalue solver hit its iteration cap."""


class EmptyPattern(SparseEigError):
    """An index set that must be nonempty was empty."""


class InconsistentRho(SparseEigError):
    """Penalty value lies outside the open consistency interval."""


class InfeasibleWitness(SparseEigError):
    """Dual witness violates a feasibility invariant beyond tolerance."""


class DegeneratePivot(SparseEigError):
    """Pivot value x'Bx is too close to zero to expand around."""


class BudgetExceeded(SparseEigError):
    """Exhaustive enumeration would exceed the configured budget."""


class EmptySet(SparseEigError):
    """A collection that must be nonempty was empty."""


class ParseError(SparseEigError):
    """Input file failed to parse.  Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotSquare(SparseEigError):
    """Gram-mode input is not a square matrix."""
