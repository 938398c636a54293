"""Sparse eigenvalue paths, dual certificates and downstream bounds.

The package computes variable-selection paths for sparse PCA style
problems (sort, threshold, approximate and full greedy), certifies
candidate patterns through a penalized dual witness, aggregates the
resulting upper bounds, and applies them to subset selection and
restricted-isometry constants.  Small instances can be checked against
exhaustive oracles.
"""

from .errors import (
    BudgetExceeded,
    DegeneratePivot,
    EmptyPattern,
    EmptySet,
    InconsistentRho,
    InfeasibleWitness,
    NoConvergence,
    NotPositiveSemidefinite,
    NotSquare,
    ParseError,
    SparseEigError,
)
from .linalg import (
    EigenPair,
    FactorMatrix,
    SymMatrix,
    as_factor,
    leading_eigenpair,
    normalize_pattern,
    pattern_eigvec,
    square_root,
    trace_plus,
)
from .path import (
    Path,
    PathPoint,
    path_greedy_approx,
    path_greedy_full,
    path_sort,
    path_threshold,
    preprocess,
    prune_variables,
)
from .certify import (
    Certificate,
    DualWitness,
    baseline_upper_bound,
    build_bound_pool,
    build_dual,
    card_bound,
    certify_path,
    certify_pattern,
    consistency_interval,
    expansion_residual,
    gap,
    minimize_gap,
    phi_upper_bound,
    witness_feasibility_slack,
)
from .apps import (
    RipReport,
    SubsetCertificate,
    SubsetProblem,
    greedy_subset,
    ls_error,
    rip_bounds,
    subset_certify,
)
from .oracle import (
    OracleBudget,
    PatternTable,
    exact_delta,
    exact_phi,
    exact_sparse_eigmax,
    exact_subset,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "Certificate",
    "DegeneratePivot",
    "DualWitness",
    "EigenPair",
    "EmptyPattern",
    "EmptySet",
    "FactorMatrix",
    "InconsistentRho",
    "InfeasibleWitness",
    "NoConvergence",
    "NotPositiveSemidefinite",
    "NotSquare",
    "OracleBudget",
    "ParseError",
    "Path",
    "PathPoint",
    "PatternTable",
    "RipReport",
    "SparseEigError",
    "SubsetCertificate",
    "SubsetProblem",
    "SymMatrix",
    "as_factor",
    "baseline_upper_bound",
    "build_bound_pool",
    "build_dual",
    "card_bound",
    "certify_path",
    "certify_pattern",
    "consistency_interval",
    "exact_delta",
    "exact_phi",
    "exact_sparse_eigmax",
    "exact_subset",
    "expansion_residual",
    "gap",
    "greedy_subset",
    "leading_eigenpair",
    "ls_error",
    "minimize_gap",
    "normalize_pattern",
    "path_greedy_approx",
    "path_greedy_full",
    "path_sort",
    "path_threshold",
    "pattern_eigvec",
    "phi_upper_bound",
    "preprocess",
    "prune_variables",
    "rip_bounds",
    "square_root",
    "subset_certify",
    "trace_plus",
    "witness_feasibility_slack",
    "__version__",
]
