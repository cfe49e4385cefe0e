"""branchgas: partition functions of log-repelling particle gases living
on the boundary of random branching trees.

Exact layer: sparse multivariate polynomials and rational functions in the
decay variables q**(-beta), truncated fugacity series, the mean partition
recursion, grand-canonical identities and quadratic recurrences.  Random
layer: reproducible Galton-Watson sampling, certified per-tree enclosures
and a Monte Carlo estimator cross-checking the exact values.
"""

__version__ = "0.1.0"

from .errors import (
    BranchGasError,
    DegenerateDenominatorError,
    DegenerateLawError,
    DivisionByZeroError,
    DuplicateSupportError,
    InvalidPathError,
    InvalidProbabilityError,
    LawError,
    NegativeBetaUnsupportedError,
    NoConvergenceError,
    OrderMismatchError,
    PoleProximityError,
    ProbabilitySumNotOneError,
    UnsupportedExactCostError,
    ZeroChildrenForbiddenError,
)
from .poly import MultiPoly, binom2, parse_rational, rational_point
from .ratfun import FactoredFraction, RationalFn, fsum
from .series import TruncSeries
from .law import BranchingLaw, regular, two_point
from .recursion import (
    MeanPartitionTable,
    denominator_negative_root,
    factorial_reference,
    mean_partition,
    mean_partition_at_zero,
    mean_partition_exact_at,
    mean_partition_numeric,
    mean_partition_numeric_direct,
    mean_partition_table,
)
from .grand import (
    GrandPartitionSeries,
    branch_operator,
    fixed_point_iterate,
    fixed_point_operator_step,
    grand_partition,
    verify_functional_equation,
    weighted_grand_partition,
    zero_temp_grand_partition,
)
from .quadratic import (
    EnergyCosts,
    GluedSystem,
    occupation_conjecture_report,
    occupation_expectation,
    occupation_expectation_exact,
    regular_glued_system,
    verify_glued_recurrence,
    verify_power_identity,
    verify_regular_quadratic,
)
from .report import Report
from .simulate import (
    DEFAULT_SEED,
    Enclosure,
    McEstimate,
    SampledTree,
    active_backend,
    choose_depth,
    mc_mean_z,
    sample_leaf_paths,
    sample_tree,
    tree_distance,
    tree_partition,
    verify_ultrametric,
)

__all__ = [name for name in dir() if not name.startswith("_")]
