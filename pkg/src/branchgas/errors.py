"""Exception hierarchy for branchgas."""


class BranchGasError(Exception):
    """Base class for all branchgas errors."""


class DivisionByZeroError(BranchGasError, ZeroDivisionError):
    """Division by the zero polynomial or rational function."""


class OrderMismatchError(BranchGasError, ValueError):
    """Binary series operation on series of different truncation orders."""


class PoleProximityError(BranchGasError, ArithmeticError):
    """Numeric evaluation too close to a denominator zero."""


class DegenerateDenominatorError(BranchGasError, ZeroDivisionError):
    """The recursion denominator is identically zero."""


class LawError(BranchGasError, ValueError):
    """Invalid offspring law."""


class ProbabilitySumNotOneError(LawError):
    pass


class ZeroChildrenForbiddenError(LawError):
    pass


class DegenerateLawError(LawError):
    pass


class DuplicateSupportError(LawError):
    pass


class InvalidProbabilityError(LawError):
    pass


class NegativeBetaUnsupportedError(BranchGasError, ValueError):
    """The simulator's enclosure contract requires beta >= 0."""


class InvalidPathError(BranchGasError, ValueError):
    """A root-to-frontier path does not exist in the sampled tree."""


class NoConvergenceError(BranchGasError, RuntimeError):
    """Fixed-point iteration failed to stabilize within the iteration cap."""


class UnsupportedExactCostError(BranchGasError, ValueError):
    """Energy cost sequence has no exact monomial representation."""
