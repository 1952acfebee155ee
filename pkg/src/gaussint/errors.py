"""Exception types raised by the numerical routines."""


class GaussIntError(Exception):
    """Base class for all errors raised by :mod:`gaussint`."""


class UnphysicalState(GaussIntError, ValueError):
    """Covariance matrix violates symmetry, positivity or the uncertainty bound."""


class SingularQuotient(GaussIntError):
    """SLD quotient has a vanishing denominator with a non-vanishing numerator."""


class VanishingSlope(GaussIntError):
    """Mean of the observable is stationary at the working point."""


class PrecisionLoss(GaussIntError):
    """A result is smaller than the rounding noise of the terms it was assembled from."""


class InfeasibleParams(GaussIntError, ValueError):
    """No non-negative physical amplitudes reproduce the requested energy parameters."""


class IndeterminateLimit(GaussIntError):
    """A closed form is 0/0 at the requested point."""


class DivergentSensitivity(GaussIntError):
    """A closed form has a vanishing denominator and finite numerator."""


class AllInfeasible(GaussIntError):
    """Every grid point of a search box returned an infinite objective."""


class InsufficientPoints(GaussIntError, ValueError):
    """Too few sweep points inside the fitting window."""


class ExpansionBreakdown(UserWarning):
    """Leading-order asymptotic expansion vanishes and carries no information."""
