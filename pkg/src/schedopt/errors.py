"""Exception hierarchy shared across the package."""


class SchedOptError(Exception):
    """Base class for all schedopt errors."""


class DimensionMismatch(SchedOptError):
    pass


class NotSymmetric(SchedOptError):
    pass


class NonConvergence(SchedOptError):
    pass


class SingularOrIndefinite(SchedOptError):
    pass


class InvalidPair(SchedOptError):
    pass


class POutOfRange(SchedOptError):
    pass


class InvalidArgs(SchedOptError):
    pass


class RateOutOfRange(SchedOptError):
    pass


class TooLarge(SchedOptError):
    pass


class BetaOverflow(SchedOptError):
    pass


class NoFeasibleGammaFound(SchedOptError):
    pass


class InfeasibleGamma(SchedOptError):
    pass


class InvalidHorizon(SchedOptError):
    pass


class SingularIterate(SchedOptError):
    pass


class FirstBitNotOne(SchedOptError):
    pass


class AllZeros(SchedOptError):
    pass


# Errors reported as exit code 2 (numerical failure) by the CLI; everything
# else is treated as a usage/validation problem.
NUMERICAL_ERRORS = (
    NonConvergence,
    SingularOrIndefinite,
    BetaOverflow,
    NoFeasibleGammaFound,
    InfeasibleGamma,
    SingularIterate,
)
