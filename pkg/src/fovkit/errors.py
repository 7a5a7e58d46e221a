"""Exception hierarchy for fovkit."""


class FovkitError(Exception):
    """Base class for all fovkit errors."""


class DimensionMismatch(FovkitError, ValueError):
    pass


class InvalidMatrix(FovkitError, ValueError):
    pass


class NonConvergence(FovkitError, ArithmeticError):
    """Raised when an iterative eigensolver fails to converge."""


class NonOrthonormalBasis(FovkitError, ValueError):
    pass


class EmptyInput(FovkitError, ValueError):
    pass


class PointNotOnBoundary(FovkitError, ValueError):
    pass


class PointNotOnSupportLine(FovkitError, ValueError):
    pass


class DegenerateCut(FovkitError):
    """The target is too close to the boundary for a line cut through it."""


class CollinearGenerators(FovkitError):
    pass


class TargetOutsideRange(FovkitError, ValueError):
    pass


class RankDeficit(FovkitError):
    """A fiber basis could not be completed within the attempt budget.

    ``achieved`` holds the rank that was reached.
    """

    def __init__(self, msg, achieved, sample=None):
        super().__init__(msg)
        self.achieved = achieved
        self.sample = sample


class WitnessNotFound(FovkitError):
    pass


class ArcNotOnBoundary(FovkitError, ValueError):
    pass


class NoReduction(FovkitError):
    pass


class UnknownExample(FovkitError, KeyError):
    pass


class InvalidParameters(FovkitError, ValueError):
    pass
