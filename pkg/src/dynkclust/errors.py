"""Exception types raised by the clustering engine."""


class DynKClustError(Exception):
    """Base class for every error raised by this package."""


class DuplicateId(DynKClustError):
    pass


class NonpositiveWeight(DynKClustError):
    pass


class UnknownMatrixId(DynKClustError):
    pass


class UnknownId(DynKClustError, KeyError):
    pass


class InvalidMetric(DynKClustError, ValueError):
    """Distance input violates symmetry, nonnegativity, identity or the triangle inequality."""


class EmptySpace(DynKClustError):
    pass


class DegenerateSpace(DynKClustError):
    """Fewer than two live points, so extrema of pairwise distances are undefined."""


class EmptyCenters(DynKClustError):
    pass


class TooLarge(DynKClustError):
    """Instance exceeds the enumeration budget of a brute-force oracle."""


class AlreadyPresent(DynKClustError):
    pass


class NotPresent(DynKClustError):
    pass


class NotEnoughCandidates(DynKClustError):
    pass


class EmptyCandidates(NotEnoughCandidates):
    pass


class CandidateMismatch(DynKClustError):
    pass


class MembershipViolation(DynKClustError):
    pass


class NonpositiveLambda(DynKClustError, ValueError):
    pass


class KOutOfRange(DynKClustError, ValueError):
    pass


class GridSearchFailed(DynKClustError):
    pass


class ParseError(DynKClustError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantViolation(DynKClustError, AssertionError):
    pass
