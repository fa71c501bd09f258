"""Exception hierarchy. Every error names the violated precondition."""


class CarlemanLabError(ValueError):
    """Base class for all library errors."""


class InadmissibleRegime(CarlemanLabError):
    def __init__(self, message: str, bound: str = ""):
        super().__init__(message)
        self.bound = bound


class EpsilonOutOfRange(CarlemanLabError):
    pass


class DomainError(CarlemanLabError):
    pass


class NonfiniteValue(CarlemanLabError):
    pass


class RadiusOutOfGrid(CarlemanLabError):
    pass


class DegreeOverflow(CarlemanLabError):
    pass


class KernelOverflow(CarlemanLabError):
    def __init__(self, message: str, k: int = -1, s: float = float("nan"), t: float = float("nan")):
        super().__init__(message)
        self.k, self.s, self.t = k, s, t


class UBelowFloor(CarlemanLabError):
    pass


class NotInSpace(CarlemanLabError):
    pass


class TauBelowThreshold(CarlemanLabError):
    pass


class CertificateMissing(CarlemanLabError):
    pass


class OrderingViolation(CarlemanLabError):
    pass


class DegenerateData(CarlemanLabError):
    pass


class DomainCoverage(CarlemanLabError):
    pass


class RTooSmall(CarlemanLabError):
    pass


class EmptyCorpus(CarlemanLabError):
    pass


class ChainGeometryError(CarlemanLabError):
    pass


class RangeViolation(CarlemanLabError):
    pass
