"""Exception hierarchy shared by every module of the package."""


class PMAError(Exception):
    """Base class for all errors raised by pma_radial."""


class DimensionOutOfRange(PMAError, ValueError):
    pass


class DerivativeSingular(PMAError, ValueError):
    pass


class DomainExceeded(PMAError, ValueError):
    pass


class CoverageMismatch(PMAError, ValueError):
    pass


class StepSizeUnderflow(PMAError, RuntimeError):
    pass


class CertificationFailure(PMAError, RuntimeError):
    pass


class ExponentOutOfRange(PMAError, ValueError):
    pass


class InsufficientRange(PMAError, ValueError):
    pass


class RateUndefined(PMAError, ValueError):
    pass


class TooFewOscillations(PMAError, ValueError):
    pass
