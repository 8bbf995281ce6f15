"""Exception and warning classes raised across the package."""


class AnisoHardyError(ValueError):
    """Base class for every error raised by anisohardy."""


class InvalidParameters(AnisoHardyError):
    pass


class SingularPoint(AnisoHardyError):
    pass


class NoAnalyticDual(AnisoHardyError):
    pass


class UnsupportedDimension(AnisoHardyError):
    pass


class NonintegrableSingularity(AnisoHardyError):
    pass


class InvalidInterval(AnisoHardyError):
    pass


class InvalidGrading(AnisoHardyError):
    pass


class SupportViolation(AnisoHardyError):
    pass


class ZeroDenominator(AnisoHardyError):
    pass


class AdmissibilityViolation(AnisoHardyError):
    pass


class InadmissibleAlpha(AnisoHardyError):
    pass


class GeometryViolation(AnisoHardyError):
    pass


class OutsideDomain(AnisoHardyError):
    pass


class UnboundedDomain(AnisoHardyError):
    pass


class DegenerateGradient(AnisoHardyError):
    pass


class DegenerateMap(AnisoHardyError):
    pass


class BoundaryViolation(AnisoHardyError):
    pass


class DivergentIntegral(AnisoHardyError):
    pass


class SweepDivergence(AnisoHardyError):
    pass


class ConfigError(AnisoHardyError):
    pass


class FinslerWarning(UserWarning):
    """Spot-check failures that do not invalidate a computation outright."""


class RidgeProximityWarning(FinslerWarning):
    pass
