"""Exception types raised across the package."""


class JetIgniteError(Exception):
    """Base class for all package errors."""


class ConfigError(JetIgniteError):
    """Malformed model descriptor or run configuration."""


class ModelValidationError(JetIgniteError):
    """A nonlinearity or flow profile violates its structural assumptions."""


class DivergentIntegral(ModelValidationError):
    pass


class ProfileDegenerate(ModelValidationError):
    pass


class OutOfRange(JetIgniteError):
    pass


class ToleranceNotMet(JetIgniteError):
    pass


class NonFiniteSample(JetIgniteError):
    pass


class NoSignChange(JetIgniteError):
    pass


class SingularPivot(JetIgniteError):
    pass


class ResolutionTooCoarse(JetIgniteError):
    pass


class GridMismatch(JetIgniteError):
    pass


class NoConvergence(JetIgniteError):
    pass


class SeedBracketFailure(JetIgniteError):
    pass


class ChordBoundDegenerate(JetIgniteError):
    pass


class NoFeasibleBeta(JetIgniteError):
    pass


class NoRoot(JetIgniteError):
    pass


class DerivativeBounded(JetIgniteError):
    pass
