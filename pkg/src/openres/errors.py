"""Exception hierarchy shared by all modules."""


class OpenResError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(OpenResError, ValueError):
    pass


class NonPositiveFrequency(OpenResError, ValueError):
    pass


class TooFewModes(OpenResError, ValueError):
    pass


class DimensionMismatch(OpenResError, ValueError):
    pass


class NumericalError(OpenResError, ArithmeticError):
    """Numerical breakdown of an otherwise valid computation."""


class NearDefective(NumericalError):
    """Eigenvector matrix is too ill-conditioned (close to an exceptional point).

    ``pair`` holds the two closest eigenvalues, ``condition`` the condition
    number that tripped the check.
    """

    def __init__(self, message, pair=None, condition=None):
        super().__init__(message)
        self.pair = pair
        self.condition = condition


class DegenerateVectors(NumericalError):
    pass


class UnstableDynamics(NumericalError):
    pass


class MarginallyStable(NumericalError):
    pass


class ZeroModeMissing(NumericalError):
    pass


class NearDegenerateLasingMode(NumericalError):
    pass


class NonPositiveStep(OpenResError, ValueError):
    pass


class NegativeIntensity(OpenResError, ValueError):
    pass


class ZeroIntensity(OpenResError, ValueError):
    pass


class BelowThreshold(OpenResError):
    """Pump does not exceed the lasing threshold."""

    def __init__(self, message, pump=None, threshold=None):
        super().__init__(message)
        self.pump = pump
        self.threshold = threshold


class ConfigError(OpenResError, ValueError):
    """Configuration rejected; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))
