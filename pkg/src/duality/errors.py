"""Exception hierarchy."""


class DualityError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(DualityError):
    """An enumeration or matrix dimension would exceed the configured cap."""


class NotHermitian(DualityError, ValueError):
    pass


class NotPSD(DualityError, ValueError):
    pass


class NotUnitary(DualityError, ValueError):
    pass


class NotNormalized(DualityError, ValueError):
    pass


class PauliViolation(DualityError, ValueError):
    pass


class NormZero(DualityError, ValueError):
    """The (anti)symmetrized state vanishes identically."""


class NonPhysical(DualityError, ValueError):
    """Outcome probabilities do not sum to one."""


class Degenerate(DualityError, ValueError):
    """A measure normalized by 1/(R-1) is undefined because only one labeling exists."""


class LabelMismatch(DualityError, ValueError):
    pass


class StateValidationError(DualityError, ValueError):
    """An internal state violates normalization, exchange symmetry or Pauli exclusion.

    ``violations`` holds the structured report entries.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvariantViolation(DualityError):
    """A complementarity relation or bound failed beyond tolerance."""


class ConfigError(DualityError, ValueError):
    pass
