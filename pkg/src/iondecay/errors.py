"""Exception hierarchy shared by the simulator modules."""


class IonDecayError(Exception):
    """Base class for all errors raised by :mod:`iondecay`."""


class NumericError(IonDecayError):
    """A numerical precondition or run-time check failed."""


class TruncationLeakage(NumericError):
    """Population at the top Fock level would leave the truncated space."""


class TailLeakage(NumericError):
    """The oracle state reached the top of the Fock truncation during a run."""


class TruncationTooSmall(NumericError):
    """Hierarchy truncation cannot represent the requested initial state."""


class StepSizeUnderflow(NumericError):
    """The adaptive integrator needed a step below its floor."""


class DegenerateDispersion(NumericError):
    """The Gaussian P function has collapsed to a delta function."""


class DomainError(IonDecayError, ValueError):
    """Argument outside the domain of a function."""


class ConfigError(IonDecayError):
    """Scenario configuration is missing a key or holds an invalid value."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
