"""Module defining custom exceptions for besov-rates."""

from essentials.exceptions import InvalidArgument, InvalidOperation


class ConfigurationError(InvalidArgument):
    """Exception raised when grid, scheme or experiment parameters are not admissible."""

    def __init__(self, message="Invalid configuration") -> None:
        super().__init__(message)


class CouplingError(InvalidArgument):
    """Exception raised when two resolution levels are not nested."""

    def __init__(self, message="Resolution levels are not nested") -> None:
        super().__init__(message)


class ShapeError(InvalidArgument):
    """Exception raised when an array does not match the grid it is used with."""

    def __init__(self, message="Array shape does not match the grid") -> None:
        super().__init__(message)


class FrequencyRangeError(InvalidArgument):
    """Exception raised when a Fourier mode index lies outside the admissible range."""

    def __init__(self, message="Frequency out of range") -> None:
        super().__init__(message)


class OffGridTimeError(InvalidArgument):
    """Exception raised when a time is not a whole number of steps of the time grid."""

    def __init__(self, message="Time is not on the time grid") -> None:
        super().__init__(message)


class BlowUpError(InvalidOperation):
    """Exception raised when the explicit scheme produces a non-finite value."""

    def __init__(self, t: float, x: float, value: float) -> None:
        self.t = t
        self.x = x
        self.value = value
        super().__init__(f"Scheme blew up at t={t!r}, x={x!r} (value {value!r})")


class OmegaViolation(InvalidOperation):
    """Exception raised when the a-priori event fails on a path and the policy is to abort."""

    def __init__(self, seed: int | None, n: int) -> None:
        self.seed = seed
        self.n = n
        super().__init__(f"A-priori bound event failed for seed {seed} at n={n}")
