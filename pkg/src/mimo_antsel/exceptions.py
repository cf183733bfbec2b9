"""Exception classes for channel handling, rate computation and selection."""


class AntselError(Exception):
    """Base exception for all library errors."""

    exit_code: int = 1


class ConfigError(AntselError):
    """Raised when a scenario or settings value is invalid."""

    exit_code = 2

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DimensionError(ConfigError):
    """Raised when a tensor or mask dimension is zero or inconsistent."""

    pass


class PreconditionError(AntselError):
    """Raised when an operation is called outside its documented preconditions."""

    exit_code = 2


class CombinatorialLimitError(PreconditionError):
    """Raised when exhaustive search would enumerate too many subsets."""

    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"Exhaustive search needs {count} subsets, limit is {limit}")


class ChannelFormatError(AntselError):
    """Raised when a CTF1 channel file cannot be parsed."""

    exit_code = 3

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class ChannelDimensionError(ChannelFormatError, DimensionError):
    """Raised when a CTF1 header declares a zero dimension.

    A format error first: it exits with the channel-format code.
    """

    def __init__(self, field: str, offset: int):
        super().__init__(f"{field}: header dimension is zero", offset)
        self.field = field


class NumericError(AntselError):
    """Raised when arithmetic produces NaN/Inf or an ill-posed problem."""

    exit_code = 4


class SingularChannelError(NumericError):
    """Raised when a masked Gram matrix is too ill-conditioned to invert."""

    def __init__(self, subcarrier: int, condition: float):
        self.subcarrier = subcarrier
        self.condition = condition
        super().__init__(
            f"Gram matrix at subcarrier {subcarrier} is singular "
            f"(condition number {condition:.3e})"
        )


class DegenerateInputError(NumericError):
    """Raised when an input carries no energy where energy is required."""

    pass


class DomainError(NumericError):
    """Raised when an argument lies outside the domain of a function."""

    pass


class OutputError(AntselError):
    """Raised when a result or channel file cannot be written."""

    def __init__(self, path: object, reason: object):
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")
