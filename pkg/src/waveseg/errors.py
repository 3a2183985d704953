"""Exception hierarchy shared across the package."""


class WavesegError(Exception):
    pass


class DimensionError(WavesegError, ValueError):
    """Shapes of the operands do not admit the requested operation."""


class ContractError(WavesegError, ValueError):
    """A caller-side precondition was violated."""


class NumericError(WavesegError, ArithmeticError):
    """NaN/Inf encountered where finite values are required."""


class ConfigError(WavesegError, ValueError):
    """Bad or unknown configuration key/value."""


class DataError(WavesegError, ValueError):
    """Dataset files missing, malformed, or empty."""


class FormatError(WavesegError, ValueError):
    """Checkpoint or serialized artifact is malformed or mismatched."""
