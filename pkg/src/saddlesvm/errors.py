"""Exception hierarchy shared across the package."""


class SaddleSVMError(Exception):
    """Base class for all package errors."""


class DataError(SaddleSVMError, ValueError):
    """Malformed input file or invalid dataset contents."""


class ConfigError(SaddleSVMError, ValueError):
    """Invalid or infeasible solver configuration."""


class NumericalError(SaddleSVMError, ArithmeticError):
    """Degenerate numerical situation (zero normalizers, runaway loops)."""


class SimulationFault(SaddleSVMError, RuntimeError):
    """Internal inconsistency detected in the distributed simulation."""
