"""Exception types shared across the package."""


class AdvlandError(Exception):
    """Base class for all package-specific errors."""


class NotSmooth(AdvlandError):
    """Operation requires a twice-differentiable activation (ReLU excluded)."""


class UnsupportedPower(AdvlandError):
    """Gaussian moment requested beyond the supported power range."""


class InvalidDims(AdvlandError, ValueError):
    """Network dimensions must be positive integers."""


class DimMismatch(AdvlandError, ValueError):
    """Input vector length does not match the network's input dimension."""


class ZeroGradient(AdvlandError):
    """Gradient norm below tolerance; gradient-direction step undefined."""


class Unsupported(AdvlandError):
    """Operation not defined for this network configuration (e.g. depth > 1)."""


class DomainError(AdvlandError, ValueError):
    """Bound evaluator called outside its parameter domain."""


class PreconditionViolated(AdvlandError, ValueError):
    """A stated hypothesis of the bound does not hold for these parameters."""


class UnknownBound(AdvlandError, KeyError):
    """No sampling recipe registered under this bound name."""


class InvalidTrials(AdvlandError, ValueError):
    """Trial count must be a positive integer."""


class SchemaError(AdvlandError, ValueError):
    """Input file does not conform to the expected column schema."""
