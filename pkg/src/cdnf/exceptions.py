class ParameterError(ValueError):
    """Raised when a model, solver or stimulus parameter is out of range."""


class DimensionError(ValueError):
    """Raised when grid or frame shapes are incompatible."""
