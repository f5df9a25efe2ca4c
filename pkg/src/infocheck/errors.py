class ConfigurationError(ValueError):
    """Invalid protocol, field or session parameters."""


class FieldMismatchError(ValueError):
    """Operands belong to different fields."""


class InterpolationError(ValueError):
    """Interpolation constraints are inconsistent or unsolvable."""
