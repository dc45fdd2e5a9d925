class ConfigurationError(ValueError):
    """Inconsistent system, codebook or experiment parameters."""


class InputError(ValueError):
    """Operands with mismatched shapes or invalid values."""
