from __future__ import annotations


class GearError(RuntimeError):
    """Base for every failure the simulator reports on purpose."""


class ConfigError(GearError):
    pass


class ZeroNormError(GearError):
    pass


class UnsupportedInputError(GearError):
    pass


class AllZeroImageError(GearError):
    pass


class EmptyAnnulusError(GearError):
    pass


class FlatProfileError(GearError):
    pass


class InsufficientSamplesError(GearError):
    pass


class UnwrapAmbiguityError(GearError):
    pass


class CsvFormatError(GearError):
    pass


class UnbalancedInputWarning(UserWarning):
    """Sagnac input whose H and V magnitudes differ."""
