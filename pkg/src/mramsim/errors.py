"""Exception hierarchy shared by all mramsim modules.

Domain errors derive from MramError so callers (and the CLI) can catch one
base class. I/O-shaped problems (malformed image files, unreadable inputs)
get their own branch because the CLI maps them to a different exit code.
"""

from __future__ import annotations


class MramError(Exception):
    """Base class for all domain errors raised by this package."""


class ProfileError(MramError):
    """A chip profile field is missing, malformed, or out of range."""


class AddressError(MramError):
    """An address is outside the chip's capacity or otherwise invalid."""


class TimingError(MramError):
    """A write timing value is non-positive or otherwise unusable."""


class OperatingRangeError(MramError):
    """The requested environment is outside the profile's rated range."""


class PatternError(MramError):
    """A data-pattern descriptor could not be parsed."""


class CalibrationError(MramError):
    """Calibration targets are infeasible or the fit failed to converge."""


class CharacterizationError(MramError):
    """A characterization request is malformed (bad round count or inputs)."""


class StatsError(MramError):
    """Error maps passed to a statistics routine are not comparable."""


class AllocationError(MramError):
    """An allocation request cannot be satisfied as specified."""


class PoolExhaustedError(AllocationError):
    """A critical allocation ran out of accurate addresses."""


class TranslationFault(MramError):
    """A virtual address has no entry in the allocation table."""


class PowerModelError(MramError):
    """A power curve is malformed or a query falls outside its support."""


class FileFormatError(MramError):
    """An input file (image, map, config) is not in the expected format."""
