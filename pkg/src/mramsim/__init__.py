"""Behavioral simulator for approximate toggle-MRAM writes.

The write pulse of a toggle-MRAM can be shortened below its rated width;
cells whose switching threshold exceeds the shortened pulse fail to
toggle. This package models that failure mechanism per cell, characterizes
chips into error maps, allocates data away from weak addresses, and
scores the application-level quality of approximate writes.
"""

from .alloc import (
    AddressPool,
    AllocationTable,
    allocate,
    build_pool,
    map_request,
    pool_summary,
    tracking_overhead,
    translate,
)
from .calibrate import CalibrationTargets, calibrate_profile
from .characterize import (
    ErrorMap,
    ErrorStats,
    SortedAddressList,
    SortedEntry,
    SweepPoint,
    accumulate_union,
    characterize,
    compute_stats,
    sort_addresses,
    sweep_t_w,
)
from .device import (
    NOMINAL_ENV,
    NOMINAL_TIMINGS,
    REFERENCE_TEMP_C,
    WORD_LENGTH,
    ChipModel,
    ChipProfile,
    Environment,
    WriteOutcome,
    WriteTimings,
    create_chip,
    dump_profile,
    load_profile,
)
from .errors import (
    AddressError,
    AllocationError,
    CalibrationError,
    CharacterizationError,
    FileFormatError,
    MramError,
    OperatingRangeError,
    PatternError,
    PoolExhaustedError,
    PowerModelError,
    ProfileError,
    StatsError,
    TimingError,
    TranslationFault,
)
from .patterns import Pattern, parse_pattern
from .power import (
    DEFAULT_CURVE,
    PowerCurve,
    current_at,
    current_saving,
    load_curve_csv,
    power_reduction,
)
from .profiles import (
    CHARACTERIZATION_TARGETS,
    DEFAULT_CAPACITY_WORDS,
    PROFILE_IDS,
    get_profile,
)
from .quality import (
    ImageBuffer,
    QualityReport,
    append_quality_row,
    mse,
    read_pgm,
    run_image_experiment,
    snr,
    write_pgm,
)

__version__ = "0.1.0"

__all__ = [
    "AddressError",
    "AddressPool",
    "AllocationError",
    "AllocationTable",
    "CalibrationError",
    "CalibrationTargets",
    "CHARACTERIZATION_TARGETS",
    "CharacterizationError",
    "ChipModel",
    "ChipProfile",
    "DEFAULT_CAPACITY_WORDS",
    "DEFAULT_CURVE",
    "Environment",
    "ErrorMap",
    "ErrorStats",
    "FileFormatError",
    "ImageBuffer",
    "MramError",
    "NOMINAL_ENV",
    "NOMINAL_TIMINGS",
    "OperatingRangeError",
    "Pattern",
    "PatternError",
    "PoolExhaustedError",
    "PowerCurve",
    "PowerModelError",
    "PROFILE_IDS",
    "ProfileError",
    "QualityReport",
    "REFERENCE_TEMP_C",
    "SortedAddressList",
    "SortedEntry",
    "StatsError",
    "SweepPoint",
    "TimingError",
    "TranslationFault",
    "WORD_LENGTH",
    "WriteOutcome",
    "WriteTimings",
    "accumulate_union",
    "allocate",
    "append_quality_row",
    "build_pool",
    "calibrate_profile",
    "characterize",
    "compute_stats",
    "create_chip",
    "current_at",
    "current_saving",
    "dump_profile",
    "get_profile",
    "load_curve_csv",
    "load_profile",
    "map_request",
    "mse",
    "parse_pattern",
    "pool_summary",
    "power_reduction",
    "read_pgm",
    "run_image_experiment",
    "snr",
    "sort_addresses",
    "sweep_t_w",
    "tracking_overhead",
    "translate",
    "write_pgm",
]
