"""Error characterization: accumulate, sort, and summarize write failures.

The characterization protocol mirrors deployment practice: reset the chip
to solid 0xFFFF at rated timing, write the training pattern everywhere at
the reduced pulse width, read everything back, XOR against intent, and
union the per-address error masks over n rounds (strategy 1). A second
pass orders the accumulated addresses by how badly they misstore data
(strategy 2) so an allocator can spend the least-broken addresses first.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

from .device import (
    NOMINAL_ENV,
    NOMINAL_TIMINGS,
    POPCOUNT16,
    ChipModel,
    Environment,
    WriteTimings,
)
from .errors import AddressError, CharacterizationError, StatsError
from .fileio import atomic_write_text
from .patterns import Pattern, coerce_pattern

GRANULARITIES = ("word", "byte")


@dataclass
class ErrorMap:
    """Union of observed write errors over a characterization run.

    erroneous maps address to the accumulated 16-bit error mask; an address
    appears only if some bit of it failed at least once. last_intended and
    last_stored hold the final round's data for the erroneous addresses
    (the freshest evidence of how each address misbehaves); they feed the
    severity sort and are not part of the serialized map.
    """

    chip_id: str
    t_w_ns: float
    n_measurements: int
    pattern: str
    capacity_words: int
    erroneous: dict[int, int]
    per_measurement_counts: list[int] = field(default_factory=list)
    last_intended: dict[int, int] | None = field(default=None, repr=False)
    last_stored: dict[int, int] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        for addr, mask in self.erroneous.items():
            if not 0 <= addr < self.capacity_words:
                raise AddressError(
                    f"error-map address {addr:#06x} outside capacity "
                    f"{self.capacity_words}"
                )
            if not 0 < mask <= 0xFFFF:
                raise CharacterizationError(
                    f"error mask for {addr:#06x} must be a nonzero 16-bit "
                    f"value, got {mask:#x}"
                )

    @property
    def address_count(self) -> int:
        return len(self.erroneous)

    @property
    def bit_count(self) -> int:
        if not self.erroneous:
            return 0
        masks = np.fromiter(self.erroneous.values(), dtype=np.uint16)
        return int(POPCOUNT16[masks].sum())

    def addresses(self) -> list[int]:
        return sorted(self.erroneous)

    def to_json_dict(self) -> dict:
        return {
            "chip_id": self.chip_id,
            "t_w_ns": self.t_w_ns,
            "n": self.n_measurements,
            "pattern": self.pattern,
            "capacity_words": self.capacity_words,
            "per_measurement_counts": list(self.per_measurement_counts),
            "entries": [
                {"addr": f"0x{addr:04x}", "mask": f"0x{self.erroneous[addr]:04x}"}
                for addr in sorted(self.erroneous)
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ErrorMap":
        try:
            return cls(
                chip_id=doc["chip_id"],
                t_w_ns=float(doc["t_w_ns"]),
                n_measurements=int(doc["n"]),
                pattern=doc["pattern"],
                capacity_words=int(doc["capacity_words"]),
                erroneous={
                    int(entry["addr"], 16): int(entry["mask"], 16)
                    for entry in doc["entries"]
                },
                per_measurement_counts=[
                    int(v) for v in doc.get("per_measurement_counts", [])
                ],
            )
        except KeyError as missing:
            raise CharacterizationError(
                f"error-map document is missing field {missing}"
            ) from None

    def save(self, path: str | Path) -> None:
        atomic_write_text(path, json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ErrorMap":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class SortedEntry:
    address: int
    severity: int
    mask: int


@dataclass(frozen=True)
class SortedAddressList:
    """Erroneous addresses in ascending severity order (strategy 2)."""

    entries: tuple[SortedEntry, ...]
    granularity: str = "word"

    def addresses(self) -> list[int]:
        return [entry.address for entry in self.entries]


@dataclass(frozen=True)
class ErrorStats:
    """Table-style error statistics for one (chip, pattern) pairing.

    e_* describe the characterization map, m_* the evaluation map, and c_*
    the share of the evaluation errors already covered by characterization.
    Coverage is undefined (None) when the evaluation saw no errors.
    """

    chip_id: str
    pattern: str
    t_w_ns: float
    e_a_pct: float
    e_b_pct: float
    m_a_pct: float
    m_b_pct: float
    c_a_pct: float | None
    c_b_pct: float | None

    def __post_init__(self) -> None:
        for name in ("e_a_pct", "e_b_pct", "m_a_pct", "m_b_pct"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise StatsError(f"{name} out of range: {value}")
        for name in ("c_a_pct", "c_b_pct"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 100.0:
                raise StatsError(f"{name} out of range: {value}")


def accumulate_union(rounds: Iterable[Mapping[int, int]]) -> dict[int, int]:
    """Strategy 1: union per-round error masks across measurements."""
    union: dict[int, int] = {}
    for round_masks in rounds:
        for addr, mask in round_masks.items():
            if mask:
                union[addr] = union.get(addr, 0) | int(mask)
    return union


def characterize(
    chip: ChipModel,
    t_w_ns: float,
    n_measurements: int,
    pattern: Pattern | int | str = 0x0000,
    env: Environment = NOMINAL_ENV,
) -> ErrorMap:
    """Run the n-round accumulation protocol on a chip.

    Full coverage of the per-write jitter needs at least
    chip.profile.jitter_period rounds; fewer rounds give a valid but
    partial map.
    """
    if n_measurements < 1:
        raise CharacterizationError(
            f"n_measurements must be at least 1, got {n_measurements}"
        )
    pattern = coerce_pattern(pattern)
    if t_w_ns >= NOMINAL_TIMINGS.t_w:
        warnings.warn(
            f"characterizing at t_w = {t_w_ns} ns, at or above the rated "
            f"{NOMINAL_TIMINGS.t_w} ns pulse: the error map will be empty",
            RuntimeWarning,
            stacklevel=2,
        )
    capacity = chip.capacity_words
    addrs = np.arange(capacity, dtype=np.int64)
    intended = pattern.words(capacity)
    timings = NOMINAL_TIMINGS.with_t_w(t_w_ns)

    union = np.zeros(capacity, dtype=np.uint16)
    counts: list[int] = []
    stored = intended
    for _ in range(n_measurements):
        chip.reset(0xFFFF)
        chip.write_many(addrs, intended, timings, env)
        stored = chip.read_block(addrs)
        masks = stored ^ intended
        union |= masks
        counts.append(int(POPCOUNT16[masks].sum()))

    bad = np.nonzero(union)[0]
    return ErrorMap(
        chip_id=chip.chip_id,
        t_w_ns=float(t_w_ns),
        n_measurements=int(n_measurements),
        pattern=pattern.descriptor,
        capacity_words=capacity,
        erroneous={int(a): int(union[a]) for a in bad},
        per_measurement_counts=counts,
        last_intended={int(a): int(intended[a]) for a in bad},
        last_stored={int(a): int(stored[a]) for a in bad},
    )


def _severity(xor: int, granularity: str) -> int:
    if granularity == "word":
        return xor
    return max(xor & 0x00FF, (xor >> 8) & 0x00FF)


def sort_addresses(
    error_map: ErrorMap,
    intended: Mapping[int, int],
    stored: Mapping[int, int],
    granularity: str = "word",
) -> SortedAddressList:
    """Strategy 2: order the map's addresses by ascending error severity.

    Severity is the decimal value of intended XOR stored, so errors in
    high-order bits sort as worst; ties break by ascending address. The
    byte granularity scores a word by its worse byte instead.
    """
    if granularity not in GRANULARITIES:
        raise StatsError(
            f"granularity must be one of {GRANULARITIES}, got {granularity!r}"
        )
    entries = []
    for addr, mask in error_map.erroneous.items():
        if addr not in intended:
            raise AddressError(
                f"address 0x{addr:04x} from the error map is missing from "
                "the intended words"
            )
        if addr not in stored:
            raise AddressError(
                f"address 0x{addr:04x} from the error map is missing from "
                "the stored words"
            )
        xor = (int(intended[addr]) ^ int(stored[addr])) & 0xFFFF
        entries.append(SortedEntry(addr, _severity(xor, granularity), mask))
    entries.sort(key=lambda e: (e.severity, e.address))
    return SortedAddressList(entries=tuple(entries), granularity=granularity)


def compute_stats(
    characterization_map: ErrorMap, evaluation_map: ErrorMap
) -> ErrorStats:
    """Fold a characterization map and one evaluation map into statistics."""
    char, eval_ = characterization_map, evaluation_map
    if char.chip_id != eval_.chip_id:
        raise StatsError(
            f"maps come from different chips: {char.chip_id} vs {eval_.chip_id}"
        )
    if char.capacity_words != eval_.capacity_words:
        raise StatsError(
            f"maps cover different capacities: {char.capacity_words} vs "
            f"{eval_.capacity_words}"
        )
    if char.t_w_ns != eval_.t_w_ns:
        raise StatsError(
            f"maps taken at different pulse widths: {char.t_w_ns} vs "
            f"{eval_.t_w_ns}"
        )
    capacity = char.capacity_words
    total_bits = capacity * 16

    c_a = c_b = None
    if eval_.erroneous:
        shared_addrs = sum(1 for addr in eval_.erroneous if addr in char.erroneous)
        c_a = shared_addrs / len(eval_.erroneous) * 100.0
        eval_bits = eval_.bit_count
        shared_bits = sum(
            int(POPCOUNT16[mask & char.erroneous.get(addr, 0)])
            for addr, mask in eval_.erroneous.items()
        )
        c_b = shared_bits / eval_bits * 100.0

    return ErrorStats(
        chip_id=char.chip_id,
        pattern=eval_.pattern,
        t_w_ns=char.t_w_ns,
        e_a_pct=char.address_count / capacity * 100.0,
        e_b_pct=char.bit_count / total_bits * 100.0,
        m_a_pct=eval_.address_count / capacity * 100.0,
        m_b_pct=eval_.bit_count / total_bits * 100.0,
        c_a_pct=c_a,
        c_b_pct=c_b,
    )


@dataclass(frozen=True)
class SweepPoint:
    t_w_ns: float
    failed_bits: int
    total_bits: int

    @property
    def failed_bit_fraction(self) -> float:
        return self.failed_bits / self.total_bits


def sweep_t_w(
    chip_factory: Callable[[], ChipModel],
    t_w_values: Iterable[float],
    pattern: Pattern | int | str = 0x0000,
    env: Environment = NOMINAL_ENV,
) -> list[SweepPoint]:
    """One full-chip write per pulse width, each on a fresh chip.

    Rebuilding the chip from the same master seed for every point makes
    the sweep a controlled experiment: identical process variation and
    jitter draws, with only the pulse width moving.
    """
    values = [float(t) for t in t_w_values]
    if not values:
        raise CharacterizationError("t_w_values must not be empty")
    pattern = coerce_pattern(pattern)
    points = []
    for t_w in values:
        chip = chip_factory()
        capacity = chip.capacity_words
        addrs = np.arange(capacity, dtype=np.int64)
        intended = pattern.words(capacity)
        chip.reset(0xFFFF)
        chip.write_many(addrs, intended, NOMINAL_TIMINGS.with_t_w(t_w), env)
        masks = chip.read_block(addrs) ^ intended
        points.append(
            SweepPoint(
                t_w_ns=t_w,
                failed_bits=int(POPCOUNT16[masks].sum()),
                total_bits=capacity * 16,
            )
        )
    return points
