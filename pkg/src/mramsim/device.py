"""Behavioral model of a toggle-MRAM chip driven below its rated write pulse.

Write semantics
---------------
A write pre-reads the target word and toggles only the differing bits. Each
attempted toggle of cell (addr, bit) succeeds iff

    t_w * g(k) * field_factor >= tau_dir * temp_factor + jitter

where tau_dir is the cell's latent critical pulse width for the toggle
direction (1->0 or 0->1, fixed at construction), k is the number of bits
toggling in this word write, g is the profile's relief curve (few toggles
draw a current inrush from the shared I/O rails that speeds switching, so
g(k) >= 1 and g(16) = 1), temp_factor = exp(c * (T - 26)) scales thresholds
up with temperature, and field_factor = field_sensitivity ** field_mT
derates the effective pulse slightly under an external magnetic field.
Failed toggles retain the old bit value; bits outside the toggle set are
never touched.

Jitter is the per-write part. Each word carries a write counter that cycles
through jitter_period slots; the jitter of (addr, bit, slot) is a clipped
correlated Gaussian (a word-level component shared by the 16 cells plus a
cell-level component, correlation word_correlation) produced by a
counter-based hash of the chip seed. Revisiting a slot replays the same
value exactly, which is what makes characterization converge: once every
slot of a word has been observed clean, later writes of that word at the
same or gentler settings cannot fail. Resets do not advance the counter.

Thresholds are capped at tau_cap_ns so that the rated pulse (15 ns) always
succeeds across the rated temperature range, including worst-case jitter.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AddressError,
    OperatingRangeError,
    ProfileError,
    TimingError,
)
from .rng import construction_rng, derive_key, hashed_normal

WORD_LENGTH = 16
REFERENCE_TEMP_C = 26.0

GRADE_RANGES: dict[str, tuple[float, float]] = {
    "commercial": (0.0, 70.0),
    "industrial": (-40.0, 85.0),
}


def _popcount16_table() -> np.ndarray:
    v = np.arange(1 << 16, dtype=np.uint32)
    v = v - ((v >> 1) & 0x55555555)
    v = (v & 0x33333333) + ((v >> 2) & 0x33333333)
    v = (v + (v >> 4)) & 0x0F0F0F0F
    return ((v * 0x01010101) >> 24).astype(np.uint8)


POPCOUNT16 = _popcount16_table()
_BIT_INDEX = np.arange(WORD_LENGTH, dtype=np.uint16)


@dataclass(frozen=True)
class WriteTimings:
    """Write-cycle timing parameters in nanoseconds.

    Only t_w (the toggle pulse width) is varied by experiments; the cycle,
    recovery, and data-valid times ride along at their rated values and do
    not feed the failure model.
    """

    t_wc: float = 35.0
    t_w: float = 15.0
    t_wr: float = 12.0
    t_dv: float = 10.0

    def __post_init__(self) -> None:
        for name in ("t_wc", "t_w", "t_wr", "t_dv"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise TimingError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise TimingError(f"{name} must be positive, got {value}")
        if self.t_w > self.t_wc:
            raise TimingError(
                f"t_w ({self.t_w}) cannot exceed the write cycle t_wc ({self.t_wc})"
            )

    def with_t_w(self, t_w: float) -> "WriteTimings":
        return dataclasses.replace(self, t_w=float(t_w))


NOMINAL_TIMINGS = WriteTimings()


@dataclass(frozen=True)
class Environment:
    """Operating conditions for a write."""

    temperature_c: float = REFERENCE_TEMP_C
    field_mt: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.temperature_c):
            raise OperatingRangeError(
                f"temperature_c must be finite, got {self.temperature_c!r}"
            )
        if not (math.isfinite(self.field_mt) and self.field_mt >= 0):
            raise OperatingRangeError(
                f"field_mt must be a finite non-negative value, got {self.field_mt!r}"
            )


NOMINAL_ENV = Environment()


@dataclass(frozen=True)
class ChipProfile:
    """Calibrated per-model parameters of one chip family.

    tau_params_* are (location, scale) of the log-normal critical pulse
    width per toggle direction. relief_curve maps the per-word toggle count
    k = 0..16 to the effective-pulse multiplier g(k). word_correlation is
    the share of threshold and jitter variance common to a word's 16 cells;
    it controls how erroneous bits cluster into erroneous addresses.
    """

    model_id: str
    grade: str
    capacity_words: int
    tau_params_1to0: tuple[float, float]
    tau_params_0to1: tuple[float, float]
    jitter_sigma: float
    temp_coefficient: float
    relief_curve: tuple[float, ...]
    word_correlation: float
    tau_cap_ns: float
    word_length: int = WORD_LENGTH
    field_sensitivity: float = 1.0
    jitter_clip: float = 4.0
    jitter_period: int = 50

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau_params_1to0", tuple(map(float, self.tau_params_1to0)))
        object.__setattr__(self, "tau_params_0to1", tuple(map(float, self.tau_params_0to1)))
        object.__setattr__(self, "relief_curve", tuple(map(float, self.relief_curve)))
        if not self.model_id:
            raise ProfileError("model_id must be a non-empty identifier")
        if self.grade not in GRADE_RANGES:
            raise ProfileError(
                f"grade must be one of {sorted(GRADE_RANGES)}, got {self.grade!r}"
            )
        if not (isinstance(self.capacity_words, int) and self.capacity_words >= 1):
            raise ProfileError(
                f"capacity_words must be a positive integer, got {self.capacity_words!r}"
            )
        if self.word_length != WORD_LENGTH:
            raise ProfileError(
                f"word_length is fixed at {WORD_LENGTH}, got {self.word_length}"
            )
        for name in ("tau_params_1to0", "tau_params_0to1"):
            params = getattr(self, name)
            if len(params) != 2:
                raise ProfileError(f"{name} must be (location, scale)")
            if params[1] <= 0:
                raise ProfileError(f"{name} scale must be positive, got {params[1]}")
        if self.jitter_sigma < 0:
            raise ProfileError(
                f"jitter_sigma must be non-negative, got {self.jitter_sigma}"
            )
        if self.temp_coefficient <= 0:
            raise ProfileError(
                "temp_coefficient must be positive so thresholds grow strictly "
                f"with temperature, got {self.temp_coefficient}"
            )
        if len(self.relief_curve) != WORD_LENGTH + 1:
            raise ProfileError(
                f"relief_curve must have {WORD_LENGTH + 1} entries for k = 0..16, "
                f"got {len(self.relief_curve)}"
            )
        if self.relief_curve[WORD_LENGTH] != 1.0:
            raise ProfileError(
                f"relief_curve g(16) must equal 1, got {self.relief_curve[WORD_LENGTH]}"
            )
        if any(g < 1.0 for g in self.relief_curve):
            raise ProfileError("relief_curve values must all be >= 1")
        if any(
            self.relief_curve[k + 1] > self.relief_curve[k]
            for k in range(WORD_LENGTH)
        ):
            raise ProfileError("relief_curve must be non-increasing in toggle count")
        if not 0.0 < self.field_sensitivity <= 1.0:
            raise ProfileError(
                f"field_sensitivity must lie in (0, 1], got {self.field_sensitivity}"
            )
        if not 0.0 <= self.word_correlation < 1.0:
            raise ProfileError(
                f"word_correlation must lie in [0, 1), got {self.word_correlation}"
            )
        if self.tau_cap_ns <= 0:
            raise ProfileError(f"tau_cap_ns must be positive, got {self.tau_cap_ns}")
        if self.jitter_clip <= 0:
            raise ProfileError(f"jitter_clip must be positive, got {self.jitter_clip}")
        if not (isinstance(self.jitter_period, int) and self.jitter_period >= 1):
            raise ProfileError(
                f"jitter_period must be a positive integer, got {self.jitter_period!r}"
            )
        mean_1to0 = self.tau_params_1to0[0] + 0.5 * self.tau_params_1to0[1] ** 2
        mean_0to1 = self.tau_params_0to1[0] + 0.5 * self.tau_params_0to1[1] ** 2
        if mean_1to0 <= mean_0to1:
            raise ProfileError(
                "tau_params_1to0 mean must exceed tau_params_0to1 mean "
                "(the 1->0 toggle is the vulnerable direction)"
            )

    @property
    def rated_range(self) -> tuple[float, float]:
        return GRADE_RANGES[self.grade]

    def temp_factor(self, temperature_c: float) -> float:
        return math.exp(self.temp_coefficient * (temperature_c - REFERENCE_TEMP_C))

    def field_factor(self, field_mt: float) -> float:
        return self.field_sensitivity ** field_mt

    def check_environment(self, env: Environment) -> None:
        low, high = self.rated_range
        if not low <= env.temperature_c <= high:
            raise OperatingRangeError(
                f"temperature {env.temperature_c} degC outside the {self.grade} "
                f"rated range [{low}, {high}] of {self.model_id}"
            )

    def to_json_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "grade": self.grade,
            "capacity_words": self.capacity_words,
            "word_length": self.word_length,
            "tau_params_1to0": list(self.tau_params_1to0),
            "tau_params_0to1": list(self.tau_params_0to1),
            "jitter_sigma": self.jitter_sigma,
            "temp_coefficient": self.temp_coefficient,
            "relief_curve": list(self.relief_curve),
            "word_correlation": self.word_correlation,
            "tau_cap_ns": self.tau_cap_ns,
            "field_sensitivity": self.field_sensitivity,
            "jitter_clip": self.jitter_clip,
            "jitter_period": self.jitter_period,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ChipProfile":
        try:
            return cls(
                model_id=doc["model_id"],
                grade=doc["grade"],
                capacity_words=int(doc["capacity_words"]),
                tau_params_1to0=tuple(doc["tau_params_1to0"]),
                tau_params_0to1=tuple(doc["tau_params_0to1"]),
                jitter_sigma=float(doc["jitter_sigma"]),
                temp_coefficient=float(doc["temp_coefficient"]),
                relief_curve=tuple(doc["relief_curve"]),
                word_correlation=float(doc["word_correlation"]),
                tau_cap_ns=float(doc["tau_cap_ns"]),
                word_length=int(doc.get("word_length", WORD_LENGTH)),
                field_sensitivity=float(doc.get("field_sensitivity", 1.0)),
                jitter_clip=float(doc.get("jitter_clip", 4.0)),
                jitter_period=int(doc.get("jitter_period", 50)),
            )
        except KeyError as missing:
            raise ProfileError(f"profile document is missing field {missing}") from None


def load_profile(path: str | Path) -> ChipProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return ChipProfile.from_json_dict(json.load(fh))


def dump_profile(profile: ChipProfile, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class WriteOutcome:
    """Per-bit result of one word write."""

    attempted_mask: int
    failed_mask: int

    @property
    def toggled_mask(self) -> int:
        return self.attempted_mask & ~self.failed_mask


class ChipModel:
    """A seeded instance of one chip profile.

    Process variation (the tau arrays) is drawn once at construction; only
    jitter varies per write, and that through the slot hash, so two chips
    built from the same (profile, seed) behave bit-identically under the
    same operation sequence.
    """

    def __init__(self, profile: ChipProfile, seed: int) -> None:
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise ProfileError(f"seed must be an integer, got {seed!r}")
        if seed < 0:
            raise ProfileError(f"seed must be non-negative, got {seed}")
        self.profile = profile
        self.seed = int(seed)
        self.rng = construction_rng(self.seed, profile.model_id)

        cap = profile.capacity_words
        rho = profile.word_correlation
        sr, sc = math.sqrt(rho), math.sqrt(1.0 - rho)
        z_word = self.rng.standard_normal(cap)[:, None]
        loc10, scale10 = profile.tau_params_1to0
        loc01, scale01 = profile.tau_params_0to1
        z10 = sr * z_word + sc * self.rng.standard_normal((cap, WORD_LENGTH))
        z01 = sr * z_word + sc * self.rng.standard_normal((cap, WORD_LENGTH))
        self._tau_1to0 = np.minimum(np.exp(loc10 + scale10 * z10), profile.tau_cap_ns)
        self._tau_0to1 = np.minimum(np.exp(loc01 + scale01 * z01), profile.tau_cap_ns)

        self._words = np.full(cap, 0xFFFF, dtype=np.uint16)
        self._write_count = np.zeros(cap, dtype=np.uint8)
        self._word_key = derive_key(self.seed, "jitter-word:" + profile.model_id)
        self._cell_key = derive_key(self.seed, "jitter-cell:" + profile.model_id)
        self._relief = np.asarray(profile.relief_curve, dtype=np.float64)

    @property
    def chip_id(self) -> str:
        return f"{self.profile.model_id}:{self.seed}"

    @property
    def capacity_words(self) -> int:
        return self.profile.capacity_words

    def _check_addrs(self, addrs: np.ndarray) -> None:
        if addrs.size == 0:
            return
        bad = (addrs < 0) | (addrs >= self.profile.capacity_words)
        if bad.any():
            first = int(addrs[bad][0])
            raise AddressError(
                f"address {first:#06x} outside capacity "
                f"{self.profile.capacity_words} of {self.chip_id}"
            )
        if addrs.size > 1 and not bool(np.all(addrs[1:] > addrs[:-1])):
            if np.unique(addrs).size != addrs.size:
                raise AddressError("write batch contains duplicate addresses")

    def _jitter(self, addrs: np.ndarray, slots: np.ndarray) -> np.ndarray:
        """Jitter in ns for the current slot of each addressed word, (N, 16)."""
        p = self.profile
        period = np.uint64(p.jitter_period)
        a64 = addrs.astype(np.uint64)
        s64 = slots.astype(np.uint64)
        word_lanes = a64 * period + s64
        w = hashed_normal(self._word_key, word_lanes)
        cell_lanes = (
            (a64[:, None] * np.uint64(WORD_LENGTH) + np.arange(WORD_LENGTH, dtype=np.uint64))
            * period
            + s64[:, None]
        )
        g = hashed_normal(self._cell_key, cell_lanes)
        rho = p.word_correlation
        combined = math.sqrt(rho) * w[:, None] + math.sqrt(1.0 - rho) * g
        np.clip(combined, -p.jitter_clip, p.jitter_clip, out=combined)
        return p.jitter_sigma * combined

    def write_many(
        self,
        addrs: np.ndarray,
        data: np.ndarray,
        timings: WriteTimings = NOMINAL_TIMINGS,
        env: Environment = NOMINAL_ENV,
    ) -> np.ndarray:
        """Write data[i] to addrs[i] (unique addresses) in one batch.

        Returns the per-address failed-bit masks as uint16. Equivalent to a
        loop of single-word writes; batching exists so full-chip operations
        stay vectorized.
        """
        addrs = np.ascontiguousarray(np.asarray(addrs, dtype=np.int64))
        data = np.asarray(data, dtype=np.uint16)
        if addrs.shape != data.shape or addrs.ndim != 1:
            raise AddressError("addrs and data must be 1-D arrays of equal length")
        self._check_addrs(addrs)
        self.profile.check_environment(env)
        if addrs.size == 0:
            return np.zeros(0, dtype=np.uint16)

        p = self.profile
        stored = self._words[addrs]
        diff = stored ^ data
        k = POPCOUNT16[diff]
        slots = self._write_count[addrs]

        diff_bits = ((diff[:, None] >> _BIT_INDEX) & np.uint16(1)).astype(bool)
        stored_bits = ((stored[:, None] >> _BIT_INDEX) & np.uint16(1)).astype(bool)
        tau = np.where(stored_bits, self._tau_1to0[addrs], self._tau_0to1[addrs])

        effective = timings.t_w * self._relief[k] * p.field_factor(env.field_mt)
        threshold = tau * p.temp_factor(env.temperature_c) + self._jitter(addrs, slots)
        failed_bits = (effective[:, None] < threshold) & diff_bits

        new_bits = stored_bits ^ (diff_bits & ~failed_bits)
        new_words = np.bitwise_or.reduce(
            new_bits.astype(np.uint16) << _BIT_INDEX, axis=1
        )
        self._words[addrs] = new_words
        self._write_count[addrs] = (slots.astype(np.uint16) + 1) % p.jitter_period
        return np.bitwise_or.reduce(
            failed_bits.astype(np.uint16) << _BIT_INDEX, axis=1
        )

    def write_word(
        self,
        addr: int,
        data: int,
        timings: WriteTimings = NOMINAL_TIMINGS,
        env: Environment = NOMINAL_ENV,
    ) -> WriteOutcome:
        if not 0 <= int(data) <= 0xFFFF:
            raise AddressError(f"data word {data!r} does not fit in 16 bits")
        stored = self.read_word(addr)
        failed = self.write_many(
            np.array([addr], dtype=np.int64),
            np.array([data], dtype=np.uint16),
            timings,
            env,
        )
        return WriteOutcome(
            attempted_mask=stored ^ int(data), failed_mask=int(failed[0])
        )

    def read_word(self, addr: int) -> int:
        addr = int(addr)
        if not 0 <= addr < self.profile.capacity_words:
            raise AddressError(
                f"address {addr:#06x} outside capacity "
                f"{self.profile.capacity_words} of {self.chip_id}"
            )
        return int(self._words[addr])

    def read_block(self, addrs: np.ndarray) -> np.ndarray:
        addrs = np.asarray(addrs, dtype=np.int64)
        self._check_addrs(addrs)
        return self._words[addrs].copy()

    def read_all(self) -> np.ndarray:
        return self._words.copy()

    def reset(self, pattern: int = 0xFFFF) -> None:
        """Rewrite every word with a solid pattern at nominal timing.

        Rated writes never fail, so this is modeled as a direct store. It
        does not consume jitter slots: only reduced-stress writes advance
        the per-word counters.
        """
        pattern = int(pattern)
        if not 0 <= pattern <= 0xFFFF:
            raise AddressError(f"reset pattern {pattern!r} does not fit in 16 bits")
        self._words[:] = np.uint16(pattern)

    def dump(self, path: str | Path) -> None:
        """Snapshot full chip state for later restore."""
        buf = io.BytesIO()
        np.savez_compressed(
            buf,
            words=self._words,
            write_count=self._write_count,
            tau_1to0=self._tau_1to0,
            tau_0to1=self._tau_0to1,
            seed=np.int64(self.seed),
            profile_json=np.frombuffer(
                json.dumps(self.profile.to_json_dict()).encode("utf-8"), dtype=np.uint8
            ),
        )
        Path(path).write_bytes(buf.getvalue())

    @classmethod
    def restore(cls, path: str | Path) -> "ChipModel":
        with np.load(path) as archive:
            profile = ChipProfile.from_json_dict(
                json.loads(archive["profile_json"].tobytes().decode("utf-8"))
            )
            chip = cls(profile, int(archive["seed"]))
            chip._words[:] = archive["words"]
            chip._write_count[:] = archive["write_count"]
            chip._tau_1to0[:] = archive["tau_1to0"]
            chip._tau_0to1[:] = archive["tau_0to1"]
        return chip


def create_chip(profile: ChipProfile, seed: int) -> ChipModel:
    """Construct a seeded chip. Contents start as all-ones words."""
    return ChipModel(profile, seed)
