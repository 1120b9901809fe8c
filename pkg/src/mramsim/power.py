"""Write-current and power arithmetic from the normalized charge curve.

The embedded curve holds the three published anchor points of the write
current's charge phase for a solid 0x0000 write: nothing at 0 ns, 34% of
the full charge at 5 ns, full charge at 20 ns. Queries interpolate
linearly between samples. Power scales with the square of the current, so
cutting the pulse to 5 ns keeps 0.34 of the current and 0.34^2 of the
power. The curve was measured for the worst-case pattern and is applied
as an envelope for all patterns.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FileFormatError, PowerModelError

REQUIRED_ANCHORS = ((0.0, 0.0), (5.0, 0.34), (20.0, 1.0))


@dataclass(frozen=True)
class PowerCurve:
    """Normalized write current versus pulse time, piecewise linear."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        samples = tuple(
            (float(t), float(i)) for t, i in self.samples
        )
        object.__setattr__(self, "samples", samples)
        if len(samples) < 2:
            raise PowerModelError("a power curve needs at least two samples")
        times = [t for t, _ in samples]
        currents = [i for _, i in samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise PowerModelError("sample times must be strictly increasing")
        if any(not 0.0 <= i <= 1.0 for i in currents):
            raise PowerModelError("normalized current must lie in [0, 1]")
        if any(b < a for a, b in zip(currents, currents[1:])):
            raise PowerModelError("normalized current must be non-decreasing")
        for anchor in REQUIRED_ANCHORS:
            if anchor not in samples:
                raise PowerModelError(
                    f"curve is missing the published anchor {anchor}"
                )

    @property
    def t_min(self) -> float:
        return self.samples[0][0]

    @property
    def t_max(self) -> float:
        return self.samples[-1][0]


DEFAULT_CURVE = PowerCurve(REQUIRED_ANCHORS)


def current_at(curve: PowerCurve, t_ns: float) -> float:
    """Normalized current after charging for t_ns."""
    if not curve.t_min <= t_ns <= curve.t_max:
        raise PowerModelError(
            f"t = {t_ns} ns outside the curve's sampled range "
            f"[{curve.t_min}, {curve.t_max}]"
        )
    times = [t for t, _ in curve.samples]
    currents = [i for _, i in curve.samples]
    return float(np.interp(t_ns, times, currents))


def current_saving(curve: PowerCurve, t_reduced: float, t_full: float) -> float:
    """Fractional write-current saving of the reduced pulse."""
    if t_reduced > t_full:
        raise PowerModelError(
            f"t_reduced ({t_reduced}) must not exceed t_full ({t_full})"
        )
    i_reduced = current_at(curve, t_reduced)
    i_full = current_at(curve, t_full)
    if i_full == 0.0:
        raise PowerModelError("full-pulse current is zero; saving is undefined")
    return 1.0 - i_reduced / i_full


def power_reduction(curve: PowerCurve, t_reduced: float, t_full: float) -> float:
    """Fractional power saving; power goes with the square of the current."""
    return 1.0 - (1.0 - current_saving(curve, t_reduced, t_full)) ** 2


def load_curve_csv(path: str | Path) -> PowerCurve:
    """Read (time_ns, normalized_current) sample rows, header optional."""
    samples: list[tuple[float, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row_num, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            try:
                samples.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if row_num == 1:
                    continue  # header row
                raise FileFormatError(
                    f"{path}:{row_num}: expected 'time_ns,normalized_current'"
                ) from None
    try:
        return PowerCurve(tuple(samples))
    except PowerModelError as exc:
        raise FileFormatError(f"{path}: {exc}") from None
