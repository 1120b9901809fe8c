"""Fits chip-profile parameters to factory characterization targets.

The observable targets per chip model are the single-measurement erroneous
bit rate and the 50-measurement union rates (bits and addresses) for a
solid 0x0000 write at the fit pulse width, the failed-bit band at the deep
reduction point, and the hot/room bit-count ratio. The fit works from
closed-form marginal rates of the device model's threshold-plus-slot-jitter
mechanism:

    single shot   M(t)  = E_z[ P(U > y(z)) ]
    slot union    E_B(t) = E_z[ 1 - P(U <= y(z))^period ]

with y(z) = (t - tau(z) * temp_factor) / jitter_sigma and U a clipped
standard normal, integrated over the threshold quantile z by trapezoid.
The address-level union rate additionally depends on how errors cluster
within words, which the word_correlation parameter controls; that one rate
has no cheap closed form and is estimated by a deterministic Monte-Carlo
over word-level factors with the cell-level integrals done analytically
(Gauss-Hermite), using common random numbers so root-finding on the
correlation is smooth.

Parameter solving is a nest of 1-D Brent searches: location matches the
union bit rate, jitter matches the single-shot rate, the tau scale matches
the band midpoint, then correlation matches the address rate, and finally
the temperature coefficient and threshold cap are iterated together (the
cap keeps the rated pulse safe at the grade's maximum temperature, and
moving the cap feeds back into the hot-rate ratio slightly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .device import GRADE_RANGES, ChipProfile, REFERENCE_TEMP_C
from .errors import CalibrationError

# Rated pulse must clear the worst cell with this much slack at the top of
# the temperature range.
SAFETY_MARGIN = 0.97
NOMINAL_T_W = 15.0
# Relief overdrive beyond the worst-case threshold for small toggle counts.
RELIEF_MARGIN = 1.02

_Z_GRID = np.linspace(-8.5, 8.5, 6001)
_Z_PDF = np.exp(-0.5 * _Z_GRID * _Z_GRID) / math.sqrt(2.0 * math.pi)
_GH_NODES, _GH_WEIGHTS = hermegauss(64)
_GH_WEIGHTS = _GH_WEIGHTS / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class CalibrationTargets:
    """Observable rates one chip model must reproduce.

    Percentages follow the measurement convention: bit rates over all
    capacity * 16 cells, address rates over all words, for a solid 0x0000
    write after an all-ones reset.
    """

    model_id: str
    grade: str
    single_shot_bit_pct: float
    union_bit_pct: float
    union_addr_pct: float
    capacity_words: int = 65536
    fit_t_w_ns: float = 5.0
    band_t_w_ns: float = 2.5
    band_pct: tuple[float, float] = (25.59, 37.30)
    hot_ratio: float = 1.72
    hot_temp_c: float = 65.0
    field_increase: float = 0.25
    field_probe_mt: float = 8.0

    def __post_init__(self) -> None:
        if self.grade not in GRADE_RANGES:
            raise CalibrationError(
                f"grade must be one of {sorted(GRADE_RANGES)}, got {self.grade!r}"
            )
        for name in ("single_shot_bit_pct", "union_bit_pct", "union_addr_pct"):
            value = getattr(self, name)
            if not 0.0 < value < 100.0:
                raise CalibrationError(
                    f"{name} must lie strictly between 0 and 100, got {value}"
                )
        if self.union_bit_pct < self.single_shot_bit_pct:
            raise CalibrationError(
                "union_bit_pct cannot be below single_shot_bit_pct: the union "
                "over measurements contains every single-shot error"
            )
        if not self.union_bit_pct <= self.union_addr_pct <= 16.0 * self.union_bit_pct:
            raise CalibrationError(
                "union_addr_pct must lie within [union_bit_pct, 16 * union_bit_pct]: "
                "each erroneous address holds between 1 and 16 erroneous bits"
            )
        if not 0.0 < self.band_t_w_ns < self.fit_t_w_ns:
            raise CalibrationError(
                "band_t_w_ns must be positive and below fit_t_w_ns"
            )
        low, high = self.band_pct
        if not 0.0 < low < high < 100.0:
            raise CalibrationError(f"band_pct bounds are malformed: {self.band_pct}")
        if self.hot_ratio < 1.0:
            raise CalibrationError("hot_ratio below 1 contradicts threshold growth")
        if not 0.0 < self.field_increase < 1.0:
            raise CalibrationError("field_increase must lie in (0, 1)")


# Clip-aware survival and max-CDF of the jitter variable U = clip(N(0,1), +-clip).


def _survival(y: np.ndarray, clip: float) -> np.ndarray:
    out = np.where(y >= clip, 0.0, 1.0 - ndtr(y))
    return np.where(y < -clip, 1.0, out)


def _union_cdf(y: np.ndarray, clip: float, period: int) -> np.ndarray:
    out = np.where(y >= clip, 1.0, ndtr(np.clip(y, -40.0, 40.0)) ** period)
    return np.where(y < -clip, 0.0, out)


def _tau_grid(loc: float, scale: float, cap: float | None) -> np.ndarray:
    tau = np.exp(loc + scale * _Z_GRID)
    return tau if cap is None else np.minimum(tau, cap)


def _margin(t_w: float, tau: np.ndarray, jitter: float, temp_factor: float) -> np.ndarray:
    if jitter <= 0.0:
        return np.where(t_w < tau * temp_factor, -np.inf, np.inf)
    return (t_w - tau * temp_factor) / jitter


def _no_jitter_rate(
    t_w: float, loc: float, scale: float, temp_factor: float, cap: float | None
) -> float:
    if cap is not None and cap * temp_factor <= t_w:
        return 0.0
    return float(1.0 - ndtr((math.log(t_w / temp_factor) - loc) / scale))


def single_shot_rate(
    t_w: float,
    loc: float,
    scale: float,
    jitter: float,
    temp_factor: float = 1.0,
    cap: float | None = None,
    clip: float = 4.0,
) -> float:
    """Fraction of toggling cells failing one write at pulse width t_w."""
    if jitter <= 0.0:
        return _no_jitter_rate(t_w, loc, scale, temp_factor, cap)
    y = _margin(t_w, _tau_grid(loc, scale, cap), jitter, temp_factor)
    return float(np.trapezoid(_survival(y, clip) * _Z_PDF, _Z_GRID))


def union_bit_rate(
    t_w: float,
    loc: float,
    scale: float,
    jitter: float,
    temp_factor: float = 1.0,
    cap: float | None = None,
    clip: float = 4.0,
    period: int = 50,
) -> float:
    """Fraction of cells failing at least once over a full slot cycle."""
    if jitter <= 0.0:
        return _no_jitter_rate(t_w, loc, scale, temp_factor, cap)
    y = _margin(t_w, _tau_grid(loc, scale, cap), jitter, temp_factor)
    return float(np.trapezoid((1.0 - _union_cdf(y, clip, period)) * _Z_PDF, _Z_GRID))


def union_addr_rate(
    rho: float,
    loc: float,
    scale: float,
    jitter: float,
    t_w: float = 5.0,
    temp_factor: float = 1.0,
    cap: float | None = None,
    clip: float = 4.0,
    period: int = 50,
    n_words: int = 32768,
    seed: int = 1234,
    chunk: int = 4096,
) -> float:
    """Fraction of words with at least one failing cell over a slot cycle.

    Deterministic given (n_words, seed); the same draws serve every rho so
    the estimate varies smoothly under root-finding.
    """
    rng = np.random.default_rng(seed)
    sr = math.sqrt(rho)
    sc = math.sqrt(max(1.0 - rho, 1e-12))
    bad = 0.0
    for start in range(0, n_words, chunk):
        m = min(chunk, n_words - start)
        z_word = rng.standard_normal(m)
        w_slots = rng.standard_normal((m, period))
        tau = np.exp(loc + scale * (sr * z_word[:, None] + sc * _GH_NODES[None, :]))
        if cap is not None:
            np.minimum(tau, cap, out=tau)
        if jitter <= 0.0:
            # Without jitter the cell component has a closed-form survival;
            # quadrature over a bare indicator would be far too coarse.
            if cap is not None and cap * temp_factor <= t_w:
                clean_cell = np.ones(m)
            else:
                lim = (
                    math.log(t_w / temp_factor) - loc - scale * sr * z_word
                ) / (scale * sc)
                clean_cell = ndtr(lim)
        else:
            y = (t_w - tau * temp_factor) / jitter
            arg = (y[:, :, None] - sr * w_slots[:, None, :]) / sc
            p = ndtr(np.clip(arg, -40.0, 40.0))
            p = np.where(y[:, :, None] >= clip, 1.0, p)
            p = np.where(y[:, :, None] < -clip, 0.0, p)
            clean_cell = np.prod(p, axis=2) @ _GH_WEIGHTS
        word_clean = np.clip(clean_cell, 0.0, 1.0) ** 16
        bad += float(np.sum(1.0 - word_clean))
    return bad / n_words


def _build_relief(worst_threshold: float, fit_t_w: float) -> tuple[float, ...]:
    over = worst_threshold / fit_t_w * RELIEF_MARGIN
    if over < 1.0:
        over = 1.0
    curve = [over] * 8 + [
        1.0 + (over - 1.0) * (16 - k) / 8.0 for k in range(8, 17)
    ]
    return tuple(curve)


def calibrate_profile(
    targets: CalibrationTargets,
    mc_words: int = 32768,
    mc_seed: int = 1234,
) -> ChipProfile:
    """Solve for a ChipProfile reproducing the targets.

    Runtime is dominated by the correlation search (a handful of Monte-Carlo
    evaluations, a few seconds each at the default mc_words); the built-in
    catalog ships pre-solved parameters so normal use never pays this.
    """
    m_b = targets.single_shot_bit_pct / 100.0
    e_b = targets.union_bit_pct / 100.0
    e_a = targets.union_addr_pct / 100.0
    band_mid = (targets.band_pct[0] + targets.band_pct[1]) / 200.0
    t_fit = targets.fit_t_w_ns
    t_band = targets.band_t_w_ns
    clip = 4.0
    period = 50

    degenerate = (e_b - m_b) < 1e-9

    if degenerate:
        # No union growth: no per-write variation is needed. Location and
        # scale follow from the two quantile equations directly.
        q_fit = ndtri(1.0 - m_b)
        q_band = ndtri(1.0 - band_mid)
        if q_fit <= q_band:
            raise CalibrationError(
                "band midpoint must exceed the fit-point rate for a "
                "monotone threshold distribution"
            )
        scale = (math.log(t_fit) - math.log(t_band)) / (q_fit - q_band)
        loc = math.log(t_fit) - scale * q_fit
        jitter = 0.0
    else:
        def loc_for(scale: float, jitter: float) -> float:
            return brentq(
                lambda loc: union_bit_rate(t_fit, loc, scale, jitter, period=period)
                - e_b,
                -6.0,
                3.0,
                xtol=1e-12,
            )

        # Beyond this jitter, the union rate exceeds the target even with
        # vanishing thresholds, so the location search loses its root.
        j_max = t_fit / ndtri((1.0 - e_b) ** (1.0 / period))

        def jitter_for(scale: float) -> float | None:
            def err(j: float) -> float:
                return single_shot_rate(t_fit, loc_for(scale, j), scale, j) - m_b

            lo, hi = 1e-3, 0.95 * j_max
            if err(lo) * err(hi) > 0:
                return None
            return brentq(err, lo, hi, xtol=1e-10)

        def band_err(scale: float) -> float | None:
            j = jitter_for(scale)
            if j is None:
                return None
            return (
                single_shot_rate(t_band, loc_for(scale, j), scale, j) - band_mid
            )

        grid = np.linspace(0.05, 1.5, 30)
        errs = [band_err(s) for s in grid]
        bracket = None
        for (s_lo, v_lo), (s_hi, v_hi) in zip(
            zip(grid, errs), zip(grid[1:], errs[1:])
        ):
            if v_lo is not None and v_hi is not None and v_lo * v_hi <= 0:
                bracket = (s_lo, s_hi)
                break
        if bracket is None:
            raise CalibrationError(
                f"no tau scale reproduces both the {targets.fit_t_w_ns} ns rates "
                f"and the {targets.band_t_w_ns} ns band for {targets.model_id}; "
                "the target set appears internally inconsistent"
            )
        scale = brentq(lambda s: band_err(s), *bracket, xtol=1e-9)
        jitter = jitter_for(scale)
        loc = loc_for(scale, jitter)

    def addr_err(rho: float) -> float:
        return (
            union_addr_rate(
                rho, loc, scale, jitter, t_w=t_fit, period=period,
                n_words=mc_words, seed=mc_seed,
            )
            - e_a
        )

    err_high, err_low = addr_err(0.9995), addr_err(0.0)
    if not err_high < 0 < err_low:
        reachable = (err_high + e_a, err_low + e_a)
        raise CalibrationError(
            f"union_addr_pct {targets.union_addr_pct} is outside the reachable "
            f"range [{reachable[0] * 100:.2f}, {reachable[1] * 100:.2f}] for "
            f"{targets.model_id} given its bit-rate targets"
        )
    rho = brentq(addr_err, 0.0, 0.9995, xtol=1e-6)

    # Temperature coefficient and threshold cap depend on each other: the
    # cap is pinned by rated-pulse safety at the grade's top temperature,
    # and capping slightly reshapes the hot-rate ratio. A few rounds settle.
    t_max = GRADE_RANGES[targets.grade][1]
    hot_delta = targets.hot_temp_c - REFERENCE_TEMP_C
    cap: float | None = None
    for _ in range(3):
        def ratio_err(c: float) -> float:
            hot = single_shot_rate(
                t_fit, loc, scale, jitter, temp_factor=math.exp(c * hot_delta), cap=cap
            )
            room = single_shot_rate(t_fit, loc, scale, jitter, cap=cap)
            return hot / room - targets.hot_ratio
        temp_c = brentq(ratio_err, 1e-6, 0.3, xtol=1e-10)
        cap = (SAFETY_MARGIN * NOMINAL_T_W - clip * jitter) / math.exp(
            temp_c * (t_max - REFERENCE_TEMP_C)
        )
        if cap <= t_fit:
            raise CalibrationError(
                f"threshold cap {cap:.2f} ns collapsed below the fit pulse "
                f"width; targets for {targets.model_id} are too hot for the "
                f"{targets.grade} temperature range"
            )

    # Field sensitivity: pick the derating that grows the single-shot rate
    # by the target fraction at the probe field strength.
    room_rate = single_shot_rate(t_fit, loc, scale, jitter, cap=cap)

    def field_err(pulse_scale: float) -> float:
        grown = single_shot_rate(t_fit * pulse_scale, loc, scale, jitter, cap=cap)
        return grown / room_rate - (1.0 + targets.field_increase)

    lo = 0.85
    if field_err(lo) < 0:
        # Distribution too flat for the probe to matter; keep fields inert.
        field_sensitivity = 1.0
    else:
        pulse_scale = brentq(field_err, lo, 1.0 - 1e-12, xtol=1e-12)
        field_sensitivity = pulse_scale ** (1.0 / targets.field_probe_mt)

    worst_threshold = cap * math.exp(temp_c * (t_max - REFERENCE_TEMP_C)) + clip * jitter
    return ChipProfile(
        model_id=targets.model_id,
        grade=targets.grade,
        capacity_words=targets.capacity_words,
        tau_params_1to0=(loc, scale),
        tau_params_0to1=(loc - math.log(2.0), scale),
        jitter_sigma=jitter,
        temp_coefficient=temp_c,
        relief_curve=_build_relief(worst_threshold, t_fit),
        word_correlation=rho,
        tau_cap_ns=cap,
        field_sensitivity=field_sensitivity,
        jitter_clip=clip,
        jitter_period=period,
    )
