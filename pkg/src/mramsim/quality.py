"""Image write-back experiments and the SNR/MSE quality metrics.

An experiment resets the chip to a background value, writes the image's
pixels at reduced pulse width (one pixel per word in the low byte by
default), reads everything back at rated timing, and scores the result.
The background matters: over an all-zeros background a pixel write toggles
at most 8 bits, which the relief mechanism makes safe, while an all-ones
background forces 8 to 16 toggles per word, the vulnerable direction, and
that is the case address selection exists for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alloc import AddressPool, allocate
from .device import NOMINAL_ENV, NOMINAL_TIMINGS, ChipModel, Environment
from .errors import AddressError, AllocationError, FileFormatError
from .fileio import atomic_write_bytes

INITS = ("all_ones", "all_zeros")
SELECTIONS = ("none", "strategy1")


@dataclass(frozen=True)
class ImageBuffer:
    """A grayscale image, 8 bits per pixel."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise FileFormatError("image must be a non-empty 2-D pixel array")
        if arr.dtype != np.uint8:
            if not (
                np.issubdtype(arr.dtype, np.integer)
                and arr.min() >= 0
                and arr.max() <= 255
            ):
                raise FileFormatError("pixel values must be integers in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def pixel_count(self) -> int:
        return self.pixels.size


def read_pgm(path: str | Path) -> ImageBuffer:
    """Read a binary PGM (P5, maxval 255)."""
    raw = Path(path).read_bytes()
    if raw[:2] != b"P5":
        raise FileFormatError(f"{path}: not a binary PGM (P5) file")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        if pos >= len(raw):
            raise FileFormatError(f"{path}: truncated PGM header")
        ch = raw[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            pos = raw.find(b"\n", pos)
            if pos < 0:
                raise FileFormatError(f"{path}: unterminated PGM comment")
        elif ch.isdigit():
            end = pos
            while end < len(raw) and raw[end : end + 1].isdigit():
                end += 1
            fields.append(int(raw[pos:end]))
            pos = end
        else:
            raise FileFormatError(f"{path}: malformed PGM header")
    width, height, maxval = fields
    if maxval != 255:
        raise FileFormatError(f"{path}: only maxval 255 is supported, got {maxval}")
    if width < 1 or height < 1:
        raise FileFormatError(f"{path}: bad dimensions {width}x{height}")
    pos += 1  # single whitespace byte after the header
    data = raw[pos : pos + width * height]
    if len(data) != width * height:
        raise FileFormatError(
            f"{path}: expected {width * height} pixel bytes, found {len(data)}"
        )
    return ImageBuffer(np.frombuffer(data, dtype=np.uint8).reshape(height, width))


def write_pgm(image: ImageBuffer, path: str | Path) -> None:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + image.pixels.tobytes())


def _check_dims(original: ImageBuffer, approx: ImageBuffer) -> None:
    if original.pixels.shape != approx.pixels.shape:
        raise FileFormatError(
            f"image dimensions differ: {original.height}x{original.width} vs "
            f"{approx.height}x{approx.width}"
        )


def snr(original: ImageBuffer, approx: ImageBuffer) -> float:
    """Signal-to-noise ratio of the read-back image, as a plain ratio.

    Signal power is the sum of squared read-back pixels; noise power the
    sum of squared differences. A perfect round trip has zero noise and
    the ratio is +infinity by convention.
    """
    _check_dims(original, approx)
    f = original.pixels.astype(np.int64)
    f_hat = approx.pixels.astype(np.int64)
    noise = int(((f_hat - f) ** 2).sum())
    if noise == 0:
        return math.inf
    return float(int((f_hat**2).sum()) / noise)


def mse(original: ImageBuffer, approx: ImageBuffer) -> float:
    """Mean squared pixel error. Exact integer arithmetic before division."""
    _check_dims(original, approx)
    f = original.pixels.astype(np.int64)
    f_hat = approx.pixels.astype(np.int64)
    return float(int(((f_hat - f) ** 2).sum()) / original.pixel_count)


@dataclass(frozen=True)
class QualityReport:
    image: str
    init: str
    selection: str
    t_w_ns: float
    snr: float
    mse: float
    erroneous_pixels: int

    @property
    def snr_db(self) -> float:
        if math.isinf(self.snr):
            return math.inf
        if self.snr <= 0:
            return -math.inf
        return 10.0 * math.log10(self.snr)


def run_image_experiment(
    chip: ChipModel,
    image: ImageBuffer,
    init: str = "all_ones",
    selection: str = "none",
    t_w_ns: float = 5.0,
    env: Environment = NOMINAL_ENV,
    pool: AddressPool | None = None,
    pack_two_per_word: bool = False,
    image_label: str = "image",
) -> tuple[ImageBuffer, QualityReport]:
    """Write an image at reduced pulse width and score the read-back.

    With selection strategy1 the pixel words go to pool addresses in
    least-error-first order (accurate addresses while they last); the pool
    should come from a full characterization of this chip at the same or
    harsher settings, otherwise leak-free placement is not guaranteed.
    """
    if init not in INITS:
        raise FileFormatError(f"init must be one of {INITS}, got {init!r}")
    if selection not in SELECTIONS:
        raise FileFormatError(
            f"selection must be one of {SELECTIONS}, got {selection!r}"
        )
    flat = image.pixels.reshape(-1)
    if pack_two_per_word:
        padded = flat
        if flat.size % 2:
            padded = np.concatenate([flat, np.zeros(1, dtype=np.uint8)])
        words = (
            padded[0::2].astype(np.uint16)
            | (padded[1::2].astype(np.uint16) << 8)
        )
    else:
        words = flat.astype(np.uint16)
    n_words = words.size
    if n_words > chip.capacity_words:
        raise AddressError(
            f"image needs {n_words} words but the chip holds only "
            f"{chip.capacity_words}"
        )

    if selection == "strategy1":
        if pool is None:
            raise AllocationError("selection strategy1 requires an address pool")
        addrs = np.asarray(
            allocate(pool, n_words, critical=False, accurate_first=True),
            dtype=np.int64,
        )
    else:
        addrs = np.arange(n_words, dtype=np.int64)

    chip.reset(0xFFFF if init == "all_ones" else 0x0000)
    order = np.argsort(addrs, kind="stable")
    chip.write_many(addrs[order], words[order], NOMINAL_TIMINGS.with_t_w(t_w_ns), env)
    stored = chip.read_block(addrs)

    if pack_two_per_word:
        low = (stored & 0x00FF).astype(np.uint8)
        high = ((stored >> 8) & 0x00FF).astype(np.uint8)
        restored = np.empty(low.size * 2, dtype=np.uint8)
        restored[0::2] = low
        restored[1::2] = high
        restored = restored[: flat.size]
    else:
        restored = (stored & 0x00FF).astype(np.uint8)
    read_back = ImageBuffer(restored.reshape(image.pixels.shape))

    report = QualityReport(
        image=image_label,
        init=init,
        selection=selection,
        t_w_ns=float(t_w_ns),
        snr=snr(image, read_back),
        mse=mse(image, read_back),
        erroneous_pixels=int((read_back.pixels != image.pixels).sum()),
    )
    return read_back, report


def format_metric(value: float) -> str:
    """CSV rendering for metric values; infinity spells 'inf'."""
    if math.isinf(value):
        return "inf"
    return f"{value:.6f}"


QUALITY_CSV_HEADER = "image,init,selection,t_w_ns,snr,mse,erroneous_pixels"


def quality_csv_row(report: QualityReport) -> str:
    return ",".join(
        [
            report.image,
            report.init,
            report.selection,
            f"{report.t_w_ns:g}",
            format_metric(report.snr),
            format_metric(report.mse),
            str(report.erroneous_pixels),
        ]
    )


def append_quality_row(csv_path: str | Path, report: QualityReport) -> None:
    """Append one report row, creating the file with a header if needed."""
    path = Path(csv_path)
    line = quality_csv_row(report) + "\n"
    if path.exists():
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(QUALITY_CSV_HEADER + "\n" + line, encoding="utf-8")
