"""Data-pattern descriptors for characterization and evaluation runs.

A descriptor is a short string such as ``solid:0000`` or ``random:7`` that
expands deterministically to one 16-bit word per address. Striped and
checkerboard layouts alternate between the base word and its complement at
word granularity, using a fixed logical row width, so a pattern like
``col-striped:aaaa`` still toggles at most 8 bits per word against a solid
reset. Bit-level reinterpretations (shifting the stripe inside the word)
would collapse some of these onto solid patterns and lose that property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PatternError

# Logical words per row when a 1-D address space is viewed as a 2-D array,
# used by the row/checkerboard layouts. 256 words keeps a 64K chip square.
ROW_WORDS = 256

_STRIPED_KINDS = ("solid", "row-striped", "col-striped", "checkerboard")


@dataclass(frozen=True)
class Pattern:
    """A parsed pattern descriptor.

    kind: one of solid | row-striped | col-striped | checkerboard | random.
    base: the base word for striped kinds, None for random.
    seed: the generator seed for random, None otherwise.
    """

    kind: str
    base: int | None = None
    seed: int | None = None

    @property
    def descriptor(self) -> str:
        if self.kind == "random":
            return f"random:{self.seed}"
        return f"{self.kind}:{self.base:04x}"

    def words(self, capacity_words: int) -> np.ndarray:
        """Expand to one uint16 word per address."""
        if self.kind == "random":
            rng = np.random.default_rng(self.seed)
            return rng.integers(0, 1 << 16, size=capacity_words, dtype=np.uint16)
        base = np.uint16(self.base)
        inverted = np.uint16(~self.base & 0xFFFF)
        if self.kind == "solid":
            return np.full(capacity_words, base, dtype=np.uint16)
        addr = np.arange(capacity_words)
        row = addr // ROW_WORDS
        col = addr % ROW_WORDS
        if self.kind == "row-striped":
            pick_base = row % 2 == 0
        elif self.kind == "col-striped":
            pick_base = col % 2 == 0
        else:  # checkerboard
            pick_base = (row + col) % 2 == 0
        return np.where(pick_base, base, inverted).astype(np.uint16)

    def __str__(self) -> str:
        return self.descriptor


def parse_pattern(descriptor: str) -> Pattern:
    """Parse a descriptor of the form ``kind:argument``.

    Striped kinds take a 4-digit hex word; ``random`` takes a decimal seed.
    """
    text = descriptor.strip().lower()
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise PatternError(
            f"pattern descriptor {descriptor!r} must look like 'kind:value'"
        )
    if kind == "random":
        try:
            seed = int(arg, 10)
        except ValueError:
            raise PatternError(
                f"random pattern seed {arg!r} is not a decimal integer"
            ) from None
        if seed < 0:
            raise PatternError("random pattern seed must be non-negative")
        return Pattern(kind="random", seed=seed)
    if kind in _STRIPED_KINDS:
        try:
            base = int(arg, 16)
        except ValueError:
            raise PatternError(
                f"pattern word {arg!r} is not a hexadecimal value"
            ) from None
        if not 0 <= base <= 0xFFFF:
            raise PatternError(f"pattern word {arg!r} does not fit in 16 bits")
        return Pattern(kind=kind, base=base)
    raise PatternError(
        f"unknown pattern kind {kind!r}; expected one of "
        f"{', '.join(_STRIPED_KINDS)}, random"
    )


def coerce_pattern(pattern: "Pattern | int | str") -> Pattern:
    """Accept a Pattern, a bare word (becomes solid), or a descriptor string."""
    if isinstance(pattern, Pattern):
        return pattern
    if isinstance(pattern, str):
        return parse_pattern(pattern)
    word = int(pattern)
    if not 0 <= word <= 0xFFFF:
        raise PatternError(f"pattern word {pattern!r} does not fit in 16 bits")
    return Pattern(kind="solid", base=word)
