"""Counter-based pseudo-random draws for the device model.

The per-write jitter of a cell must be reproducible without storing it:
the same (chip seed, word, bit, slot) tuple has to yield the same value on
every visit, across process restarts, regardless of visit order. We get
that by hashing the tuple with a splitmix64 finalizer and mapping the
64-bit output through the inverse normal CDF. Construction-time draws
(per-cell switching thresholds) do not need addressing by counter and use
a numpy Generator instead.
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy.special import ndtri

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_S30 = _U64(30)
_S27 = _U64(27)
_S31 = _U64(31)
_S11 = _U64(11)
_INV_2_53 = float(2.0**-53)


def splitmix64(x: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """Finalizer of the splitmix64 generator, vectorized over uint64."""
    with np.errstate(over="ignore"):
        z = (np.asarray(x, dtype=_U64) + _GOLDEN).astype(_U64)
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        z = z ^ (z >> _S31)
    return z


def derive_key(seed: int, label: str) -> np.uint64:
    """Stable 64-bit subkey for one named stream of a seeded chip."""
    digest = hashlib.blake2b(
        label.encode("ascii") + b"\x00" + str(int(seed)).encode("ascii"),
        digest_size=8,
    ).digest()
    return _U64(int.from_bytes(digest, "little"))


def hashed_uniform(key: np.uint64, lanes: np.ndarray) -> np.ndarray:
    """Uniform(0, 1) draws addressed by lane index under a fixed key."""
    h = splitmix64(splitmix64(lanes.astype(_U64)) ^ _U64(key))
    # Top 53 bits, centered on the half-integer grid so 0 and 1 are excluded.
    return ((h >> _S11).astype(np.float64) + 0.5) * _INV_2_53


def hashed_normal(key: np.uint64, lanes: np.ndarray) -> np.ndarray:
    """Standard normal draws addressed by lane index under a fixed key."""
    return ndtri(hashed_uniform(key, lanes))


def construction_rng(seed: int, model_id: str) -> np.random.Generator:
    """Generator for one-time construction draws of a seeded chip."""
    entropy = int(derive_key(seed, "construct:" + model_id))
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**63 - 1), entropy]))
