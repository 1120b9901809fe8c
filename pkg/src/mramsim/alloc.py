"""Accurate/approximate address pools and critical-aware placement.

A characterized chip splits into the accurate pool (addresses with no
observed error, spent in ascending order) and the approximate pool (the
severity-sorted erroneous addresses, spent least-broken first). Critical
data may only ever land in the accurate pool and fails loudly when that
runs out; approximate data takes accurate addresses first while any remain
(a policy flag; the default maximizes quality), then walks the sorted
list, so whatever is stored always sees the least error available.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .characterize import ErrorMap, SortedAddressList
from .errors import AllocationError, PoolExhaustedError, TranslationFault
from .fileio import atomic_write_text

DEFAULT_BLOCK_BYTES = 32


@dataclass
class AddressPool:
    """Partition of a chip's address space with allocation cursors."""

    accurate: tuple[int, ...]
    approximate: SortedAddressList
    block_size: int = DEFAULT_BLOCK_BYTES
    _next_accurate: int = field(default=0, repr=False)
    _next_approximate: int = field(default=0, repr=False)

    @property
    def accurate_free(self) -> int:
        return len(self.accurate) - self._next_accurate

    @property
    def approximate_free(self) -> int:
        return len(self.approximate.entries) - self._next_approximate

    @property
    def allocated(self) -> int:
        return self._next_accurate + self._next_approximate

    @property
    def size(self) -> int:
        return len(self.accurate) + len(self.approximate.entries)

    def spent_approximate_severities(self) -> list[int]:
        return [
            entry.severity
            for entry in self.approximate.entries[: self._next_approximate]
        ]


def build_pool(
    error_map: ErrorMap,
    capacity_words: int,
    sorted_addresses: SortedAddressList,
    block_size: int = DEFAULT_BLOCK_BYTES,
) -> AddressPool:
    """Split the address space using a map and its severity ordering."""
    if capacity_words != error_map.capacity_words:
        raise AllocationError(
            f"capacity {capacity_words} does not match the error map's "
            f"{error_map.capacity_words}"
        )
    map_addrs = set(error_map.erroneous)
    sorted_addrs = [entry.address for entry in sorted_addresses.entries]
    if len(sorted_addrs) != len(set(sorted_addrs)) or set(sorted_addrs) != map_addrs:
        raise AllocationError(
            "sorted address list does not match the error map's addresses"
        )
    accurate = tuple(
        addr for addr in range(capacity_words) if addr not in map_addrs
    )
    return AddressPool(
        accurate=accurate, approximate=sorted_addresses, block_size=block_size
    )


def allocate(
    pool: AddressPool,
    words: int,
    critical: bool = False,
    accurate_first: bool = True,
) -> list[int]:
    """Take the next `words` physical addresses from the pool.

    Critical requests are confined to the accurate pool. Approximate
    requests honor the accurate_first policy, then consume the severity
    order; with the policy off they start on the approximate pool and only
    spill back to accurate once every erroneous address is spent.
    """
    if words < 1:
        raise AllocationError(f"allocation size must be at least 1, got {words}")
    if critical:
        if words > pool.accurate_free:
            raise PoolExhaustedError(
                f"critical request of {words} words exceeds the "
                f"{pool.accurate_free} accurate addresses remaining"
            )
        start = pool._next_accurate
        pool._next_accurate += words
        return list(pool.accurate[start : start + words])

    if words > pool.accurate_free + pool.approximate_free:
        raise AllocationError(
            f"request of {words} words exceeds the {pool.accurate_free + pool.approximate_free} "
            "addresses remaining in the pool"
        )
    taken: list[int] = []
    remaining = words
    sources = (
        ("accurate", "approximate") if accurate_first else ("approximate", "accurate")
    )
    for source in sources:
        if remaining == 0:
            break
        if source == "accurate":
            grab = min(remaining, pool.accurate_free)
            start = pool._next_accurate
            taken.extend(pool.accurate[start : start + grab])
            pool._next_accurate += grab
        else:
            grab = min(remaining, pool.approximate_free)
            start = pool._next_approximate
            taken.extend(
                entry.address
                for entry in pool.approximate.entries[start : start + grab]
            )
            pool._next_approximate += grab
        remaining -= grab
    return taken


@dataclass
class AllocationTable:
    """Virtual-to-physical mapping with the critical annotation."""

    mappings: dict[int, tuple[int, bool]] = field(default_factory=dict)
    tracking_structure_bits: int = 0

    def record(self, vaddr: int, paddr: int, critical: bool) -> None:
        if vaddr in self.mappings:
            raise AllocationError(f"virtual address {vaddr:#x} is already mapped")
        self.mappings[vaddr] = (int(paddr), bool(critical))

    def to_json_dict(self) -> dict:
        return {
            "tracking_structure_bits": self.tracking_structure_bits,
            "mappings": [
                {
                    "vaddr": f"0x{vaddr:08x}",
                    "paddr": f"0x{paddr:04x}",
                    "critical": critical,
                }
                for vaddr, (paddr, critical) in sorted(self.mappings.items())
            ],
        }

    def save(self, path: str | Path) -> None:
        atomic_write_text(path, json.dumps(self.to_json_dict(), indent=2) + "\n")


def translate(table: AllocationTable, vaddr: int) -> tuple[int, bool]:
    """Look up one virtual address; pure read."""
    try:
        return table.mappings[vaddr]
    except KeyError:
        raise TranslationFault(f"virtual address {vaddr:#x} is not mapped") from None


def map_request(
    pool: AddressPool,
    table: AllocationTable,
    virtual_addresses: list[int],
    critical: bool = False,
    accurate_first: bool = True,
) -> list[int]:
    """Allocate one physical address per virtual address and record them."""
    physical = allocate(
        pool, len(virtual_addresses), critical=critical, accurate_first=accurate_first
    )
    for vaddr, paddr in zip(virtual_addresses, physical):
        table.record(vaddr, paddr, critical)
    return physical


def tracking_overhead(memory_bytes: int, block_size: int = DEFAULT_BLOCK_BYTES) -> int:
    """Bits needed to flag every block of a memory as erroneous or clean."""
    if memory_bytes < 1 or block_size < 1:
        raise AllocationError(
            "memory_bytes and block_size must be positive, got "
            f"{memory_bytes} and {block_size}"
        )
    if memory_bytes % block_size:
        raise AllocationError(
            f"block size {block_size} does not divide the memory size {memory_bytes}"
        )
    return memory_bytes // block_size


def pool_summary(pool: AddressPool) -> dict:
    """Counts for the pool-summary CSV."""
    return {
        "accurate_words": len(pool.accurate),
        "approximate_words": len(pool.approximate.entries),
        "accurate_fraction": len(pool.accurate) / pool.size if pool.size else 0.0,
        "allocated_words": pool.allocated,
        "block_size": pool.block_size,
    }
