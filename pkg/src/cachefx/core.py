"""Shared value types: access outcomes, statistics, address management."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ADDRESS_SPACE_LINES = 1 << 32


class AccessKind(enum.IntEnum):
    READ = 0
    WRITE = 1
    INVALIDATE = 2


@dataclass(frozen=True)
class AccessOutcome:
    """Result of a single cache request."""

    hit: bool
    evicted_address: int | None
    evicted_domain: int | None

    @property
    def evicted(self) -> bool:
        return self.evicted_address is not None


@dataclass(frozen=True)
class CacheStatistics:
    hits: int
    misses: int
    cross_domain_evictions: int
    accesses: int

    @property
    def hit_rate(self) -> float:
        return self.hits / self.accesses if self.accesses else 0.0


@dataclass(frozen=True)
class MemoryRegion:
    """A contiguous run of line addresses owned by one security domain."""

    base: int
    n_lines: int
    domain: int

    def line(self, i: int) -> int:
        if not 0 <= i < self.n_lines:
            raise IndexError(f"line {i} outside region of {self.n_lines}")
        return self.base + i

    def lines(self) -> np.ndarray:
        return np.arange(self.base, self.base + self.n_lines, dtype=np.int64)


class AddressSpace:
    """Allocates non-overlapping line-address regions to domains.

    Bases are randomized within a 2**32-line space so no experiment can lean
    on accidental low-address structure.
    """

    def __init__(self, seed: int | np.random.SeedSequence = 0):
        seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._rng = np.random.default_rng(seq)
        self._regions: list[MemoryRegion] = []

    def allocate(self, n_lines: int, domain: int = 0) -> MemoryRegion:
        if n_lines <= 0:
            raise ValueError("n_lines must be positive")
        for _ in range(10000):
            base = int(self._rng.integers(0, ADDRESS_SPACE_LINES - n_lines))
            if all(
                base + n_lines <= r.base or r.base + r.n_lines <= base
                for r in self._regions
            ):
                region = MemoryRegion(base, n_lines, domain)
                self._regions.append(region)
                return region
        raise RuntimeError("address space exhausted")


def spawn_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    """Independent child seeds for the sub-tasks of one experiment."""
    return np.random.SeedSequence(seed).spawn(n)


def seed_to_u64(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1, dtype=np.uint64)[0])
