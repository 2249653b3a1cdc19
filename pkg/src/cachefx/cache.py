"""The nine cache designs behind one access interface."""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .core import AccessKind, AccessOutcome, CacheStatistics

DESIGNS = (
    "assoc",
    "fullyassoc",
    "waypart",
    "plcache",
    "ceaser",
    "ceaser-s",
    "scatter",
    "newcache",
    "phantom",
)

POLICIES = {
    "random": K.POL_RANDOM,
    "lru": K.POL_LRU,
    "bitplru": K.POL_BITPLRU,
    "treeplru": K.POL_TREEPLRU,
}


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


class Cache:
    """A simulated cache: every design boils down to one jitted state record.

    Addresses are line granular (no offsets within a line) and tagged with the
    security domain of the requester.
    """

    def __init__(
        self,
        design: str,
        n_lines: int,
        ways: int,
        policy: str = "random",
        seed: int = 0,
        n_domains: int = 2,
        partitions: int | None = None,
        phantom_r: int = 8,
        newcache_k: int = 4,
        pin_domains: tuple[int, ...] = (),
    ):
        if design not in DESIGNS:
            raise ValueError(f"unknown design {design!r}; expected one of {DESIGNS}")
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r}; expected one of {tuple(POLICIES)}")
        if not _is_pow2(n_lines):
            raise ValueError("n_lines must be a power of two")
        if n_domains < 1 or n_domains > 62:
            raise ValueError("n_domains must be in [1, 62]")

        if design == "fullyassoc":
            ways = n_lines
        if design != "newcache":
            if not _is_pow2(ways) or ways > n_lines:
                raise ValueError("ways must be a power of two dividing n_lines")

        self.design = design
        self.n_lines = n_lines
        self.ways = ways
        self.policy = policy
        self.n_domains = n_domains
        self.seed = seed
        self.pin_domains = tuple(pin_domains)

        family = K.FAM_SETASSOC
        sets = n_lines // ways
        parts = 1
        scatter = 0
        nc_n = nc_k = 0
        pinmask = 0
        wrange = np.zeros(0, dtype=np.int64)
        n_keys = 1

        if design == "waypart":
            if ways % n_domains:
                raise ValueError("waypart needs ways divisible by n_domains")
            per = ways // n_domains
            wrange = np.zeros(2 * n_domains, dtype=np.int64)
            for d in range(n_domains):
                wrange[2 * d] = d * per
                wrange[2 * d + 1] = (d + 1) * per
            if policy == "treeplru" and not _is_pow2(per):
                raise ValueError("treeplru needs a power-of-two way slice")
        elif design == "plcache":
            for d in pin_domains:
                pinmask |= 1 << d
        elif design in ("ceaser", "ceaser-s", "scatter"):
            family = K.FAM_SKEW
            if design == "ceaser":
                parts = 1
            elif design == "ceaser-s":
                parts = 2 if partitions is None else partitions
            else:
                parts = ways if partitions is None else partitions
                scatter = 1
            if ways % parts or not _is_pow2(parts):
                raise ValueError("partitions must be a power of two dividing ways")
            if policy == "treeplru" and not _is_pow2(ways // parts):
                raise ValueError("treeplru needs a power-of-two way slice")
            n_keys = parts
        elif design == "newcache":
            family = K.FAM_NEWCACHE
            sets, ways = 1, n_lines
            nc_n = n_lines.bit_length() - 1
            nc_k = newcache_k
        elif design == "phantom":
            family = K.FAM_PHANTOM
            if phantom_r < 1:
                raise ValueError("phantom_r must be positive")
            n_keys = phantom_r

        if partitions is not None and design not in ("ceaser-s", "scatter"):
            raise ValueError(f"design {design!r} takes no partitions parameter")

        self.sets = sets
        self.partitions = parts
        self.phantom_r = phantom_r
        self.newcache_k = nc_k

        cfg = np.zeros(12, dtype=np.int64)
        cfg[K.F_FAMILY] = family
        cfg[K.F_SETS] = sets
        cfg[K.F_WAYS] = ways
        cfg[K.F_POLICY] = POLICIES[policy]
        cfg[K.F_PARTS] = parts
        cfg[K.F_PHANTOM_R] = phantom_r
        cfg[K.F_NC_N] = nc_n
        cfg[K.F_NC_K] = nc_k
        cfg[K.F_NDOM] = n_domains
        cfg[K.F_SCATTER] = scatter
        cfg[K.F_PINMASK] = pinmask
        cfg[K.F_SETBITS] = sets.bit_length() - 1

        slots = sets * ways
        cam_size = (n_domains << (nc_n + nc_k)) if design == "newcache" else 0
        base = np.uint64(K.mix64(np.uint64(seed) ^ np.uint64(0xC0FFEE)))
        keys = np.array(
            [K.mix64(base + np.uint64(i + 1)) for i in range(n_keys)],
            dtype=np.uint64,
        )
        self._st = K.CacheState(
            cfg=cfg,
            tags=np.full(slots, -1, dtype=np.int64),
            owners=np.full(slots, -1, dtype=np.int64),
            pinned=np.zeros(slots, dtype=np.uint8),
            meta=np.zeros(slots, dtype=np.int64),
            tree=np.zeros(slots, dtype=np.uint8),
            wrange=wrange,
            keys=keys,
            cam=np.full(cam_size, -1, dtype=np.int64),
            rng=np.array([K.mix64(np.uint64(seed) ^ np.uint64(0xD1CE))], dtype=np.uint64),
            clock=np.zeros(1, dtype=np.int64),
            stats=np.zeros(4 * n_domains, dtype=np.int64),
        )

    # -- the access interface ------------------------------------------------

    @property
    def state(self) -> K.CacheState:
        return self._st

    def access(self, addr: int, domain: int = 0, kind: AccessKind = AccessKind.READ) -> AccessOutcome:
        self._check_domain(domain)
        hit, ea, ed = K.access(self._st, np.int64(addr), np.int64(domain), np.int64(int(kind)))[:3]
        if ea == -1:
            return AccessOutcome(bool(hit), None, None)
        return AccessOutcome(bool(hit), int(ea), int(ed))

    def read(self, addr: int, domain: int = 0) -> AccessOutcome:
        return self.access(addr, domain, AccessKind.READ)

    def write(self, addr: int, domain: int = 0) -> AccessOutcome:
        return self.access(addr, domain, AccessKind.WRITE)

    def invalidate(self, addr: int, domain: int = 0) -> AccessOutcome:
        return self.access(addr, domain, AccessKind.INVALIDATE)

    def contains(self, addr: int) -> bool:
        return bool(K.contains(self._st, np.int64(addr)))

    def flush(self) -> None:
        K.flush(self._st)

    def resident_count(self, domain: int) -> int:
        return int(K.resident_count(self._st, np.int64(domain)))

    def statistics(self, domain: int = 0) -> CacheStatistics:
        self._check_domain(domain)
        s = self._st.stats
        return CacheStatistics(
            hits=int(s[4 * domain]),
            misses=int(s[4 * domain + 1]),
            cross_domain_evictions=int(s[4 * domain + 2]),
            accesses=int(s[4 * domain + 3]),
        )

    def reset_statistics(self) -> None:
        self._st.stats[:] = 0

    def _check_domain(self, domain: int) -> None:
        if not 0 <= domain < self.n_domains:
            raise ValueError(f"domain {domain} outside [0, {self.n_domains})")

    # -- evaluation-side helpers (never used by set construction) ------------

    def candidate_sets(self, addr: int, domain: int = 0) -> list[int]:
        """Every set index this address may land in."""
        st = self._st
        if self.design == "newcache":
            return [0]
        if st.cfg[K.F_FAMILY] == K.FAM_SKEW:
            bits = self.sets.bit_length() - 1
            scatter = int(st.cfg[K.F_SCATTER])
            return [
                int(K.skew_index(st.keys, scatter, bits, p, np.int64(domain), np.int64(addr)))
                for p in range(self.partitions)
            ]
        if st.cfg[K.F_FAMILY] == K.FAM_PHANTOM:
            return sorted({
                int(K.phantom_index(st.keys, np.int64(self.sets), np.int64(addr), i))
                for i in range(self.phantom_r)
            })
        return [addr % self.sets]

    def collides(self, a: int, dom_a: int, b: int, dom_b: int) -> bool:
        """Whether the two lines can deterministically contend for a slot.

        This is an oracle over the index functions -- the judge's view of the
        cache, used to evaluate eviction sets, not to build them.
        """
        st = self._st
        if self.design == "fullyassoc":
            return True
        if self.design == "newcache":
            # Replacement on an index miss is uniform over the whole CAM, so
            # any line can displace any other, exactly as in a
            # fully-associative cache.
            return True
        if self.design == "waypart":
            if dom_a != dom_b:
                return False
            return a % self.sets == b % self.sets
        if st.cfg[K.F_FAMILY] == K.FAM_SKEW:
            bits = self.sets.bit_length() - 1
            scatter = int(st.cfg[K.F_SCATTER])
            for p in range(self.partitions):
                ia = K.skew_index(st.keys, scatter, bits, p, np.int64(dom_a), np.int64(a))
                ib = K.skew_index(st.keys, scatter, bits, p, np.int64(dom_b), np.int64(b))
                if ia == ib:
                    return True
            return False
        if st.cfg[K.F_FAMILY] == K.FAM_PHANTOM:
            sa = set(self.candidate_sets(a, dom_a))
            return any(s in sa for s in self.candidate_sets(b, dom_b))
        return a % self.sets == b % self.sets

    def fill_capacity(self, domain: int = 0, chunk_base: int = 0, chunk_n: int | None = None) -> int:
        """Lines this domain can keep resident at once, measured empirically.

        Fills from a random address pool until residency stops growing.  The
        cache is flushed first and left filled.
        """
        if chunk_n is None:
            chunk_n = 16 * self.n_lines
        self.flush()
        rng = np.random.default_rng(self.seed ^ 0x5EED)
        prev = -1
        while True:
            addrs = chunk_base + rng.integers(0, chunk_n, size=4 * self.n_lines, dtype=np.int64)
            K.sweep(self._st, addrs, np.int64(domain))
            cur = self.resident_count(domain)
            if cur == prev:
                return cur
            prev = cur


def make_cache(design: str, n_lines: int, ways: int, policy: str = "random",
               seed: int = 0, **kwargs) -> Cache:
    """Build one of the nine designs by name."""
    return Cache(design, n_lines, ways, policy=policy, seed=seed, **kwargs)
