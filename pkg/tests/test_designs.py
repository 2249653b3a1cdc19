"""The nine cache designs: index functions, isolation, determinism.

Oracle notes:
  [DERIVED] keyed-permutation bijectivity checked exhaustively; isolation
  and pinning checked through observable residency, not internals;
  degenerate configurations replayed against their plain equivalents.
  [TRIVIAL] constructor validation.
"""

import numpy as np
import pytest

from cachefx import _kernels as K
from cachefx.cache import DESIGNS, make_cache

GEOMS = {
    "assoc": dict(n_lines=256, ways=4),
    "fullyassoc": dict(n_lines=64, ways=64),
    "waypart": dict(n_lines=256, ways=4),
    "plcache": dict(n_lines=256, ways=4),
    "ceaser": dict(n_lines=256, ways=4),
    "ceaser-s": dict(n_lines=256, ways=4),
    "scatter": dict(n_lines=256, ways=4),
    "newcache": dict(n_lines=256, ways=256),
    "phantom": dict(n_lines=256, ways=4),
}


@pytest.mark.parametrize("bits", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("key", [0, 1, 0xDEADBEEF, (1 << 64) - 1])
def test_feistel_permute_bijective(bits, key):
    # [DERIVED] exhaustive over all 2**(2*bits) inputs (index width <= 10 bits)
    n = 1 << (2 * bits)
    outs = {int(K.feistel_permute(np.int64(v), np.uint64(key), np.int64(bits)))
            for v in range(n)}
    assert outs == set(range(n))


@pytest.mark.parametrize("design", DESIGNS)
def test_determinism_replay(design):
    # [DERIVED] two instances with the same seed replay a mixed trace with
    # identical hits and identical evicted addresses
    g = GEOMS[design]
    a = make_cache(design, g["n_lines"], g["ways"], policy="random", seed=11)
    b = make_cache(design, g["n_lines"], g["ways"], policy="random", seed=11)
    rng = np.random.default_rng(0)
    for _ in range(3000):
        addr = int(rng.integers(0, 4 * g["n_lines"]))
        dom = int(rng.integers(0, 2))
        oa, ob = a.access(addr, dom), b.access(addr, dom)
        assert (oa.hit, oa.evicted_address, oa.evicted_domain) == \
               (ob.hit, ob.evicted_address, ob.evicted_domain)
    assert a.statistics(0) == b.statistics(0)
    assert a.statistics(1) == b.statistics(1)


@pytest.mark.parametrize("design", DESIGNS)
def test_seed_changes_behavior_or_not(design):
    # keyed designs must remap with the seed; unkeyed ones must not
    g = GEOMS[design]
    a = make_cache(design, g["n_lines"], g["ways"], seed=1)
    b = make_cache(design, g["n_lines"], g["ways"], seed=2)
    keyed = design in ("ceaser", "ceaser-s", "scatter", "phantom")
    probe = range(4 * g["n_lines"])
    sets_a = [tuple(a.candidate_sets(x)) for x in probe]
    sets_b = [tuple(b.candidate_sets(x)) for x in probe]
    if keyed:
        assert sets_a != sets_b
    else:
        assert sets_a == sets_b


def test_assoc_full_ways_equals_fullyassoc():
    # [DERIVED] degenerate equivalence: one set of n ways is fully associative
    a = make_cache("assoc", 64, 64, policy="lru", seed=4)
    b = make_cache("fullyassoc", 64, 64, policy="lru", seed=4)
    rng = np.random.default_rng(8)
    for _ in range(5000):
        addr = int(rng.integers(0, 200))
        oa, ob = a.access(addr), b.access(addr)
        assert (oa.hit, oa.evicted_address) == (ob.hit, ob.evicted_address)


def test_ceaser_s_one_partition_equals_ceaser():
    # [DERIVED] degenerate equivalence under a shared seed
    a = make_cache("ceaser", 256, 4, seed=9)
    b = make_cache("ceaser-s", 256, 4, seed=9, partitions=1)
    rng = np.random.default_rng(21)
    for _ in range(5000):
        addr = int(rng.integers(0, 1024))
        oa, ob = a.access(addr), b.access(addr)
        assert (oa.hit, oa.evicted_address) == (ob.hit, ob.evicted_address)


@pytest.mark.parametrize("design", DESIGNS)
def test_fill_capacity(design):
    g = GEOMS[design]
    cache = make_cache(design, g["n_lines"], g["ways"], seed=5)
    cap = cache.fill_capacity(domain=0)
    if design == "waypart":
        assert cap == g["n_lines"] // 2        # half the ways per domain
    else:
        assert cap == g["n_lines"]


def test_waypart_isolation():
    # [DERIVED] domain 1 can never displace domain 0's lines
    cache = make_cache("waypart", 256, 4, seed=6)
    mine = list(range(128))
    for a in mine:
        cache.access(a, domain=0)
    resident_before = cache.resident_count(0)
    rng = np.random.default_rng(2)
    for _ in range(20_000):
        cache.access(1_000_000 + int(rng.integers(0, 4096)), domain=1)
    assert cache.resident_count(0) == resident_before
    assert cache.statistics(0).cross_domain_evictions == 0


def test_plcache_pinned_victim_survives():
    # [DERIVED] pinned domain-1 lines stay resident under a domain-0 flood
    cache = make_cache("plcache", 256, 4, seed=6, pin_domains=(1,))
    victims = [7, 71, 135, 199]
    for v in victims:
        cache.access(v, domain=1)
    rng = np.random.default_rng(3)
    for _ in range(50_000):
        cache.access(10_000 + int(rng.integers(0, 4096)), domain=0)
    for v in victims:
        assert cache.contains(v)


def test_plcache_unpinned_behaves_like_assoc():
    a = make_cache("plcache", 256, 4, policy="lru", seed=0)
    b = make_cache("assoc", 256, 4, policy="lru", seed=0)
    rng = np.random.default_rng(17)
    for _ in range(5000):
        addr = int(rng.integers(0, 1024))
        oa, ob = a.access(addr), b.access(addr)
        assert (oa.hit, oa.evicted_address) == (ob.hit, ob.evicted_address)


@pytest.mark.parametrize("design", ["assoc", "ceaser", "ceaser-s", "scatter", "phantom"])
def test_collides_matches_observed_contention(design):
    # [DERIVED] if the oracle says two lines cannot contend, an LRU-full prime
    # of one must never evict the other; if it says they can, eviction must be
    # observable. Checked by direct simulation on a small LRU cache.
    cache = make_cache(design, 64, 4, policy="lru", seed=13)
    rng = np.random.default_rng(4)
    checked_pos = checked_neg = 0
    for _ in range(400):
        v = int(rng.integers(0, 1 << 20))
        others = [int(x) for x in rng.integers(1 << 20, 1 << 21, size=64)]
        colliders = [o for o in others if cache.collides(o, 0, v, 0)][: 4 * len(cache.candidate_sets(v))]
        non = [o for o in others if not cache.collides(o, 0, v, 0)]
        cache.flush()
        cache.access(v)
        for o in non[:40]:
            cache.access(o)
        if not cache.contains(v):
            raise AssertionError("non-colliding lines evicted the victim")
        checked_neg += 1
        if design in ("assoc", "ceaser") and len(colliders) >= 4:
            cache.flush()
            cache.access(v)
            for o in colliders[:8]:
                cache.access(o)
            assert not cache.contains(v)
            checked_pos += 1
    assert checked_neg > 100
    if design in ("assoc", "ceaser"):
        assert checked_pos > 50


def test_invalidate_removes_line(small_cache):
    small_cache.access(5)
    assert small_cache.contains(5)
    small_cache.invalidate(5)
    assert not small_cache.contains(5)


def test_statistics_count_hits_and_misses(small_cache):
    small_cache.access(1)
    small_cache.access(1)
    small_cache.access(2)
    s = small_cache.statistics(0)
    assert (s.hits, s.misses, s.accesses) == (1, 2, 3)
    small_cache.reset_statistics()
    assert small_cache.statistics(0).accesses == 0


def test_constructor_validation():
    # [TRIVIAL]
    with pytest.raises(ValueError):
        make_cache("nope", 64, 4)
    with pytest.raises(ValueError):
        make_cache("assoc", 60, 4)            # not a power of two
    with pytest.raises(ValueError):
        make_cache("assoc", 64, 3)            # ways not a power of two
    with pytest.raises(ValueError):
        make_cache("assoc", 64, 4, policy="mru")
    with pytest.raises(ValueError):
        make_cache("assoc", 64, 4, partitions=2)   # not a skewed design
    with pytest.raises(ValueError):
        make_cache("ceaser-s", 64, 4, partitions=3)
