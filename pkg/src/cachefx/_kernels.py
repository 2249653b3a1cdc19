"""Jitted state machines behind every cache design.

All caches share one flat state layout (a namedtuple of numpy arrays) so the
hot loops -- per-access updates, bulk sweeps, eviction-distribution sampling --
run inside numba without Python dispatch.  The access path takes the state
arrays as individual arguments: routing the whole namedtuple through the call
boundary defeats LLVM's scalar replacement and costs about 3x in throughput,
so each bulk driver unpacks it once up front.

The Python-facing classes in cache.py own construction and validation;
nothing in here is meant to be called by users directly.
"""

from collections import namedtuple

import numpy as np
from numba import int64, njit, uint64

CacheState = namedtuple(
    "CacheState",
    [
        "cfg",     # int64 config vector, see F_* below
        "tags",    # int64[slots], -1 = empty
        "owners",  # int64[slots], owning domain of each line
        "pinned",  # uint8[slots], PLCache pin bits
        "meta",    # int64[slots], LRU timestamps / bit-PLRU MRU bits
        "tree",    # uint8[slots], tree-PLRU node bits (per-set, slice-offset)
        "wrange",  # int64[2*ndomains], way range per domain (way partitioning)
        "keys",    # uint64[n], index-function keys
        "cam",     # int64[...], inverted index for the CAM design
        "rng",     # uint64[1], splitmix64 state
        "clock",   # int64[1], LRU clock
        "stats",   # int64[4*ndomains]: hits, misses, cross evictions, accesses
    ],
)

# cfg offsets
F_FAMILY = 0
F_SETS = 1
F_WAYS = 2
F_POLICY = 3
F_PARTS = 4
F_PHANTOM_R = 5
F_NC_N = 6
F_NC_K = 7
F_NDOM = 8
F_SCATTER = 9
F_PINMASK = 10
F_SETBITS = 11

FAM_SETASSOC = 0
FAM_SKEW = 1
FAM_NEWCACHE = 2
FAM_PHANTOM = 3

POL_RANDOM = 0
POL_LRU = 1
POL_BITPLRU = 2
POL_TREEPLRU = 3

KIND_READ = 0
KIND_WRITE = 1
KIND_INVALIDATE = 2

GOLDEN = uint64(0x9E3779B97F4A7C15)


@njit(cache=True, inline="always")
def _mix64(z):
    z = uint64(z)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _rand(rng):
    rng[0] = uint64(rng[0]) + GOLDEN
    return _mix64(rng[0])


@njit(cache=True, inline="always")
def _randint(rng, n):
    return int64(_rand(rng) % uint64(n))


@njit(cache=True)
def feistel_permute(value, key, bits):
    """Keyed permutation of the low 2*bits bits of ``value``."""
    mask = uint64((1 << bits) - 1)
    left = (uint64(value) >> uint64(bits)) & mask
    right = uint64(value) & mask
    for rnd in range(4):
        rk = _mix64(uint64(key) ^ (uint64(rnd + 1) * GOLDEN))
        f = _mix64(right ^ rk) & mask
        left, right = right, left ^ f
    return int64((left << uint64(bits)) | right)


@njit(cache=True, inline="always")
def _feistel_index(value, key, bits):
    return int64(uint64(feistel_permute(value, key, bits)) & uint64((1 << bits) - 1))


@njit(cache=True, inline="always")
def _skew_key(keys, scatter, part, domain):
    k = keys[part]
    if scatter != 0:
        k = _mix64(uint64(k) ^ _mix64(uint64(domain) + uint64(0xA5A5A5A5)))
    return k


@njit(cache=True, inline="always")
def _phantom_set(keys, sets, addr, i):
    return int64(_mix64(uint64(addr) ^ uint64(keys[i])) & uint64(sets - 1))


# ---------------------------------------------------------------------------
# replacement policy helpers (operate on the way range [lo, hi) of one set)

@njit(cache=True, inline="always")
def _touch(cfg, meta, tree, clock, set_idx, way, lo, hi):
    pol = cfg[F_POLICY]
    if pol == POL_RANDOM:
        return
    ways = cfg[F_WAYS]
    slot = set_idx * ways + way
    if pol == POL_LRU:
        clock[0] += 1
        meta[slot] = clock[0]
    elif pol == POL_BITPLRU:
        meta[slot] = 1
        full = True
        base = set_idx * ways
        for w in range(lo, hi):
            if meta[base + w] == 0:
                full = False
                break
        if full:
            for w in range(lo, hi):
                meta[base + w] = 0
            meta[slot] = 1
    else:  # POL_TREEPLRU
        size = hi - lo
        rel = way - lo
        tbase = set_idx * ways + lo
        node = 0
        low = 0
        while size > 1:
            half = size >> 1
            if rel < low + half:
                tree[tbase + node] = 1  # next victim on the right
                node = 2 * node + 1
            else:
                tree[tbase + node] = 0
                node = 2 * node + 2
                low += half
            size = half


@njit(cache=True, inline="always")
def _victim_way(cfg, tags, owners, pinned, meta, tree, rng, set_idx, lo, hi, domain):
    """Pick the way to fill in [lo, hi): free ways first, then the policy.

    Ways pinned by a different domain are never chosen; returns -1 when
    nothing may be replaced.
    """
    ways = cfg[F_WAYS]
    base = set_idx * ways
    for w in range(lo, hi):
        if tags[base + w] == -1:
            return w
    pol = cfg[F_POLICY]
    if pol == POL_RANDOM:
        if cfg[F_PINMASK] == 0:
            return lo + _randint(rng, hi - lo)
        n = 0
        for w in range(lo, hi):
            if pinned[base + w] == 0 or owners[base + w] == domain:
                n += 1
        if n == 0:
            return -1
        k = _randint(rng, n)
        for w in range(lo, hi):
            if pinned[base + w] == 0 or owners[base + w] == domain:
                if k == 0:
                    return w
                k -= 1
        return -1
    if pol == POL_LRU:
        best = -1
        best_t = int64(0x7FFFFFFFFFFFFFFF)
        for w in range(lo, hi):
            if pinned[base + w] != 0 and owners[base + w] != domain:
                continue
            if meta[base + w] < best_t:
                best_t = meta[base + w]
                best = w
        return best
    if pol == POL_BITPLRU:
        for w in range(lo, hi):
            if pinned[base + w] != 0 and owners[base + w] != domain:
                continue
            if meta[base + w] == 0:
                return w
        for w in range(lo, hi):
            if pinned[base + w] == 0 or owners[base + w] == domain:
                return w
        return -1
    # POL_TREEPLRU
    size = hi - lo
    tbase = base + lo
    node = 0
    low = 0
    while size > 1:
        half = size >> 1
        if tree[tbase + node] == 0:
            node = 2 * node + 1
        else:
            node = 2 * node + 2
            low += half
        size = half
    w = lo + low
    if pinned[base + w] == 0 or owners[base + w] == domain:
        return w
    for w in range(lo, hi):
        if pinned[base + w] == 0 or owners[base + w] == domain:
            return w
    return -1


# ---------------------------------------------------------------------------
# the unified access path

@njit(cache=True, inline="always")
def _access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng,
            clock, stats, addr, domain, kind):
    """One cache request.  Returns (hit, evicted_addr, evicted_domain, filled).

    evicted_addr is -1 when the access displaced nothing; filled is 1 when the
    miss actually installed the line (0 for invalidates and for bypass misses
    where no way was replaceable).
    """
    fam = cfg[F_FAMILY]
    sets = cfg[F_SETS]
    ways = cfg[F_WAYS]
    hit = 0
    ev_addr = int64(-1)
    ev_dom = int64(-1)
    filled = 0

    if fam == FAM_SETASSOC:
        set_idx = int64(uint64(addr) & uint64(sets - 1))
        if wrange.shape[0] > 0:
            lo = wrange[2 * domain]
            hi = wrange[2 * domain + 1]
        else:
            lo = int64(0)
            hi = ways
        base = set_idx * ways
        found = -1
        free = -1
        for w in range(lo, hi):
            t = tags[base + w]
            if t == addr:
                found = w
                break
            if t == -1 and free == -1:
                free = w
        if kind == KIND_INVALIDATE:
            if found >= 0:
                hit = 1
                tags[base + found] = -1
                pinned[base + found] = 0
                meta[base + found] = 0
        elif found >= 0:
            hit = 1
            _touch(cfg, meta, tree, clock, set_idx, found, lo, hi)
        else:
            if free >= 0:
                w = free
            else:
                w = _victim_way(cfg, tags, owners, pinned, meta, tree, rng,
                                set_idx, lo, hi, domain)
            if w >= 0:
                slot = base + w
                ev_addr = tags[slot]
                ev_dom = owners[slot]
                tags[slot] = addr
                owners[slot] = domain
                if cfg[F_PINMASK] != 0 and (cfg[F_PINMASK] >> domain) & 1:
                    pinned[slot] = 1
                else:
                    pinned[slot] = 0
                _touch(cfg, meta, tree, clock, set_idx, w, lo, hi)
                filled = 1

    elif fam == FAM_SKEW:
        parts = cfg[F_PARTS]
        pw = ways // parts
        bits = cfg[F_SETBITS]
        scatter = cfg[F_SCATTER]
        found_p = -1
        found_w = -1
        found_s = -1
        for p in range(parts):
            s = _feistel_index(addr, _skew_key(keys, scatter, p, domain), bits)
            base = s * ways
            for w in range(p * pw, (p + 1) * pw):
                if tags[base + w] == addr:
                    found_p = p
                    found_w = w
                    found_s = s
                    break
            if found_p >= 0:
                break
        if kind == KIND_INVALIDATE:
            if found_p >= 0:
                hit = 1
                slot = found_s * ways + found_w
                tags[slot] = -1
                pinned[slot] = 0
                meta[slot] = 0
        elif found_p >= 0:
            hit = 1
            _touch(cfg, meta, tree, clock, found_s, found_w,
                   found_p * pw, (found_p + 1) * pw)
        else:
            p = _randint(rng, parts)
            s = _feistel_index(addr, _skew_key(keys, scatter, p, domain), bits)
            w = _victim_way(cfg, tags, owners, pinned, meta, tree, rng,
                            s, p * pw, (p + 1) * pw, domain)
            if w >= 0:
                slot = s * ways + w
                ev_addr = tags[slot]
                ev_dom = owners[slot]
                tags[slot] = addr
                owners[slot] = domain
                _touch(cfg, meta, tree, clock, s, w, p * pw, (p + 1) * pw)
                filled = 1

    elif fam == FAM_NEWCACHE:
        n = cfg[F_NC_N]
        nk = n + cfg[F_NC_K]
        imask = int64((1 << nk) - 1)
        ci = (domain << nk) | (addr & imask)
        slot = cam[ci]
        if kind == KIND_INVALIDATE:
            if slot >= 0 and tags[slot] == addr:
                hit = 1
                tags[slot] = -1
                owners[slot] = -1
                cam[ci] = -1
        elif slot >= 0:
            if tags[slot] == addr:
                hit = 1
            else:
                # index hit, tag miss within the same domain: replace in place
                ev_addr = tags[slot]
                ev_dom = owners[slot]
                tags[slot] = addr
                owners[slot] = domain
                filled = 1
        else:
            v = _randint(rng, 1 << n)
            if tags[v] != -1:
                ev_addr = tags[v]
                ev_dom = owners[v]
                old_ci = (ev_dom << nk) | (ev_addr & imask)
                cam[old_ci] = -1
            tags[v] = addr
            owners[v] = domain
            cam[ci] = v
            filled = 1

    else:  # FAM_PHANTOM
        r = cfg[F_PHANTOM_R]
        found_s = -1
        found_w = -1
        for i in range(r):
            s = _phantom_set(keys, sets, addr, i)
            base = s * ways
            for w in range(ways):
                if tags[base + w] == addr:
                    found_s = s
                    found_w = w
                    break
            if found_s >= 0:
                break
        if kind == KIND_INVALIDATE:
            if found_s >= 0:
                hit = 1
                slot = found_s * ways + found_w
                tags[slot] = -1
                meta[slot] = 0
        elif found_s >= 0:
            hit = 1
            _touch(cfg, meta, tree, clock, found_s, found_w, 0, ways)
        else:
            s = _phantom_set(keys, sets, addr, _randint(rng, r))
            w = _victim_way(cfg, tags, owners, pinned, meta, tree, rng,
                            s, 0, ways, domain)
            if w >= 0:
                slot = s * ways + w
                ev_addr = tags[slot]
                ev_dom = owners[slot]
                tags[slot] = addr
                owners[slot] = domain
                _touch(cfg, meta, tree, clock, s, w, 0, ways)
                filled = 1

    stats[4 * domain + 3] += 1
    if hit:
        stats[4 * domain + 0] += 1
    else:
        stats[4 * domain + 1] += 1
    if ev_addr != -1 and ev_dom != domain:
        stats[4 * domain + 2] += 1
    return hit, ev_addr, ev_dom, filled


@njit(cache=True)
def access(st, addr, domain, kind):
    """Namedtuple wrapper over the hot access path, for one-off calls."""
    return _access(st.cfg, st.tags, st.owners, st.pinned, st.meta, st.tree,
                   st.wrange, st.keys, st.cam, st.rng, st.clock, st.stats,
                   addr, domain, kind)


@njit(cache=True)
def flush(st):
    st.tags[:] = -1
    st.owners[:] = -1
    st.pinned[:] = 0
    st.meta[:] = 0
    st.tree[:] = 0
    st.cam[:] = -1


@njit(cache=True)
def contains(st, addr):
    for i in range(st.tags.shape[0]):
        if st.tags[i] == addr:
            return True
    return False


@njit(cache=True)
def resident_count(st, domain):
    n = 0
    for i in range(st.tags.shape[0]):
        if st.tags[i] != -1 and st.owners[i] == domain:
            n += 1
    return n


# ---------------------------------------------------------------------------
# bulk drivers

@njit(cache=True)
def sweep(st, addrs, domain):
    """Read every address once; returns the number of misses."""
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    misses = 0
    for i in range(addrs.shape[0]):
        hit, _, _, _ = _access(cfg, tags, owners, pinned, meta, tree, wrange,
                               keys, cam, rng, clock, stats,
                               addrs[i], domain, KIND_READ)
        if hit == 0:
            misses += 1
    return misses


@njit(cache=True)
def sweep_outcomes(st, addrs, domain, hits, ev_addrs, ev_doms):
    """Read every address, recording hit flags and eviction reports."""
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    misses = 0
    for i in range(addrs.shape[0]):
        hit, ea, ed, _ = _access(cfg, tags, owners, pinned, meta, tree, wrange,
                                 keys, cam, rng, clock, stats,
                                 addrs[i], domain, KIND_READ)
        hits[i] = hit
        ev_addrs[i] = ea
        ev_doms[i] = ed
        if hit == 0:
            misses += 1
    return misses


@njit(cache=True)
def probe_first_miss(st, addrs, domain):
    """Read addresses in order until the first miss; -1 when all hit."""
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    for i in range(addrs.shape[0]):
        hit, _, _, _ = _access(cfg, tags, owners, pinned, meta, tree, wrange,
                               keys, cam, rng, clock, stats,
                               addrs[i], domain, KIND_READ)
        if hit == 0:
            return i
    return -1


@njit(cache=True)
def eviction_success_trials(st, addrs, victim_addr, victim_domain,
                            attacker_domain, trials):
    """Clean-cache eviction trials: prime the victim, sweep once, check."""
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    successes = 0
    for _ in range(trials):
        flush(st)
        _access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng,
                clock, stats, victim_addr, victim_domain, KIND_READ)
        for i in range(addrs.shape[0]):
            _access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam,
                    rng, clock, stats, addrs[i], attacker_domain, KIND_READ)
        if not contains(st, victim_addr):
            successes += 1
    return successes


@njit(cache=True)
def ppp_prune_pass(st, cands, alive, sorted_cands, sorted_idx, domain, lo):
    """One prime/prune pass over the live candidates in cands[lo:].

    Reading a candidate that misses leaves its line resident, so the
    candidate itself stays live; instead the line it displaced -- reported
    through the eviction channel -- is retired from the candidate set.  A
    miss that fills no way (a bypass) retires the candidate itself.  After a
    pass with misses, the live candidates are exactly the resident ones, so
    the following pass is guaranteed miss-free.  Returns the miss count.
    """
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    misses = 0
    n = cands.shape[0]
    for i in range(lo, n):
        if alive[i] == 0:
            continue
        hit, ea, ed, filled = _access(cfg, tags, owners, pinned, meta, tree,
                                      wrange, keys, cam, rng, clock, stats,
                                      cands[i], domain, KIND_READ)
        if hit == 0:
            misses += 1
            if filled == 0:
                alive[i] = 0
            if ea != -1 and ed == domain:
                lo = np.searchsorted(sorted_cands, ea)
                if lo < n and sorted_cands[lo] == ea:
                    alive[sorted_idx[lo]] = 0
    return misses


@njit(cache=True)
def conflict_test(st, addrs, victim_addr, victim_domain, attacker_domain):
    """Clean-cache eviction check used by the shrinking set builders.

    Flushes, primes the victim line, sweeps the candidate set once, then
    probes the victim; a probe miss means the set evicted it.
    """
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    flush(st)
    _access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng,
            clock, stats, victim_addr, victim_domain, KIND_READ)
    for i in range(addrs.shape[0]):
        _access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng,
                clock, stats, addrs[i], attacker_domain, KIND_READ)
    hit, _, _, _ = _access(cfg, tags, owners, pinned, meta, tree, wrange, keys,
                           cam, rng, clock, stats,
                           victim_addr, victim_domain, KIND_READ)
    return hit == 0


@njit(cache=True)
def _ree_rounds_generic(st, chunk_base, chunk_n, victim_addr, attacker_domain,
               victim_domain, rounds, fill_capacity, prepin, counts):
    """Sample the single-victim-access eviction distribution.

    Per round: flush, (optionally pre-touch the victim line so designs that
    pin or isolate on fill protect it), fill the cache with random attacker
    chunk lines while tracking residency through the fill reports, then issue
    one victim access and record which attacker line it displaced.

    Returns (recorded, discarded) sample counts.
    """
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    total = 0
    discarded = 0
    guard_limit = 200 * fill_capacity + 10000
    for _ in range(rounds):
        flush(st)
        if prepin:
            _access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam,
                    rng, clock, stats, victim_addr, victim_domain, KIND_READ)
        resident = 0
        guard = 0
        while resident < fill_capacity and guard < guard_limit:
            guard += 1
            a = chunk_base + _randint(rng, chunk_n)
            hit, ea, ed, filled = _access(cfg, tags, owners, pinned, meta,
                                          tree, wrange, keys, cam, rng, clock,
                                          stats, a, attacker_domain, KIND_READ)
            if filled and (ea == -1 or ed != attacker_domain):
                resident += 1  # took a free slot or displaced a victim line
        hit, ea, ed, _ = _access(cfg, tags, owners, pinned, meta, tree, wrange,
                                 keys, cam, rng, clock, stats,
                                 victim_addr, victim_domain, KIND_READ)
        if hit == 0 and ea != -1 and ed == attacker_domain:
            counts[ea - chunk_base] += 1
            total += 1
        else:
            discarded += 1
    return total, discarded



@njit(cache=True)
def _ree_rounds_fast(st, chunk_base, chunk_n, victim_addr, attacker_domain,
                     victim_domain, rounds, fill_capacity, counts):
    """Monolithic REE sampler for random replacement without pinning.

    Mirrors _ree_rounds_generic exactly, including the order in which random
    numbers are drawn, so the two paths produce identical histograms from the
    same state.  A presence map over the attacker pool replaces the per-access
    tag scans (the pool and the victim line must be disjoint, which the
    sampling harness guarantees), and free ways are tracked with a per-set
    cursor, valid because nothing is invalidated between flushes.
    """
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    fam = cfg[F_FAMILY]
    sets = cfg[F_SETS]
    ways = cfg[F_WAYS]
    parts = cfg[F_PARTS]
    pw = ways // parts
    bits = cfg[F_SETBITS]
    scatter = cfg[F_SCATTER]
    pr = cfg[F_PHANTOM_R]
    ncn = cfg[F_NC_N]
    nk = ncn + cfg[F_NC_K]
    imask = int64((1 << nk) - 1)
    smask = uint64(sets - 1)

    present = np.zeros(chunk_n, dtype=np.uint8)
    free_cursor = np.zeros(sets, dtype=np.int64)

    total = 0
    discarded = 0
    att_acc = 0
    att_miss = 0
    guard_limit = 200 * fill_capacity + 10000
    for _ in range(rounds):
        flush(st)
        present[:] = 0
        free_cursor[:] = 0
        resident = 0
        guard = 0
        while resident < fill_capacity and guard < guard_limit:
            guard += 1
            off = _randint(rng, chunk_n)
            if present[off]:
                continue
            a = chunk_base + off
            att_miss += 1
            if fam == FAM_SETASSOC:
                set_idx = int64(uint64(a) & smask)
                base = set_idx * ways
                if free_cursor[set_idx] < ways:
                    w = free_cursor[set_idx]
                    free_cursor[set_idx] += 1
                    resident += 1
                else:
                    w = _randint(rng, ways)
                    present[tags[base + w] - chunk_base] = 0
                slot = base + w
            elif fam == FAM_SKEW:
                p = _randint(rng, parts)
                set_idx = _feistel_index(a, _skew_key(keys, scatter, p, attacker_domain), bits)
                base = set_idx * ways
                lo = p * pw
                w = -1
                for ww in range(lo, lo + pw):
                    if tags[base + ww] == -1:
                        w = ww
                        break
                if w >= 0:
                    resident += 1
                else:
                    w = lo + _randint(rng, pw)
                    present[tags[base + w] - chunk_base] = 0
                slot = base + w
            elif fam == FAM_NEWCACHE:
                slot = _randint(rng, 1 << ncn)
                ev = tags[slot]
                if ev == -1:
                    resident += 1
                else:
                    present[ev - chunk_base] = 0
                    cam[(owners[slot] << nk) | (ev & imask)] = -1
                cam[(attacker_domain << nk) | (a & imask)] = slot
            else:  # FAM_PHANTOM
                set_idx = _phantom_set(keys, sets, a, _randint(rng, pr))
                base = set_idx * ways
                w = -1
                for ww in range(ways):
                    if tags[base + ww] == -1:
                        w = ww
                        break
                if w >= 0:
                    resident += 1
                else:
                    w = _randint(rng, ways)
                    present[tags[base + w] - chunk_base] = 0
                slot = base + w
            tags[slot] = a
            owners[slot] = attacker_domain
            present[off] = 1
        att_acc += guard

        # the single victim access
        ev = int64(-1)
        if fam == FAM_SETASSOC:
            set_idx = int64(uint64(victim_addr) & smask)
            base = set_idx * ways
            if free_cursor[set_idx] < ways:
                w = free_cursor[set_idx]
                free_cursor[set_idx] += 1
            else:
                w = _randint(rng, ways)
                ev = tags[base + w]
            slot = base + w
        elif fam == FAM_SKEW:
            p = _randint(rng, parts)
            set_idx = _feistel_index(victim_addr, _skew_key(keys, scatter, p, victim_domain), bits)
            base = set_idx * ways
            lo = p * pw
            w = -1
            for ww in range(lo, lo + pw):
                if tags[base + ww] == -1:
                    w = ww
                    break
            if w < 0:
                w = lo + _randint(rng, pw)
                ev = tags[base + w]
            slot = base + w
        elif fam == FAM_NEWCACHE:
            slot = _randint(rng, 1 << ncn)
            ev = tags[slot]
            if ev != -1:
                cam[(owners[slot] << nk) | (ev & imask)] = -1
            cam[(victim_domain << nk) | (victim_addr & imask)] = slot
        else:  # FAM_PHANTOM
            set_idx = _phantom_set(keys, sets, victim_addr, _randint(rng, pr))
            base = set_idx * ways
            w = -1
            for ww in range(ways):
                if tags[base + ww] == -1:
                    w = ww
                    break
            if w < 0:
                w = _randint(rng, ways)
                ev = tags[base + w]
            slot = base + w
        tags[slot] = victim_addr
        owners[slot] = victim_domain
        if ev != -1:
            present[ev - chunk_base] = 0
            counts[ev - chunk_base] += 1
            total += 1
        else:
            discarded += 1

    stats[4 * attacker_domain + 0] += att_acc - att_miss
    stats[4 * attacker_domain + 1] += att_miss
    stats[4 * attacker_domain + 3] += att_acc
    stats[4 * victim_domain + 1] += rounds
    stats[4 * victim_domain + 2] += total
    stats[4 * victim_domain + 3] += rounds
    return total, discarded


@njit(cache=True)
def ree_sample(st, chunk_base, chunk_n, victim_addr, attacker_domain,
               victim_domain, rounds, fill_capacity, prepin, counts):
    """Dispatch to the fast sampler when its preconditions hold."""
    if (st.cfg[F_POLICY] == POL_RANDOM and st.cfg[F_PINMASK] == 0
            and st.wrange.shape[0] == 0 and prepin == 0):
        return _ree_rounds_fast(st, chunk_base, chunk_n, victim_addr,
                                attacker_domain, victim_domain, rounds,
                                fill_capacity, counts)
    return _ree_rounds_generic(st, chunk_base, chunk_n, victim_addr,
                               attacker_domain, victim_domain, rounds,
                               fill_capacity, prepin, counts)


# ---------------------------------------------------------------------------
# plain entry points for the Python-side index oracles

@njit(cache=True)
def mix64(z):
    return _mix64(z)


@njit(cache=True)
def skew_index(keys, scatter, bits, part, domain, addr):
    return _feistel_index(addr, _skew_key(keys, scatter, part, domain), bits)


@njit(cache=True)
def phantom_index(keys, sets, addr, i):
    return _phantom_set(keys, sets, addr, i)
