"""Eviction-set construction and quality measurement.

Three construction strategies drive the cache purely through its access
interface: the Single Holdout Method and the Group Elimination Method shrink a
large conflict set top-down, while Prime+Prune+Probe grows a set of verified
colliders bottom-up.  A fourth builder assembles the smallest address prefix
that reaches a target eviction probability.  Quality is judged from the other
side of the fence by the cache's index-function oracle (`Cache.collides`) and
by repeated clean-cache eviction trials; construction itself never consults
the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .cache import Cache

SHM_INITIAL_FACTOR = 8       # initial conflict set, in multiples of cache lines
PPP_CANDIDATE_FACTOR = 2     # fresh candidates per PPP round, same unit
SHM_GEM_CAP = 1_000_000      # address tests
PPP_ROUND_CAP = 10_000
PRUNE_PASS_CAP = 100
SUCCESS_TRIALS = 1000
ATTACKER_DOMAIN = 0
VICTIM_DOMAIN = 1


class ConstructionError(RuntimeError):
    """The builder could not establish its precondition or ran dry."""


@dataclass
class EvictionSetReport:
    addresses: list[int]
    victim: int
    memory_accesses: int
    iterations: int
    terminated: str                 # "targetReached" | "iterationCap"
    true_conflict_rate: float = 0.0
    success_rate: float = 0.0

    def __post_init__(self):
        if len(set(self.addresses)) != len(self.addresses):
            raise ValueError("eviction set addresses must be distinct")


def default_target_size(cache: Cache) -> int:
    """Number of ways, except PhantomCache, which spreads lines over
    phantom_r candidate sets and needs proportionally more addresses."""
    if cache.design == "phantom":
        return cache.phantom_r * cache.ways
    return cache.ways


def _draw_pool(rng: np.random.Generator, base: int, span: int, n: int) -> np.ndarray:
    """n distinct random attacker line addresses in [base, base + span)."""
    if n > span:
        raise ValueError("pool span too small")
    out = np.unique(rng.integers(0, span, size=2 * n, dtype=np.int64))
    while len(out) < n:
        more = rng.integers(0, span, size=2 * n, dtype=np.int64)
        out = np.unique(np.concatenate((out, more)))
    rng.shuffle(out)
    return base + out[:n]


def _evicts(cache: Cache, addrs: np.ndarray, victim: int) -> bool:
    return bool(
        K.conflict_test(cache.state, addrs, np.int64(victim),
                        np.int64(VICTIM_DOMAIN), np.int64(ATTACKER_DOMAIN))
    )


def _total_accesses(cache: Cache) -> int:
    return (cache.statistics(ATTACKER_DOMAIN).accesses
            + cache.statistics(VICTIM_DOMAIN).accesses)


def _initial_conflict_set(cache: Cache, victim: int, rng: np.random.Generator,
                          attacker_base: int, span: int) -> np.ndarray:
    for _ in range(10):
        pool = _draw_pool(rng, attacker_base, span, SHM_INITIAL_FACTOR * cache.n_lines)
        if _evicts(cache, pool, victim):
            return pool
    raise ConstructionError("initial conflict set failed to evict the victim")


def _finish(cache: Cache, addrs, victim: int, start_accesses: int,
            iterations: int, target_size: int) -> EvictionSetReport:
    addresses = [int(a) for a in addrs]
    report = EvictionSetReport(
        addresses=addresses,
        victim=victim,
        memory_accesses=_total_accesses(cache) - start_accesses,
        iterations=iterations,
        terminated="targetReached" if len(addresses) <= target_size else "iterationCap",
    )
    tcr, sr = evaluate_set(cache, addresses, victim)
    report.true_conflict_rate = tcr
    report.success_rate = sr
    return report


def build_shm(cache: Cache, victim: int, rng: np.random.Generator,
              attacker_base: int = 1 << 40, span: int = 1 << 24,
              target_size: int | None = None,
              cap_iterations: int = SHM_GEM_CAP) -> EvictionSetReport:
    """Single Holdout Method: drop one address at a time while the remainder
    still evicts the victim."""
    if target_size is None:
        target_size = default_target_size(cache)
    start = _total_accesses(cache)
    current = list(_initial_conflict_set(cache, victim, rng, attacker_base, span))
    iterations = 0
    progress = True
    while len(current) > target_size and iterations < cap_iterations and progress:
        progress = False
        pos = 0
        while pos < len(current) and len(current) > target_size and iterations < cap_iterations:
            iterations += 1
            held_out = current[pos]
            rest = current[:pos] + current[pos + 1:]
            if _evicts(cache, np.array(rest, dtype=np.int64), victim):
                current = rest
                progress = True
            else:
                pos += 1
    return _finish(cache, current, victim, start, iterations, target_size)


def build_gem(cache: Cache, victim: int, rng: np.random.Generator,
              attacker_base: int = 1 << 40, span: int = 1 << 24,
              target_size: int | None = None,
              cap_iterations: int = SHM_GEM_CAP) -> EvictionSetReport:
    """Group Elimination Method: split into ways+1 groups and drop the first
    group whose removal keeps the set evicting."""
    if target_size is None:
        target_size = default_target_size(cache)
    groups = target_size + 1
    start = _total_accesses(cache)
    current = list(_initial_conflict_set(cache, victim, rng, attacker_base, span))
    iterations = 0
    while len(current) > target_size and iterations < cap_iterations:
        bounds = np.linspace(0, len(current), groups + 1, dtype=np.int64)
        removed = False
        for g in range(groups):
            lo, hi = int(bounds[g]), int(bounds[g + 1])
            if lo == hi:
                continue
            iterations += 1
            rest = current[:lo] + current[hi:]
            if _evicts(cache, np.array(rest, dtype=np.int64), victim):
                current = rest
                removed = True
                break
            if iterations >= cap_iterations:
                break
        if not removed:
            break
    return _finish(cache, current, victim, start, iterations, target_size)


def build_ppp(cache: Cache, victim: int, rng: np.random.Generator,
              attacker_base: int = 1 << 40, span: int = 1 << 24,
              target_size: int | None = None,
              cap_rounds: int = PPP_ROUND_CAP) -> EvictionSetReport:
    """Prime+Prune+Probe: prime candidates, prune self-conflicts until the
    resident candidate set is stable, trigger one victim access, and take the
    first probe miss -- provably the line the victim displaced -- as a
    collider.

    Each round primes fresh candidates followed by the colliders found so
    far, totalling PPP_CANDIDATE_FACTOR x cache lines, and then keeps
    re-reading the colliders until all of them are resident at once.
    Pruning tracks residency through the eviction reports, so the surviving
    candidates fill essentially the whole cache and a victim miss almost
    always displaces a probed line.  A round is wasted when the displaced
    line is a collider already known; on skewed designs a re-primed collider
    only lands in its conflicting skew part occasionally, which makes such
    duplicates rarer and construction correspondingly cheaper.

    Only the first probe miss is collected: with a pruned (self-stable)
    candidate set, a single victim access displaces at most one line, and any
    later probe miss would be fallout from the probe's own refill, not a true
    conflict.
    """
    if target_size is None:
        target_size = default_target_size(cache)
    start = _total_accesses(cache)
    total_candidates = PPP_CANDIDATE_FACTOR * cache.n_lines
    colliders: list[int] = []
    seen: set[int] = set()
    rounds = 0
    while len(colliders) < target_size and rounds < cap_rounds:
        rounds += 1
        n_fresh = max(total_candidates - len(colliders), 1)
        fresh = _draw_pool(rng, attacker_base, span, n_fresh + len(colliders))
        fresh = fresh[~np.isin(fresh, np.array(colliders, dtype=np.int64))][:n_fresh]
        candidates = np.concatenate(
            [fresh, np.array(colliders, dtype=np.int64)])
        alive = np.ones(len(candidates), dtype=np.uint8)
        order = np.argsort(candidates)
        sorted_cands = candidates[order]
        # One priming pass suffices: the eviction reports retire displaced
        # candidates as they go, so afterwards the live candidates are
        # exactly the resident ones and a re-sweep could only hit.
        K.ppp_prune_pass(cache.state, candidates, alive, sorted_cands, order,
                         np.int64(ATTACKER_DOMAIN), np.int64(0))
        # keep the known colliders hot: re-read them until one pass finds
        # them all resident together
        for _ in range(PRUNE_PASS_CAP):
            if not colliders:
                break
            alive[len(fresh):] = 1
            misses = K.ppp_prune_pass(cache.state, candidates, alive,
                                      sorted_cands, order,
                                      np.int64(ATTACKER_DOMAIN),
                                      np.int64(len(fresh)))
            if misses == 0:
                break
        survivors = candidates[alive == 1]
        if len(survivors) == 0:
            continue
        cache.access(victim, VICTIM_DOMAIN)
        first_miss = int(K.probe_first_miss(cache.state, survivors,
                                            np.int64(ATTACKER_DOMAIN)))
        if first_miss >= 0:
            addr = int(survivors[first_miss])
            if addr not in seen:
                seen.add(addr)
                colliders.append(addr)
    return _finish(cache, colliders, victim, start, rounds, target_size)


def oracle_collider_supply(cache: Cache, victim: int, rng: np.random.Generator,
                           n: int, attacker_base: int = 1 << 40,
                           span: int = 1 << 24,
                           scan_cap: int = 2_000_000) -> list[int]:
    """Verified colliders straight from the index-function oracle.

    This is the evaluation-side supply for the probability builder; it stands
    in for a PPP harvest when only the resulting set sizes are under study.
    """
    out: list[int] = []
    seen: set[int] = set()
    for _ in range(scan_cap):
        addr = attacker_base + int(rng.integers(0, span))
        if addr in seen:
            continue
        if cache.collides(addr, ATTACKER_DOMAIN, victim, VICTIM_DOMAIN):
            seen.add(addr)
            out.append(addr)
            if len(out) >= n:
                return out
    raise ConstructionError(f"oracle supply exhausted at {len(out)}/{n} colliders")


def evict_probability(cache: Cache, addresses: list[int], victim: int,
                      trials: int = SUCCESS_TRIALS) -> float:
    """Fraction of clean-cache prime-sweep trials that evict the victim."""
    if not addresses:
        return 0.0
    arr = np.array(addresses, dtype=np.int64)
    succ = int(K.eviction_success_trials(cache.state, arr, np.int64(victim),
                                         np.int64(VICTIM_DOMAIN),
                                         np.int64(ATTACKER_DOMAIN),
                                         np.int64(trials)))
    return succ / trials


def build_to_probability(cache: Cache, victim: int, alpha: float,
                         supply: list[int],
                         trials_per_check: int = SUCCESS_TRIALS) -> list[int]:
    """Smallest prefix of the collider supply whose measured eviction
    probability reaches ``alpha``."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    best = 0.0
    prefix: list[int] = []
    for addr in supply:
        prefix.append(addr)
        p = evict_probability(cache, prefix, victim, trials_per_check)
        if p >= alpha:
            return prefix
        best = max(best, p)
    raise ConstructionError(
        f"supply of {len(supply)} colliders reached only p={best:.3f} < {alpha}")


def evaluate_set(cache: Cache, addresses: list[int], victim: int,
                 trials: int = SUCCESS_TRIALS) -> tuple[float, float]:
    """(trueConflictRate, successRate) for an eviction set.

    The conflict rate consults the index-function oracle per address; an empty
    set is vacuously all-conflicting.  The success rate counts clean-cache
    prime-victim/sweep/check trials.
    """
    if not addresses:
        return 1.0, 0.0
    conflicts = sum(
        1 for a in addresses
        if cache.collides(a, ATTACKER_DOMAIN, victim, VICTIM_DOMAIN)
    )
    return conflicts / len(addresses), evict_probability(cache, addresses, victim, trials)
