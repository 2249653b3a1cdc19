"""Key-distinguishing attacks: eviction-set and occupancy Prime+Probe.

Both attacks try to tell two victim keys apart purely from probe miss
counts.  Each round runs the victim once under each key (in random order):
prime the probe set, let the victim perform one encryption or one
exponentiation, then probe and count misses.  The two per-key miss-count
samples feed Welch's t-test; the attack stops when the test is confident or
a round cap is reached, and reports how many victim operations that took.

The eviction-set variant probes a set built to evict the victim's monitored
line with probability at least ``alpha``; the occupancy variant simply scans
a cache-sized buffer and needs no preparatory construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np
from numba import njit

from . import _kernels as K
from . import victims as V
from .cache import Cache
from .evset import (
    ATTACKER_DOMAIN,
    VICTIM_DOMAIN,
    ConstructionError,
    default_target_size,
    oracle_collider_supply,
)

VICTIM_REGION_BASE = 0
EVSET_SUPPLY_BASE = 1 << 40
OCCUPANCY_BASE = 1 << 41
FRESH_LINE_BASE = 1 << 42

MIN_ROUNDS = 16
# Sequential testing inflates the false-stop rate of a fixed threshold, so
# the in-attack boundary grows slowly with the round count and must hold for
# a few consecutive rounds.  The exported welch_confident keeps the plain
# fixed-sample normal threshold.
SEQ_GROWTH = 0.02
SEQ_STREAK = 7
SEQ_SCALE = 1.12

KIND_AES = 0
KIND_MODEXP = 1
_VICTIM_KINDS = {"aes": KIND_AES, "modexp": KIND_MODEXP}


@dataclass(frozen=True)
class AttackConfig:
    prime_repetitions: int = 3
    round_cap: int = 1000
    confidence: float = 0.95

    def __post_init__(self):
        if self.prime_repetitions < 1:
            raise ValueError("prime_repetitions must be positive")
        if self.round_cap < MIN_ROUNDS:
            raise ValueError(f"round_cap must be at least {MIN_ROUNDS}")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must be in (0, 1)")

    @property
    def t_threshold(self) -> float:
        return NormalDist().inv_cdf((1 + self.confidence) / 2)


AES_ROUND_CAP = 100_000
MODEXP_ROUND_CAP = 1_000


def default_config(victim_kind: str, attack_kind: str = "evset") -> AttackConfig:
    """Per-attack defaults.  Extra prime sweeps are free in the encryptions
    metric and cut probe noise; the occupancy attack, which must fill the
    whole cache through random replacement, benefits enough to warrant a
    fourth sweep."""
    cap = AES_ROUND_CAP if victim_kind == "aes" else MODEXP_ROUND_CAP
    reps = 4 if attack_kind == "occupancy" else 3
    return AttackConfig(round_cap=cap, prime_repetitions=reps)


@dataclass(frozen=True)
class DistinguishResult:
    encryptions: int                # victim operations across both keys
    stopped: str                    # "confident" | "capReached"
    mean_misses: tuple[float, float]


def welch_confident(sample1, sample2, threshold: float = 1.959963984540054,
                    min_rounds: int = MIN_ROUNDS) -> bool:
    """True when Welch's t statistic exceeds the two-sided threshold.

    Needs at least ``min_rounds`` observations on each side.  With zero
    variance on both sides the statistic is undefined: equal means are
    treated as not confident, different means as confident.
    """
    a = np.asarray(sample1, dtype=np.float64)
    b = np.asarray(sample2, dtype=np.float64)
    if a.size < min_rounds or b.size < min_rounds:
        return False
    v1 = a.var(ddof=1)
    v2 = b.var(ddof=1)
    if v1 == 0.0 and v2 == 0.0:
        return a.mean() != b.mean()
    t = (a.mean() - b.mean()) / np.sqrt(v1 / a.size + v2 / b.size)
    return abs(t) > threshold


@njit(cache=True, inline="always")
def _welch_stop(n, m1, s1, m2, s2, threshold, min_rounds):
    v1 = s1 / (n - 1)
    v2 = s2 / (n - 1)
    if v1 == 0.0 and v2 == 0.0:
        return m1 != m2
    t = (m1 - m2) / np.sqrt(v1 / n + v2 / n)
    return abs(t) > threshold * (n / min_rounds) ** SEQ_GROWTH


@njit(cache=True)
def _alpha_trials(st, addrs, victim_addr, sweeps, trials):
    """Clean-cache eviction trials primed the way the attack primes: the
    candidate set is swept ``sweeps`` times before checking the victim."""
    successes = 0
    for _ in range(trials):
        K.flush(st)
        K.access(st, victim_addr, VICTIM_DOMAIN, K.KIND_READ)
        for _ in range(sweeps):
            K.sweep(st, addrs, ATTACKER_DOMAIN)
        if not K.contains(st, victim_addr):
            successes += 1
    return successes


@njit(cache=True)
def _replay(st, base, lines, n):
    cfg, tags, owners, pinned, meta, tree, wrange, keys, cam, rng, clock, stats = st
    for i in range(n):
        K._access(cfg, tags, owners, pinned, meta, tree, wrange, keys, cam,
                  rng, clock, stats, base + lines[i], VICTIM_DOMAIN,
                  K.KIND_READ)


@njit(cache=True)
def _modexp_bits(st, base, exponent, hi_bit, lo_bit, square, multiply):
    for bit in range(hi_bit, lo_bit - 1, -1):
        _replay(st, base, square, square.shape[0])
        if (exponent >> bit) & 1:
            _replay(st, base, multiply, multiply.shape[0])


@njit(cache=True)
def _attack_run(st, probe_set, prime_reps, victim_kind, rk1, rk2,
                key1, key2, e1, e2, bit_index, te0, te1, te2, te3,
                square, multiply, victim_base, fresh_base, use_fallback,
                round_cap, min_rounds, threshold, seed):
    """One full distinguishing run; returns (rounds, confident, mean1, mean2).

    Per round and key: prime sweeps, one victim operation, one counting
    probe sweep.  The per-key miss means and sums of squared deviations are
    kept with Welford's recurrence so the stopping test costs nothing.
    """
    np.random.seed(seed)
    pt = np.zeros(16, dtype=np.uint8)
    lines = np.zeros(160, dtype=np.int64)
    fresh = fresh_base
    n = 0
    streak = 0
    mean = np.zeros(2)
    m2 = np.zeros(2)
    confident = False
    while n < round_cap and not confident:
        first = np.random.randint(0, 2)
        for j in range(2):
            k = first ^ j
            exponent = e1 if k == 0 else e2
            if victim_kind == KIND_MODEXP:
                # the exponentiation up to (not including) the probed bit
                _modexp_bits(st, victim_base, exponent, 31, bit_index + 1,
                             square, multiply)
            for _ in range(prime_reps):
                K.sweep(st, probe_set, ATTACKER_DOMAIN)
            if victim_kind == KIND_AES:
                # vulnerable plaintexts are defined against key1; the same
                # plaintext spreads over four lines under key2
                for i in range(16):
                    pt[i] = np.random.randint(0, 256)
                for pos in range(0, 16, 4):
                    pt[pos] = key1[pos] ^ np.random.randint(0, 16)
                rk = rk1 if k == 0 else rk2
                V.aes_encrypt_trace(rk, pt, te0, te1, te2, te3, lines)
                _replay(st, victim_base, lines, 160)
            else:
                _modexp_bits(st, victim_base, exponent, bit_index, bit_index,
                             square, multiply)
            misses = K.sweep(st, probe_set, ATTACKER_DOMAIN)
            if use_fallback and misses == 0:
                K.access(st, fresh, ATTACKER_DOMAIN, K.KIND_READ)
                fresh += 1
            if victim_kind == KIND_MODEXP and bit_index > 0:
                _modexp_bits(st, victim_base, exponent, bit_index - 1, 0,
                             square, multiply)
            delta = misses - mean[k]
            mean[k] += delta / (n + 1)
            m2[k] += delta * (misses - mean[k])
        n += 1
        if n >= min_rounds and _welch_stop(n, mean[0], m2[0], mean[1], m2[1],
                                           threshold, min_rounds):
            streak += 1
            confident = streak >= SEQ_STREAK
        else:
            streak = 0
    v1 = m2[0] / (n - 1) if n > 1 else 0.0
    v2 = m2[1] / (n - 1) if n > 1 else 0.0
    return n, confident, mean[0], mean[1], v1, v2


def _run(cache: Cache, victim_kind: str, probe_set: np.ndarray,
         rng: np.random.Generator, config: AttackConfig,
         use_fallback: bool) -> DistinguishResult:
    kind = _VICTIM_KINDS[victim_kind]
    if kind == KIND_AES:
        pair = V.gen_aes_key_pair(rng)
        key1 = np.frombuffer(pair.key1, dtype=np.uint8)
        key2 = np.frombuffer(pair.key2, dtype=np.uint8)
        rk1 = V.aes_expand_key(pair.key1)
        rk2 = V.aes_expand_key(pair.key2)
        e1 = e2 = 0
        bit_index = 0
    else:
        epair = V.gen_exponent_pair(rng)
        e1, e2, bit_index = epair.e1, epair.e2, epair.bit_index
        key1 = key2 = np.zeros(16, dtype=np.uint8)
        rk1 = rk2 = np.zeros(44, dtype=np.uint32)
    seed = int(rng.integers(0, 2**31 - 1))
    rounds, confident, mean1, mean2, _, _ = _attack_run(
        cache.state, probe_set, np.int64(config.prime_repetitions),
        np.int64(kind), rk1, rk2, key1, key2, np.int64(e1), np.int64(e2),
        np.int64(bit_index), V.TE0, V.TE1, V.TE2, V.TE3,
        V.SQUARE_TRACE, V.MULTIPLY_TRACE, np.int64(VICTIM_REGION_BASE),
        np.int64(FRESH_LINE_BASE + int(rng.integers(0, 1 << 30)) * 4096),
        use_fallback, np.int64(config.round_cap), np.int64(MIN_ROUNDS),
        SEQ_SCALE * config.t_threshold, np.int64(seed))
    return DistinguishResult(
        encryptions=2 * int(rounds),
        stopped="confident" if confident else "capReached",
        mean_misses=(float(mean1), float(mean2)))


def build_attack_evset(cache: Cache, victim_kind: str,
                       rng: np.random.Generator, alpha: float = 0.9,
                       prime_repetitions: int = 3,
                       trials: int = 1000) -> list[int]:
    """Eviction set for the victim's monitored line, sized so that priming
    it the way the attack does (``prime_repetitions`` sweeps) evicts the
    line with probability at least ``alpha``.

    The size is found by bisection over prefixes of a collider supply; the
    measured probability is monotone in the prefix length up to trial noise.
    """
    monitored = VICTIM_REGION_BASE + V.monitored_line(victim_kind)
    try:
        supply = oracle_collider_supply(cache, monitored, rng,
                                        4 * cache.n_lines,
                                        attacker_base=EVSET_SUPPLY_BASE)
    except ConstructionError:
        # No attacker line can contend with the victim (partitioned
        # designs).  The attack still runs -- and can only cap out -- on a
        # same-set-index guess of the usual size.
        sets = max(cache.sets, 1)
        size = default_target_size(cache)
        return [EVSET_SUPPLY_BASE + (monitored % sets) + i * sets
                for i in range(size)]

    def prob(k: int) -> float:
        addrs = np.array(supply[:k], dtype=np.int64)
        return int(_alpha_trials(cache.state, addrs, np.int64(monitored),
                                 np.int64(prime_repetitions),
                                 np.int64(trials))) / trials

    lo, hi = 1, len(supply)
    if prob(hi) < alpha:
        raise RuntimeError(
            f"collider supply of {hi} cannot reach alpha={alpha}")
    while lo < hi:
        mid = (lo + hi) // 2
        if prob(mid) >= alpha:
            hi = mid
        else:
            lo = mid + 1
    return supply[:lo]


def eviction_set_attack(cache: Cache, victim_kind: str,
                        rng: np.random.Generator,
                        config: AttackConfig | None = None,
                        evset: list[int] | None = None,
                        alpha: float = 0.9) -> DistinguishResult:
    """Prime+Probe over an eviction set for the monitored line.

    A probe round that sees no eviction at all touches one fresh attacker
    line instead, so the cache keeps moving even when the set misses the
    victim.
    """
    if config is None:
        config = default_config(victim_kind)
    if evset is None:
        evset = build_attack_evset(cache, victim_kind, rng, alpha)
    probe = np.array(evset, dtype=np.int64)
    cache.flush()
    return _run(cache, victim_kind, probe, rng, config, use_fallback=True)


def occupancy_attack(cache: Cache, victim_kind: str,
                     rng: np.random.Generator,
                     config: AttackConfig | None = None) -> DistinguishResult:
    """Prime+Probe with a cache-sized buffer instead of an eviction set."""
    if config is None:
        config = default_config(victim_kind, attack_kind="occupancy")
    base = OCCUPANCY_BASE + int(rng.integers(0, 1 << 30)) * (4 * cache.n_lines)
    probe = base + np.arange(cache.n_lines, dtype=np.int64)
    cache.flush()
    return _run(cache, victim_kind, probe, rng, config, use_fallback=False)


@dataclass(frozen=True)
class MedianReport:
    median: float
    capped_fraction: float
    runs: int
    encryptions: list[int]


_ATTACKS = {"evset": eviction_set_attack, "occupancy": occupancy_attack}


def median_encryptions(cache: Cache, attack_kind: str, victim_kind: str,
                       runs: int, seed_base: int,
                       config: AttackConfig | None = None,
                       evset: list[int] | None = None) -> MedianReport:
    """Median victim operations to confidence over independent runs.

    Runs that hit the round cap enter the median right-censored at the
    cap's operation count, so a heavy capped tail drags the median up
    instead of silently vanishing.
    """
    if config is None:
        config = default_config(victim_kind)
    attack = _ATTACKS[attack_kind]
    if attack_kind == "evset" and evset is None:
        evset = build_attack_evset(cache, victim_kind,
                                   np.random.default_rng(seed_base))
    counts: list[int] = []
    capped = 0
    for r in range(runs):
        rng = np.random.default_rng((seed_base, r))
        cache.flush()
        if attack_kind == "evset":
            res = attack(cache, victim_kind, rng, config, evset=evset)
        else:
            res = attack(cache, victim_kind, rng, config)
        if res.stopped == "capReached":
            capped += 1
        counts.append(res.encryptions)
    return MedianReport(median=float(np.median(counts)),
                        capped_fraction=capped / runs,
                        runs=runs, encryptions=counts)


def optimal_evset_sweep(cache: Cache, victim_kind: str, sizes: list[int],
                        runs: int, seed_base: int,
                        config: AttackConfig | None = None
                        ) -> dict[int, MedianReport]:
    """Median cost of the eviction-set attack for each probe-set size.

    Sizes take prefixes of one oracle collider supply, so a larger size is
    always a superset of a smaller one.
    """
    supply = oracle_collider_supply(
        cache, VICTIM_REGION_BASE + V.monitored_line(victim_kind),
        np.random.default_rng(seed_base), max(sizes),
        attacker_base=EVSET_SUPPLY_BASE)
    out: dict[int, MedianReport] = {}
    for size in sizes:
        out[size] = median_encryptions(cache, "evset", victim_kind, runs,
                                       seed_base, config,
                                       evset=supply[:size])
    return out
