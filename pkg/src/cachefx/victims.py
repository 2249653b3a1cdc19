"""Leaky victim programs: T-table AES-128 and square-and-multiply mod-exp.

Both victims expose their memory behaviour as a sequence of line offsets
within a victim region; the attack harness replays those offsets through
the cache under the victim's domain.  The AES tables occupy 64 lines (four
contiguous 1 KiB tables, 16 lines each); one table lookup touches line
``16 * table + (index >> 4)``.  The exponentiator works on three 4-line
buffers (accumulator, modulus, base) and yields control after every
exponent bit, so an attacker can prime and probe around a single bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# AES-128 tables

def _build_sbox() -> np.ndarray:
    # multiplicative inverse in GF(2^8) followed by the affine transform
    p, q = 1, 1
    inv = np.zeros(256, dtype=np.int64)
    while True:
        # p := p * 3, q := q / 3 in GF(2^8)
        p = p ^ ((p << 1) & 0xFF) ^ (0x1B if p & 0x80 else 0)
        q ^= q << 1
        q ^= q << 2
        q ^= q << 4
        q &= 0xFF
        if q & 0x80:
            q ^= 0x09
        inv[p] = q
        if p == 1:
            break
    sbox = np.zeros(256, dtype=np.uint32)
    for x in range(256):
        b = inv[x] if x else 0
        sbox[x] = 0x63 ^ b ^ _rol8(b, 1) ^ _rol8(b, 2) ^ _rol8(b, 3) ^ _rol8(b, 4)
    return sbox


def _rol8(b: int, n: int) -> int:
    return ((b << n) | (b >> (8 - n))) & 0xFF


def _xtime(b: int) -> int:
    return ((b << 1) ^ (0x1B if b & 0x80 else 0)) & 0xFF


SBOX = _build_sbox()

def _build_te() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    te0 = np.zeros(256, dtype=np.uint32)
    for x in range(256):
        s = int(SBOX[x])
        te0[x] = (_xtime(s) << 24) | (s << 16) | (s << 8) | (s ^ _xtime(s))
    te1 = ((te0 >> np.uint32(8)) | (te0 << np.uint32(24))).astype(np.uint32)
    te2 = ((te0 >> np.uint32(16)) | (te0 << np.uint32(16))).astype(np.uint32)
    te3 = ((te0 >> np.uint32(24)) | (te0 << np.uint32(8))).astype(np.uint32)
    return te0, te1, te2, te3


TE0, TE1, TE2, TE3 = _build_te()

RCON = np.array([0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36],
                dtype=np.uint32)

AES_LOOKUPS = 160          # 16 table reads in each of the 10 rounds
AES_TABLE_LINES = 64       # 4 tables x 16 lines
MONITORED_AES_LINE = 0     # first line of the first table

VULNERABLE_BYTES = (0, 4, 8, 12)


@njit(cache=True)
def expand_key(key, sbox):
    """AES-128 key schedule: 16 key bytes -> 44 round-key words."""
    rk = np.zeros(44, dtype=np.uint32)
    for i in range(4):
        rk[i] = ((np.uint32(key[4 * i]) << np.uint32(24))
                 | (np.uint32(key[4 * i + 1]) << np.uint32(16))
                 | (np.uint32(key[4 * i + 2]) << np.uint32(8))
                 | np.uint32(key[4 * i + 3]))
    rcon = np.uint32(0x01000000)
    for i in range(4, 44):
        t = rk[i - 1]
        if i % 4 == 0:
            t = ((sbox[(t >> np.uint32(16)) & np.uint32(0xFF)] << np.uint32(24))
                 | (sbox[(t >> np.uint32(8)) & np.uint32(0xFF)] << np.uint32(16))
                 | (sbox[t & np.uint32(0xFF)] << np.uint32(8))
                 | sbox[t >> np.uint32(24)])
            t = t ^ rcon
            hi = rcon >> np.uint32(31)
            rcon = np.uint32(((rcon << np.uint32(1))
                              ^ (hi * np.uint32(0x1B000000))) & np.uint32(0xFF000000))
        rk[i] = rk[i - 4] ^ t
    return rk


@njit(cache=True)
def aes_encrypt_trace(rk, pt, te0, te1, te2, te3, lines):
    """Ten-round T-table AES-128; records the cache line of every lookup.

    ``lines`` receives the 160 per-lookup line offsets (0..63) in access
    order.  Returns the ciphertext as a 16-byte array.
    """
    s0 = ((np.uint32(pt[0]) << np.uint32(24)) | (np.uint32(pt[1]) << np.uint32(16))
          | (np.uint32(pt[2]) << np.uint32(8)) | np.uint32(pt[3])) ^ rk[0]
    s1 = ((np.uint32(pt[4]) << np.uint32(24)) | (np.uint32(pt[5]) << np.uint32(16))
          | (np.uint32(pt[6]) << np.uint32(8)) | np.uint32(pt[7])) ^ rk[1]
    s2 = ((np.uint32(pt[8]) << np.uint32(24)) | (np.uint32(pt[9]) << np.uint32(16))
          | (np.uint32(pt[10]) << np.uint32(8)) | np.uint32(pt[11])) ^ rk[2]
    s3 = ((np.uint32(pt[12]) << np.uint32(24)) | (np.uint32(pt[13]) << np.uint32(16))
          | (np.uint32(pt[14]) << np.uint32(8)) | np.uint32(pt[15])) ^ rk[3]
    n = 0
    for rnd in range(1, 10):
        i00 = s0 >> np.uint32(24)
        i11 = (s1 >> np.uint32(16)) & np.uint32(0xFF)
        i22 = (s2 >> np.uint32(8)) & np.uint32(0xFF)
        i33 = s3 & np.uint32(0xFF)
        i10 = s1 >> np.uint32(24)
        i21 = (s2 >> np.uint32(16)) & np.uint32(0xFF)
        i32 = (s3 >> np.uint32(8)) & np.uint32(0xFF)
        i03 = s0 & np.uint32(0xFF)
        i20 = s2 >> np.uint32(24)
        i31 = (s3 >> np.uint32(16)) & np.uint32(0xFF)
        i02 = (s0 >> np.uint32(8)) & np.uint32(0xFF)
        i13 = s1 & np.uint32(0xFF)
        i30 = s3 >> np.uint32(24)
        i01 = (s0 >> np.uint32(16)) & np.uint32(0xFF)
        i12 = (s1 >> np.uint32(8)) & np.uint32(0xFF)
        i23 = s2 & np.uint32(0xFF)
        lines[n] = i00 >> np.uint32(4)
        lines[n + 1] = np.uint32(16) + (i11 >> np.uint32(4))
        lines[n + 2] = np.uint32(32) + (i22 >> np.uint32(4))
        lines[n + 3] = np.uint32(48) + (i33 >> np.uint32(4))
        lines[n + 4] = i10 >> np.uint32(4)
        lines[n + 5] = np.uint32(16) + (i21 >> np.uint32(4))
        lines[n + 6] = np.uint32(32) + (i32 >> np.uint32(4))
        lines[n + 7] = np.uint32(48) + (i03 >> np.uint32(4))
        lines[n + 8] = i20 >> np.uint32(4)
        lines[n + 9] = np.uint32(16) + (i31 >> np.uint32(4))
        lines[n + 10] = np.uint32(32) + (i02 >> np.uint32(4))
        lines[n + 11] = np.uint32(48) + (i13 >> np.uint32(4))
        lines[n + 12] = i30 >> np.uint32(4)
        lines[n + 13] = np.uint32(16) + (i01 >> np.uint32(4))
        lines[n + 14] = np.uint32(32) + (i12 >> np.uint32(4))
        lines[n + 15] = np.uint32(48) + (i23 >> np.uint32(4))
        n += 16
        t0 = te0[i00] ^ te1[i11] ^ te2[i22] ^ te3[i33] ^ rk[4 * rnd]
        t1 = te0[i10] ^ te1[i21] ^ te2[i32] ^ te3[i03] ^ rk[4 * rnd + 1]
        t2 = te0[i20] ^ te1[i31] ^ te2[i02] ^ te3[i13] ^ rk[4 * rnd + 2]
        t3 = te0[i30] ^ te1[i01] ^ te2[i12] ^ te3[i23] ^ rk[4 * rnd + 3]
        s0, s1, s2, s3 = t0, t1, t2, t3
    # final round, expressed over the same four tables
    out = np.zeros(16, dtype=np.uint8)
    state = (s0, s1, s2, s3)
    for col in range(4):
        a = state[col]
        b = state[(col + 1) % 4]
        c = state[(col + 2) % 4]
        d = state[(col + 3) % 4]
        ia = a >> np.uint32(24)
        ib = (b >> np.uint32(16)) & np.uint32(0xFF)
        ic = (c >> np.uint32(8)) & np.uint32(0xFF)
        id_ = d & np.uint32(0xFF)
        lines[n] = np.uint32(32) + (ia >> np.uint32(4))
        lines[n + 1] = np.uint32(48) + (ib >> np.uint32(4))
        lines[n + 2] = ic >> np.uint32(4)
        lines[n + 3] = np.uint32(16) + (id_ >> np.uint32(4))
        n += 4
        word = ((te2[ia] & np.uint32(0xFF000000))
                ^ (te3[ib] & np.uint32(0x00FF0000))
                ^ (te0[ic] & np.uint32(0x0000FF00))
                ^ (te1[id_] & np.uint32(0x000000FF))) ^ rk[40 + col]
        out[4 * col] = word >> np.uint32(24)
        out[4 * col + 1] = (word >> np.uint32(16)) & np.uint32(0xFF)
        out[4 * col + 2] = (word >> np.uint32(8)) & np.uint32(0xFF)
        out[4 * col + 3] = word & np.uint32(0xFF)
    return out


def aes_expand_key(key: bytes | np.ndarray) -> np.ndarray:
    return expand_key(np.frombuffer(bytes(key), dtype=np.uint8), SBOX)


def aes_encrypt(key: bytes | np.ndarray, plaintext: bytes | np.ndarray,
                lines: np.ndarray | None = None) -> bytes:
    """Encrypt one block; optionally record the 160 lookup line offsets."""
    if lines is None:
        lines = np.zeros(AES_LOOKUPS, dtype=np.int64)
    rk = aes_expand_key(key)
    pt = np.frombuffer(bytes(plaintext), dtype=np.uint8)
    return bytes(aes_encrypt_trace(rk, pt, TE0, TE1, TE2, TE3, lines))


# ---------------------------------------------------------------------------
# key pairs and vulnerable plaintexts

@dataclass(frozen=True)
class AesKeyPair:
    """Two keys whose first-round T0 lookups differ for vulnerable plaintexts:
    under key1 all four land in T0's line 0, under key2 in four distinct
    lines."""
    key1: bytes
    key2: bytes

    def __post_init__(self):
        if self.key1 == self.key2:
            raise ValueError("key pair must contain two distinct keys")


def gen_aes_key_pair(rng: np.random.Generator) -> AesKeyPair:
    key1 = rng.integers(0, 256, size=16, dtype=np.uint8)
    key2 = key1.copy()
    high = rng.permutation(np.arange(1, 16))[:4]
    for pos, h in zip(VULNERABLE_BYTES, high):
        delta = (int(h) << 4) | int(rng.integers(0, 16))
        key2[pos] = key1[pos] ^ delta
    return AesKeyPair(bytes(key1), bytes(key2))


def sample_vulnerable_plaintext(pair: AesKeyPair,
                                rng: np.random.Generator) -> np.ndarray:
    """Plaintext whose constrained bytes cancel key1's high nibbles, so the
    first-round T0 indices sit in 0x00..0x0F under key1."""
    pt = rng.integers(0, 256, size=16, dtype=np.uint8)
    for pos in VULNERABLE_BYTES:
        pt[pos] = pair.key1[pos] ^ int(rng.integers(0, 16))
    return pt


# ---------------------------------------------------------------------------
# square-and-multiply modular exponentiation

MODEXP_BUFFER_LINES = 4
MODEXP_ACC_BASE = 0                         # accumulator lines 0..3
MODEXP_MOD_BASE = MODEXP_BUFFER_LINES       # modulus lines 4..7
MODEXP_BASE_BASE = 2 * MODEXP_BUFFER_LINES  # base operand lines 8..11
MODEXP_REGION_LINES = 3 * MODEXP_BUFFER_LINES
MONITORED_MODEXP_LINE = MODEXP_BASE_BASE
MODEXP_EXP_BITS = 32

# square: read/write the accumulator, reduce against the modulus
SQUARE_TRACE = np.array(
    [MODEXP_ACC_BASE + i for i in range(MODEXP_BUFFER_LINES)]
    + [MODEXP_MOD_BASE + i for i in range(MODEXP_BUFFER_LINES)]
    + [MODEXP_ACC_BASE + i for i in range(MODEXP_BUFFER_LINES)],
    dtype=np.int64)
# multiply: walk the base operand, update the accumulator, reduce
MULTIPLY_TRACE = np.array(
    [MODEXP_BASE_BASE + i for i in range(MODEXP_BUFFER_LINES)]
    + [MODEXP_ACC_BASE + i for i in range(MODEXP_BUFFER_LINES)]
    + [MODEXP_MOD_BASE + i for i in range(MODEXP_BUFFER_LINES)],
    dtype=np.int64)


def modexp_bit_trace(exponent: int, bit_index: int) -> np.ndarray:
    """Line offsets touched while processing one exponent bit (MSB-first
    order is the caller's concern; the step itself depends only on the bit)."""
    if not 0 <= bit_index < MODEXP_EXP_BITS:
        raise ValueError("bit_index out of range")
    if (exponent >> bit_index) & 1:
        return np.concatenate([SQUARE_TRACE, MULTIPLY_TRACE])
    return SQUARE_TRACE.copy()


@dataclass(frozen=True)
class ExponentPair:
    """Two 32-bit exponents that differ in the distinguished bit."""
    e1: int
    e2: int
    bit_index: int = 7

    def __post_init__(self):
        if (self.e1 >> self.bit_index) & 1:
            raise ValueError("e1 must have the distinguished bit clear")
        if not (self.e2 >> self.bit_index) & 1:
            raise ValueError("e2 must have the distinguished bit set")


def gen_exponent_pair(rng: np.random.Generator,
                      bit_index: int = 7) -> ExponentPair:
    mask = (1 << MODEXP_EXP_BITS) - 1
    bit = 1 << bit_index
    e1 = int(rng.integers(0, 1 << MODEXP_EXP_BITS)) & ~bit & mask
    e2 = (int(rng.integers(0, 1 << MODEXP_EXP_BITS)) | bit) & mask
    return ExponentPair(e1, e2, bit_index)


def monitored_line(victim_kind: str) -> int:
    """Region-relative line whose access probability depends on the key."""
    if victim_kind == "aes":
        return MONITORED_AES_LINE
    if victim_kind == "modexp":
        return MONITORED_MODEXP_LINE
    raise ValueError(f"unknown victim kind: {victim_kind!r}")
