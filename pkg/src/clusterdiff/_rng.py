"""Keyed counter-based pseudorandom primitives.

Every random decision in the sampler is a pure function of
(seed, stratum tag, pair ordinal, purpose, step), built from the
splitmix64 finalizer. That makes samples reproducible across runs,
platforms, and kernel backends: the compiled kernel implements the
identical arithmetic in C, and only IEEE-754 +,-,*,/ appear in a fixed
evaluation order, so results are bit-identical between backends.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# purpose words separating independent decision streams per pair
PURPOSE_COUNT = 0xC0
PURPOSE_SLOT = 0x51

# uint64 >> 11 leaves 53 bits; scale into [0, 1)
UNIT_SCALE = 1.0 / 9007199254740992.0

# binomial counts are drawn in blocks of this many slots so that
# (1-p)^block never underflows for p <= 1/2
DRAW_BLOCK = 512


def mix64(z: int) -> int:
    """splitmix64 finalizer: full-avalanche 64-bit mix."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def keyed(h: int, word: int) -> int:
    """Fold one key word into a hash state."""
    return mix64(((h ^ (word & MASK64)) + GOLDEN) & MASK64)


def stratum_key(seed: int, tag: int) -> int:
    return keyed(seed & MASK64, tag)


def to_unit(x: int) -> float:
    """Map a uint64 to a double in [0, 1)."""
    return (x >> 11) * UNIT_SCALE


def binpow(base: float, e: int) -> float:
    """base**e by binary exponentiation using only IEEE multiplies."""
    result = 1.0
    b = base
    while e > 0:
        if e & 1:
            result = result * b
        e >>= 1
        if e:
            b = b * b
    return result


def walk_small(u: float, kc: int, p: float) -> int:
    """Invert the Binomial(kc, p) CDF at u for p <= 1/2 and kc <= DRAW_BLOCK."""
    pmf = binpow(1.0 - p, kc)
    cdf = pmf
    odds = p / (1.0 - p)
    x = 0
    while cdf <= u and x < kc:
        x += 1
        pmf = (pmf * odds) * ((kc - x + 1) / x)
        cdf = cdf + pmf
    return x


def _blocked_count(h_ord: int, k: int, p: float, flip: bool) -> int:
    h_cnt = keyed(h_ord, PURPOSE_COUNT)
    total = 0
    done = 0
    idx = 0
    while done < k:
        kc = k - done
        if kc > DRAW_BLOCK:
            kc = DRAW_BLOCK
        u = to_unit(keyed(h_cnt, idx))
        if flip:
            u = 1.0 - u
        total += walk_small(u, kc, p)
        done += kc
        idx += 1
    return total


def draw_count(h_ord: int, k: int, p: float) -> int:
    """Sample Binomial(k, p) from the pair's decision stream.

    p > 1/2 goes through the complement so the block walk only ever
    sees p <= 1/2, where (1-p)^block stays in the normal double range.
    """
    if p >= 1.0:
        return k
    if p > 0.5:
        return k - _blocked_count(h_ord, k, 1.0 - p, True)
    return _blocked_count(h_ord, k, p, False)
