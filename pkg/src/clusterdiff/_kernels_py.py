"""Pure-Python/numpy fallback for the sampling kernel.

Produces bit-identical reservoir states to the compiled kernel: the
common no-replacement case is decided with vectorized arithmetic that
performs the exact same IEEE operations per element, and the rare
replacement events drop to the scalar routines in _rng.
"""

from __future__ import annotations

import numpy as np

from ._rng import (
    DRAW_BLOCK,
    GOLDEN,
    PURPOSE_COUNT,
    PURPOSE_SLOT,
    UNIT_SCALE,
    draw_count,
    keyed,
)

_U64 = np.uint64


def _mix_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def _keyed_vec(h, words: np.ndarray) -> np.ndarray:
    return _mix_vec((_U64(h) ^ words) + _U64(GOLDEN))


def _keyed_word_vec(hashes: np.ndarray, word: int) -> np.ndarray:
    return _mix_vec((hashes ^ _U64(word)) + _U64(GOLDEN))


def _to_unit_vec(x: np.ndarray) -> np.ndarray:
    return (x >> _U64(11)).astype(np.float64) * UNIT_SCALE


def _binpow_vec(base: np.ndarray, e: int) -> np.ndarray:
    # same multiply sequence per element as the scalar binpow
    result = np.ones_like(base)
    b = base.copy()
    while e > 0:
        if e & 1:
            result = result * b
        e >>= 1
        if e:
            b = b * b
    return result


def reservoir_update(slots: np.ndarray, stamp: np.ndarray, carry: float,
                     start_ordinal: int, weights: np.ndarray, key: int) -> float:
    """Advance the k reservoirs over one chunk of positive pair weights."""
    m = int(weights.shape[0])
    k = int(slots.shape[0])
    if m == 0 or k == 0:
        return carry + float(np.sum(weights))

    # cumulative stream weight, same fold order as the scalar loop
    c = np.cumsum(np.concatenate(([carry], weights)))[1:]
    p = weights / c

    ords = np.arange(start_ordinal, start_ordinal + m, dtype=np.uint64)
    h_ord = _keyed_vec(key, ords)
    h_cnt = _keyed_word_vec(h_ord, PURPOSE_COUNT)

    # a pair replaces nothing iff every block's uniform lands below (1-p)^block
    blocks = (k + DRAW_BLOCK - 1) // DRAW_BLOCK
    k_last = k - DRAW_BLOCK * (blocks - 1)
    no_win = p <= 0.5
    one_minus_p = 1.0 - p
    pmf_full = _binpow_vec(one_minus_p, DRAW_BLOCK) if blocks > 1 else None
    pmf_last = _binpow_vec(one_minus_p, k_last)
    for blk in range(blocks):
        u = _to_unit_vec(_keyed_word_vec(h_cnt, blk))
        limit = pmf_last if blk == blocks - 1 else pmf_full
        no_win &= u < limit

    for t in np.nonzero(~no_win)[0]:
        ordv = start_ordinal + int(t)
        pv = float(p[t])
        x = k if pv >= 1.0 else draw_count(keyed(key, ordv), k, pv)
        if x <= 0:
            continue
        if x >= k:
            slots[:] = ordv
            continue
        h_slot = keyed(keyed(key, ordv), PURPOSE_SLOT)
        epoch = ordv + 1
        for i in range(k - x, k):
            pick = keyed(h_slot, i) % (i + 1)
            if stamp[pick] == epoch:
                pick = i
            stamp[pick] = epoch
            slots[pick] = ordv

    return float(c[-1])
