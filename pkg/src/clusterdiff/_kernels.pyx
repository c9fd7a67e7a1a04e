# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled one-pass kernel for weighted sampling with replacement.

Maintains k independent weighted reservoirs over a streamed chunk of
pair weights. Mirrors _kernels_py bit for bit: the same keyed splitmix64
decision stream and the same IEEE-754 arithmetic in the same order.
"""

from libc.stdint cimport uint64_t, int64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t PURPOSE_COUNT = 0xC0ULL
cdef uint64_t PURPOSE_SLOT = 0x51ULL
cdef double UNIT_SCALE = 1.0 / 9007199254740992.0
cdef long DRAW_BLOCK = 512


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t keyed(uint64_t h, uint64_t word) nogil:
    return mix64((h ^ word) + GOLDEN)


cdef inline double to_unit(uint64_t x) nogil:
    return <double>(x >> 11) * UNIT_SCALE


cdef inline double binpow(double base, long e) nogil:
    cdef double result = 1.0
    cdef double b = base
    while e > 0:
        if e & 1:
            result = result * b
        e >>= 1
        if e:
            b = b * b
    return result


cdef inline long walk_small(double u, long kc, double p) nogil:
    cdef double pmf = binpow(1.0 - p, kc)
    cdef double cdf = pmf
    cdef double odds = p / (1.0 - p)
    cdef long x = 0
    while cdf <= u and x < kc:
        x += 1
        pmf = (pmf * odds) * (<double>(kc - x + 1) / <double>x)
        cdf = cdf + pmf
    return x


cdef long blocked_count(uint64_t h_ord, long k, double p, bint flip) nogil:
    cdef uint64_t h_cnt = keyed(h_ord, PURPOSE_COUNT)
    cdef long total = 0
    cdef long done = 0
    cdef uint64_t idx = 0
    cdef long kc
    cdef double u
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


cdef long draw_count(uint64_t h_ord, long k, double p) nogil:
    if p >= 1.0:
        return k
    if p > 0.5:
        return k - blocked_count(h_ord, k, 1.0 - p, True)
    return blocked_count(h_ord, k, p, False)


def reservoir_update(int64_t[::1] slots, int64_t[::1] stamp, double carry,
                     long long start_ordinal, double[::1] weights,
                     unsigned long long key):
    """Advance the k reservoirs over one chunk of positive pair weights.

    slots[s] holds the ordinal of the pair currently drawn for slot s
    (-1 while empty); stamp is scratch for subset selection. Returns the
    updated cumulative stream weight.
    """
    cdef long m = weights.shape[0]
    cdef long k = slots.shape[0]
    cdef double c = carry
    cdef double w, p
    cdef long t, x, i, pick
    cdef long long ordv
    cdef uint64_t h_ord, h_slot, r
    cdef int64_t epoch
    with nogil:
        for t in range(m):
            w = weights[t]
            c = c + w
            p = w / c
            ordv = start_ordinal + t
            h_ord = keyed(<uint64_t>key, <uint64_t>ordv)
            x = draw_count(h_ord, k, p)
            if x <= 0:
                continue
            if x >= k:
                for i in range(k):
                    slots[i] = ordv
            else:
                h_slot = keyed(h_ord, PURPOSE_SLOT)
                epoch = <int64_t>ordv + 1
                for i in range(k - x, k):
                    r = keyed(h_slot, <uint64_t>i) % <uint64_t>(i + 1)
                    pick = <long>r
                    if stamp[pick] == epoch:
                        pick = i
                    stamp[pick] = epoch
                    slots[pick] = ordv
    return c


# test hooks for backend-equality checks

def _mix64(z):
    return mix64(<uint64_t>z)


def _keyed(h, word):
    return keyed(<uint64_t>h, <uint64_t>word)


def _binpow(base, e):
    return binpow(<double>base, <long>e)


def _walk_small(u, kc, p):
    return walk_small(<double>u, <long>kc, <double>p)


def _draw_count(h_ord, k, p):
    return draw_count(<uint64_t>h_ord, <long>k, <double>p)
