# cython: language_level=3
"""Compiled hot loops. Signatures mirror ``monofourier._fallback`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil
    int parity64 "__builtin_parityll"(unsigned long long) nogil

# indexed by parity; avoids a data-dependent branch in the inner loops
cdef double SIGN[2]
SIGN[0] = 1.0
SIGN[1] = -1.0


def wht_inplace(double[::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double u, v
    with nogil:
        while h < n:
            i = 0
            while i < n:
                for j in range(i, i + h):
                    u = a[j]
                    v = a[j + h]
                    a[j] = u + v
                    a[j + h] = u - v
                i += 2 * h
            h *= 2


def char_means(const uint64_t[::1] points, const double[::1] y, const uint64_t[::1] masks):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t k = masks.shape[0]
    cdef Py_ssize_t a, j
    cdef uint64_t s
    cdef double acc
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for a in range(k):
            s = masks[a]
            acc = 0.0
            for j in range(n):
                acc += SIGN[parity64(s & ~points[j])] * y[j]
            o[a] = acc / n
    return out


def eval_spectrum(const uint64_t[::1] points, const uint64_t[::1] masks, const double[::1] coeffs):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t k = masks.shape[0]
    cdef Py_ssize_t a, j
    cdef uint64_t x
    cdef double acc
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for j in range(n):
            x = ~points[j]
            acc = 0.0
            for a in range(k):
                acc += SIGN[parity64(masks[a] & x)] * coeffs[a]
            o[j] = acc
    return out


def coord_bin_stats(const uint64_t[::1] points, const double[::1] y, int d):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t j
    cdef int i
    cdef uint64_t x, bit
    sums = np.zeros(d, dtype=np.float64)
    counts = np.zeros(d, dtype=np.int64)
    cdef double[::1] sv = sums
    cdef int64_t[::1] cv = counts
    with nogil:
        for j in range(n):
            x = points[j]
            for i in range(d):
                bit = (x >> i) & 1
                sv[i] += bit * y[j]
                cv[i] += bit
    return sums, counts


def far_from_all(const uint64_t[:, ::1] kept, Py_ssize_t count,
                 const uint64_t[::1] cand, int min_dist):
    cdef Py_ssize_t limbs = cand.shape[0]
    cdef Py_ssize_t r, l
    cdef int dist
    cdef bint ok = True
    with nogil:
        for r in range(count):
            dist = 0
            for l in range(limbs):
                dist += popcount64(kept[r, l] ^ cand[l])
            if dist < min_dist:
                ok = False
                break
    return ok
