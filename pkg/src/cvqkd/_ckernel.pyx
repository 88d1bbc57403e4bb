# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counter-based sampling and tally kernels.

Must stay output-identical to ``_pykernel``.
"""
from libc.math cimport log, sqrt, cos, sin
from libc.stdint cimport uint64_t, uint8_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t key, uint64_t counter) nogil:
    cdef uint64_t z = key + (counter + 1) * GAMMA
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def mix(uint64_t key, uint64_t counter):
    return _mix(key, counter)


def fill_uniform(uint64_t key, uint64_t counter, double[::1] out):
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            # (0, 1]: never zero so log() is safe
            out[i] = ((_mix(key, counter + i) >> 11) + 1) * INV_2_53


def fill_normal(uint64_t key, uint64_t counter, double[::1] out):
    cdef Py_ssize_t i, n = out.shape[0]
    cdef double u1, u2, r, theta
    with nogil:
        i = 0
        while i < n:
            u1 = ((_mix(key, counter + i) >> 11) + 1) * INV_2_53
            u2 = ((_mix(key, counter + i + 1) >> 11) + 1) * INV_2_53
            r = sqrt(-2.0 * log(u1))
            theta = TWO_PI * u2
            out[i] = r * cos(theta)
            if i + 1 < n:
                out[i + 1] = r * sin(theta)
            i += 2


def fill_bits(uint64_t key, uint64_t counter, uint8_t[::1] out):
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            out[i] = <uint8_t>(_mix(key, counter + i) >> 63)


def tally(const double[::1] stat, const uint8_t[::1] bits, const uint8_t[::1] mask):
    """Return (count, errors, sum(sign*stat), sum(stat**2)) over masked entries."""
    cdef Py_ssize_t i, n = stat.shape[0]
    cdef long long count = 0, errors = 0
    cdef double s_sz = 0.0, s_zz = 0.0, z
    with nogil:
        for i in range(n):
            if mask[i]:
                z = stat[i]
                count += 1
                if (z < 0.0) != (bits[i] != 0):
                    errors += 1
                if bits[i]:
                    s_sz -= z
                else:
                    s_sz += z
                s_zz += z * z
    return count, errors, s_sz, s_zz
