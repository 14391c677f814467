# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sampling loops.

Uniforms come straight from a numpy ``BitGenerator`` through its C interface,
so a block consumes exactly the stream ``Generator.random`` would produce.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport log, pow
from numpy.random cimport bitgen_t

import numpy as np


cdef inline double _quantile(int kind, const double[::1] levels, const double[::1] values,
                             double a, double b, double level) noexcept nogil:
    cdef Py_ssize_t lo, hi, mid, m
    if kind == 1:
        return -log(level) / a
    if kind == 2:
        return a * pow(level, -b)
    m = levels.shape[0]
    # last index with levels[idx] <= level
    lo = 0
    hi = m
    while lo < hi:
        mid = (lo + hi) >> 1
        if levels[mid] <= level:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    if lo >= m - 1 or levels[lo] == level:
        return values[lo]
    return values[lo] + (values[lo + 1] - values[lo]) * (level - levels[lo]) / (levels[lo + 1] - levels[lo])


cdef inline double _slot_mean(bitgen_t *rng, int kind, const double[::1] levels, const double[::1] values,
                              double a, double b, const double[::1] base, double width,
                              const double[::1] lo, const double[::1] hi) noexcept nogil:
    cdef Py_ssize_t i, n = base.shape[0]
    cdef double acc = 0.0, level, x
    for i in range(n):
        level = base[i] + width * (1.0 - rng.next_double(rng.state))
        if level > 1.0:
            level = 1.0
        x = _quantile(kind, levels, values, a, b, level)
        if x < lo[i]:
            x = lo[i]
        elif x > hi[i]:
            x = hi[i]
        acc += x
    return acc / n


def quantile_many(int kind, const double[::1] levels, const double[::1] values, double a, double b,
                  const double[::1] u):
    cdef Py_ssize_t j, m = u.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for j in range(m):
            o[j] = _quantile(kind, levels, values, a, b, u[j])
    return out


def slot_averages(object bit_generator, int kind, const double[::1] levels, const double[::1] values,
                  double a, double b,
                  const double[::1] base0, double width0, const double[::1] lo0, const double[::1] hi0,
                  const double[::1] base1, double width1, const double[::1] lo1, const double[::1] hi1,
                  double split, int mode, Py_ssize_t reps):
    """Per-replication slot averages.

    ``mode`` 0 and 1 average the unprimed or primed family; mode 2 first
    draws one uniform and picks the unprimed family when it falls below
    ``split``.
    """
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")
    out = np.empty(reps)
    cdef double[::1] o = out
    cdef Py_ssize_t r
    cdef double u
    with bit_generator.lock, nogil:
        for r in range(reps):
            if mode == 0:
                o[r] = _slot_mean(rng, kind, levels, values, a, b, base0, width0, lo0, hi0)
            elif mode == 1:
                o[r] = _slot_mean(rng, kind, levels, values, a, b, base1, width1, lo1, hi1)
            else:
                u = rng.next_double(rng.state)
                if u < split:
                    o[r] = _slot_mean(rng, kind, levels, values, a, b, base0, width0, lo0, hi0)
                else:
                    o[r] = _slot_mean(rng, kind, levels, values, a, b, base1, width1, lo1, hi1)
    return out
