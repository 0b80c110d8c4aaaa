# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Every function here has a drop-in twin in :mod:`bylinerank._pykernels`;
the two must agree to the last bit on identical inputs.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()

# scheme layout: intra first, last, others; extra first, second, second_last, last, others
DEF I_FIRST = 0
DEF I_LAST = 1
DEF I_OTHERS = 2
DEF E_FIRST = 3
DEF E_SECOND = 4
DEF E_SECOND_LAST = 5
DEF E_LAST = 6
DEF E_OTHERS = 7


cdef void _fill_intra(double[:] out, Py_ssize_t off, int64_t n, const double[:] s) noexcept nogil:
    cdef Py_ssize_t j
    cdef double total, share
    if n == 1:
        out[off] = 1.0
        return
    if n == 2:
        total = s[I_FIRST] + s[I_LAST]
        out[off] = s[I_FIRST] / total
        out[off + 1] = s[I_LAST] / total
        return
    share = s[I_OTHERS] / (n - 2)
    out[off] = s[I_FIRST]
    for j in range(1, n - 1):
        out[off + j] = share
    out[off + n - 1] = s[I_LAST]


cdef void _fill_extra(double[:] out, Py_ssize_t off, int64_t n, const double[:] s) noexcept nogil:
    cdef Py_ssize_t j
    cdef double total, share
    if n == 1:
        out[off] = 1.0
        return
    if n == 2:
        total = s[E_FIRST] + s[E_LAST]
        out[off] = s[E_FIRST] / total
        out[off + 1] = s[E_LAST] / total
        return
    if n == 3:
        total = s[E_FIRST] + s[E_SECOND] + s[E_LAST]
        out[off] = s[E_FIRST] / total
        out[off + 1] = s[E_SECOND] / total
        out[off + 2] = s[E_LAST] / total
        return
    if n == 4:
        total = s[E_FIRST] + s[E_SECOND] + s[E_SECOND_LAST] + s[E_LAST]
        out[off] = s[E_FIRST] / total
        out[off + 1] = s[E_SECOND] / total
        out[off + 2] = s[E_SECOND_LAST] / total
        out[off + 3] = s[E_LAST] / total
        return
    share = s[E_OTHERS] / (n - 4)
    out[off] = s[E_FIRST]
    out[off + 1] = s[E_SECOND]
    for j in range(2, n - 2):
        out[off + j] = share
    out[off + n - 2] = s[E_SECOND_LAST]
    out[off + n - 1] = s[E_LAST]


def allocate_weighted(sizes, intra, scheme):
    """Position weights for a batch of bylines, flattened in byline order."""
    cdef const int64_t[:] sz = np.ascontiguousarray(sizes, dtype=np.int64)
    cdef const uint8_t[:] im = np.ascontiguousarray(intra, dtype=np.uint8)
    cdef const double[:] s = np.ascontiguousarray(scheme, dtype=np.float64)
    cdef Py_ssize_t k, off = 0, nb = sz.shape[0]
    cdef int64_t total = 0
    for k in range(nb):
        total += sz[k]
    result = np.empty(total, dtype=np.float64)
    cdef double[:] out = result
    with nogil:
        for k in range(nb):
            if im[k]:
                _fill_intra(out, off, sz[k], s)
            else:
                _fill_extra(out, off, sz[k], s)
            off += sz[k]
    return result


def allocate_fractional(sizes):
    cdef const int64_t[:] sz = np.ascontiguousarray(sizes, dtype=np.int64)
    cdef Py_ssize_t k, j, off = 0, nb = sz.shape[0]
    cdef int64_t total = 0
    cdef double share
    for k in range(nb):
        total += sz[k]
    result = np.empty(total, dtype=np.float64)
    cdef double[:] out = result
    with nogil:
        for k in range(nb):
            share = 1.0 / sz[k]
            for j in range(sz[k]):
                out[off + j] = share
            off += sz[k]
    return result


def accumulate(slot_researcher, slot_pub, w_weighted, w_fractional, pub_impact, Py_ssize_t n_researchers):
    """Sum per-researcher credit in slot order.

    Rows of the result: weighted, fractional, full output; then the same
    three multiplied by the publication's normalized impact. Slots with a
    negative researcher index are untracked and skipped.
    """
    cdef const int64_t[:] rix = np.ascontiguousarray(slot_researcher, dtype=np.int64)
    cdef const int64_t[:] pix = np.ascontiguousarray(slot_pub, dtype=np.int64)
    cdef const double[:] ww = np.ascontiguousarray(w_weighted, dtype=np.float64)
    cdef const double[:] wf = np.ascontiguousarray(w_fractional, dtype=np.float64)
    cdef const double[:] imp = np.ascontiguousarray(pub_impact, dtype=np.float64)
    result = np.zeros((6, n_researchers), dtype=np.float64)
    cdef double[:, :] acc = result
    cdef Py_ssize_t j, r, n = rix.shape[0]
    cdef double c
    with nogil:
        for j in range(n):
            r = rix[j]
            if r < 0:
                continue
            c = imp[pix[j]]
            acc[0, r] += ww[j]
            acc[1, r] += wf[j]
            acc[2, r] += 1.0
            acc[3, r] += c * ww[j]
            acc[4, r] += c * wf[j]
            acc[5, r] += c
    return result


def average_ranks(values):
    """1-based ranks, ties sharing the mean of the positions they occupy."""
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    order_arr = np.argsort(values, kind="mergesort")
    cdef const int64_t[:] order = order_arr.astype(np.int64)
    cdef Py_ssize_t n = v.shape[0], i = 0, j, k
    result = np.empty(n, dtype=np.float64)
    cdef double[:] out = result
    cdef double avg
    with nogil:
        while i < n:
            j = i
            while j + 1 < n and v[order[j + 1]] == v[order[i]]:
                j += 1
            avg = 0.5 * (i + j) + 1.0
            for k in range(i, j + 1):
                out[order[k]] = avg
            i = j + 1
    return result
