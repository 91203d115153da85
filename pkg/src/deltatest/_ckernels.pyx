# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Results must match ``_pykernels`` bit for bit."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def subsample_sums(const double[::1] values, const double[:, ::1] uniforms):
    """Sum of ``k`` values drawn without replacement, one row of uniforms per draw.

    Partial Fisher-Yates: step ``i`` swaps slot ``i`` with slot
    ``i + floor(u[r, i] * (n - i))``. Swaps are undone after every row so the
    index buffer never needs re-initialising.
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t reps = uniforms.shape[0]
    cdef Py_ssize_t k = uniforms.shape[1]
    if k > n:
        raise ValueError("cannot draw more values than the window holds")
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] res = out
    idx_arr = np.arange(n, dtype=np.intp)
    swap_arr = np.empty(k, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef Py_ssize_t[::1] swaps = swap_arr
    cdef Py_ssize_t r, i, j, tmp
    cdef double acc
    with nogil:
        for r in range(reps):
            acc = 0.0
            for i in range(k):
                j = i + <Py_ssize_t>(uniforms[r, i] * (n - i))
                swaps[i] = j
                tmp = idx[j]
                idx[j] = idx[i]
                idx[i] = tmp
                acc = acc + values[tmp]
            res[r] = acc
            i = k - 1
            while i >= 0:
                j = swaps[i]
                tmp = idx[j]
                idx[j] = idx[i]
                idx[i] = tmp
                i -= 1
    return out


def ks_two_sample(const double[::1] a, const double[::1] b):
    """sup |F_a - F_b| for two ascending arrays (right-continuous ECDFs)."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t i = 0, j = 0
    cdef double x, d, best = 0.0
    cdef double fa = <double>na, fb = <double>nb
    with nogil:
        while i < na or j < nb:
            if j >= nb or (i < na and a[i] <= b[j]):
                x = a[i]
            else:
                x = b[j]
            while i < na and a[i] <= x:
                i += 1
            while j < nb and b[j] <= x:
                j += 1
            d = i / fa - j / fb
            if d < 0:
                d = -d
            if d > best:
                best = d
    return best
