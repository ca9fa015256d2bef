# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; signatures mirror ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def min_permutation_cost(const double[::1] weights, const double[::1] values):
    """Minimum of ``sum_i weights[i] * values[perm[i]]`` over all permutations.

    Enumerates every permutation with Heap's algorithm and recomputes the
    sum from scratch each time (no incremental drift).  Returns
    ``(cost, minimizer)``; among equal costs the first in enumeration order
    wins.
    """
    cdef Py_ssize_t d = weights.shape[0]
    if values.shape[0] != d:
        raise ValueError("weights and values differ in length")
    if d == 0:
        return 0.0, np.empty(0, dtype=np.intp)
    cdef cnp.intp_t[::1] perm = np.arange(d, dtype=np.intp)
    cdef cnp.intp_t[::1] best = np.arange(d, dtype=np.intp)
    cdef cnp.intp_t[::1] c = np.zeros(d, dtype=np.intp)
    cdef double cost, best_cost
    cdef Py_ssize_t i, k, tmp
    with nogil:
        best_cost = 0.0
        for k in range(d):
            best_cost += weights[k] * values[perm[k]]
        i = 1
        while i < d:
            if c[i] < i:
                if i % 2 == 0:
                    tmp = perm[0]; perm[0] = perm[i]; perm[i] = tmp
                else:
                    tmp = perm[c[i]]; perm[c[i]] = perm[i]; perm[i] = tmp
                cost = 0.0
                for k in range(d):
                    cost += weights[k] * values[perm[k]]
                if cost < best_cost:
                    best_cost = cost
                    for k in range(d):
                        best[k] = perm[k]
                c[i] += 1
                i = 1
            else:
                c[i] = 0
                i += 1
    return best_cost, np.asarray(best)


cdef inline Py_ssize_t _search_right(const double[::1] cdf, double u) noexcept nogil:
    # number of entries <= u, clamped to the last index
    cdef Py_ssize_t lo = 0, hi = cdf.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    if lo >= cdf.shape[0]:
        lo = cdf.shape[0] - 1
    return lo


def sample_counts(const double[::1] cdf_joint, const double[::1] cdf_a,
                  const double[::1] cdf_b, const double[:, ::1] uniforms):
    """Histogram of ``(initial state, n', m')`` draws by inverse CDF.

    ``uniforms`` has one row per cycle: column 0 picks the initial product
    state, columns 1 and 2 the re-thermalized levels of A and B.
    """
    if uniforms.shape[1] != 3:
        raise ValueError("uniforms must have three columns")
    cdef Py_ssize_t size = cdf_joint.shape[0]
    cdef Py_ssize_t da = cdf_a.shape[0], db = cdf_b.shape[0]
    counts_arr = np.zeros((size, da, db), dtype=np.int64)
    cdef cnp.int64_t[:, :, ::1] counts = counts_arr
    cdef Py_ssize_t r, i, a, b
    with nogil:
        for r in range(uniforms.shape[0]):
            i = _search_right(cdf_joint, uniforms[r, 0])
            a = _search_right(cdf_a, uniforms[r, 1])
            b = _search_right(cdf_b, uniforms[r, 2])
            counts[i, a, b] += 1
    return counts_arr
