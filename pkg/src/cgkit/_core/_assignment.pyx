# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Dense float64 kernel for the minimum-cost assignment subproblem.

Same augmenting-path algorithm (and identical tie-breaking) as
``cgkit._core.hungarian_py``; this version is the hot path for the
doubly-stochastic linear minimization oracle.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def solve(double[:, ::1] cost not None):
    """Row-to-column assignment minimizing the total cost of a square
    float64 matrix."""
    cdef Py_ssize_t n = cost.shape[0]
    if cost.shape[1] != n:
        raise ValueError("cost matrix must be square")
    assignment = np.empty(n, dtype=np.intp)
    if n == 0:
        return assignment

    cdef double INF = np.inf
    cdef cnp.ndarray[double, ndim=1] u_arr = np.zeros(n + 1)
    cdef cnp.ndarray[double, ndim=1] v_arr = np.zeros(n + 1)
    cdef cnp.ndarray[double, ndim=1] minv_arr = np.empty(n + 1)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] match_arr = np.zeros(n + 1, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] way_arr = np.zeros(n + 1, dtype=np.intp)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used_arr = np.zeros(n + 1, dtype=np.uint8)
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] minv = minv_arr
    cdef cnp.intp_t[::1] match = match_arr
    cdef cnp.intp_t[::1] way = way_arr
    cdef cnp.uint8_t[::1] used = used_arr
    cdef cnp.intp_t[::1] out = assignment

    cdef Py_ssize_t i, j, i0, j0, j1
    cdef double cur, delta

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INF
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = match[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    for j in range(1, n + 1):
        out[match[j] - 1] = j - 1
    return assignment
