# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp

ctypedef long long i64


def matmul(const i64[:, :, ::1] a, const i64[:, :, ::1] b,
           const i64[::1] mul_ptr, const i64[::1] mul_idx, const i64[::1] mul_val):
    cdef Py_ssize_t n = a.shape[0], phi = a.shape[2]
    cdef Py_ssize_t i, j, k, p, q, s, pq
    cdef i64 x, xy
    out = np.zeros((n, n, phi), dtype=np.int64)
    cdef i64[:, :, ::1] c = out
    for i in range(n):
        for k in range(n):
            for p in range(phi):
                x = a[i, k, p]
                if x == 0:
                    continue
                for j in range(n):
                    for q in range(phi):
                        xy = b[k, j, q]
                        if xy == 0:
                            continue
                        xy = x * xy
                        pq = p * phi + q
                        for s in range(mul_ptr[pq], mul_ptr[pq + 1]):
                            c[i, j, mul_idx[s]] += xy * mul_val[s]
    return out


def accumulate_series(i64[:, ::1] out, exps, weights, tops, i64 count):
    cdef Py_ssize_t rows = out.shape[0], m = out.shape[1]
    cdef Py_ssize_t t, r, a, w, b, f, nf = len(exps)
    buf_arr = np.zeros((rows, m), dtype=np.int64)
    num_arr = np.zeros((rows, m), dtype=np.int64)
    cdef i64[:, ::1] buf = buf_arr
    cdef i64[:, ::1] num = num_arr
    cdef i64[:, ::1] tmp
    buf[0, 0] = 1
    for f in range(nf):
        a = (<Py_ssize_t> exps[f]) % m
        w = weights[f]
        b = tops[f]
        for t in range(rows):
            for r in range(m):
                num[t, (r + a) % m] = buf[t, r]
        for t in range(b, rows):
            for r in range(m):
                num[t, r] -= buf[t - b, r]
        for t in range(w, rows):
            for r in range(m):
                num[t, (r + a) % m] += num[t - w, r]
        tmp = buf
        buf = num
        num = tmp
    for t in range(rows):
        for r in range(m):
            out[t, r] += count * buf[t, r]
