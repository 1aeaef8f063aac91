# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dense/sparse kernels, instantiated for float32 and float64.

Every routine works in the precision of its array arguments; nothing is
promoted internally. Factorizations overwrite their argument in place and
report breakdown through an integer status (-1 means success) so the
Python layer decides which exception to raise.
"""
from libc.math cimport fabs, sqrt

ctypedef fused real:
    float
    double


def lu_factor_inplace(real[::1, :] a, Py_ssize_t[::1] piv):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p
    cdef Py_ssize_t info = -1
    cdef real amax, cur, pivval, ukj, tmp
    with nogil:
        for k in range(n):
            p = k
            amax = fabs(a[k, k])
            for i in range(k + 1, n):
                cur = fabs(a[i, k])
                if cur > amax:
                    amax = cur
                    p = i
            piv[k] = p
            if amax == 0:
                info = k
                break
            if p != k:
                for j in range(n):
                    tmp = a[k, j]
                    a[k, j] = a[p, j]
                    a[p, j] = tmp
            pivval = a[k, k]
            for i in range(k + 1, n):
                a[i, k] = a[i, k] / pivval
            for j in range(k + 1, n):
                ukj = a[k, j]
                if ukj != 0:
                    for i in range(k + 1, n):
                        a[i, j] = a[i, j] - a[i, k] * ukj
    return info


def lu_solve_inplace(const real[::1, :] a, const Py_ssize_t[::1] piv, real[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, p
    cdef real bj, tmp
    with nogil:
        for j in range(n):
            p = piv[j]
            if p != j:
                tmp = b[j]
                b[j] = b[p]
                b[p] = tmp
        for j in range(n):
            bj = b[j]
            if bj != 0:
                for i in range(j + 1, n):
                    b[i] = b[i] - a[i, j] * bj
        for j in range(n - 1, -1, -1):
            b[j] = b[j] / a[j, j]
            bj = b[j]
            if bj != 0:
                for i in range(j):
                    b[i] = b[i] - a[i, j] * bj


def cholesky_inplace(real[::1, :] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t info = -1
    cdef real d, ljk
    with nogil:
        for k in range(n):
            d = a[k, k]
            if not d > 0:
                info = k
                break
            d = <real>sqrt(d)
            a[k, k] = d
            for i in range(k + 1, n):
                a[i, k] = a[i, k] / d
            for j in range(k + 1, n):
                ljk = a[j, k]
                if ljk != 0:
                    for i in range(j, n):
                        a[i, j] = a[i, j] - a[i, k] * ljk
    return info


def cholesky_solve_inplace(const real[::1, :] l, real[::1] b):
    cdef Py_ssize_t n = l.shape[0]
    cdef Py_ssize_t i, j
    cdef real bj, acc
    with nogil:
        for j in range(n):
            b[j] = b[j] / l[j, j]
            bj = b[j]
            if bj != 0:
                for i in range(j + 1, n):
                    b[i] = b[i] - l[i, j] * bj
        for j in range(n - 1, -1, -1):
            acc = b[j]
            for i in range(j + 1, n):
                acc = acc - l[i, j] * b[i]
            b[j] = acc / l[j, j]


def csr_matvec(const Py_ssize_t[::1] row_ptr, const Py_ssize_t[::1] col_idx,
               const real[::1] values, const real[::1] x, real[::1] out):
    cdef Py_ssize_t nrows = row_ptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef real acc
    with nogil:
        for i in range(nrows):
            acc = 0
            for k in range(row_ptr[i], row_ptr[i + 1]):
                acc = acc + values[k] * x[col_idx[k]]
            out[i] = acc


def csr_rmatvec(const Py_ssize_t[::1] row_ptr, const Py_ssize_t[::1] col_idx,
                const real[::1] values, const real[::1] x, real[::1] out):
    cdef Py_ssize_t nrows = row_ptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef real xi
    with nogil:
        out[:] = 0
        for i in range(nrows):
            xi = x[i]
            for k in range(row_ptr[i], row_ptr[i + 1]):
                out[col_idx[k]] = out[col_idx[k]] + values[k] * xi
