"""Pure-Python (numpy-vectorized) versions of the compiled kernels.

Same signatures and in-place semantics as ``_kernels``; used when the
extension is not built. Loops run over one index; the inner work is a
numpy slice operation in the precision of the arrays.
"""
import numpy as np


def lu_factor_inplace(a, piv):
    n = a.shape[0]
    for k in range(n):
        # argmax returns the first maximum: ties go to the smallest row index
        p = k + int(np.argmax(np.abs(a[k:, k])))
        piv[k] = p
        if a[p, k] == 0:
            return k
        if p != k:
            a[[k, p], :] = a[[p, k], :]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return -1


def lu_solve_inplace(a, piv, b):
    n = a.shape[0]
    for j in range(n):
        p = piv[j]
        if p != j:
            b[j], b[p] = b[p], b[j]
    for j in range(n):
        b[j + 1:] -= a[j + 1:, j] * b[j]
    for j in range(n - 1, -1, -1):
        b[j] /= a[j, j]
        b[:j] -= a[:j, j] * b[j]


def cholesky_inplace(a):
    n = a.shape[0]
    for k in range(n):
        d = a[k, k]
        if not d > 0:
            return k
        d = np.sqrt(d)
        a[k, k] = d
        a[k + 1:, k] /= d
        col = a[k + 1:, k]
        # only the lower triangle of the trailing block is meaningful
        a[k + 1:, k + 1:] -= np.outer(col, col)
    return -1


def cholesky_solve_inplace(l, b):
    n = l.shape[0]
    for j in range(n):
        b[j] /= l[j, j]
        b[j + 1:] -= l[j + 1:, j] * b[j]
    for j in range(n - 1, -1, -1):
        b[j] = (b[j] - np.dot(l[j + 1:, j], b[j + 1:])) / l[j, j]


def csr_matvec(row_ptr, col_idx, values, x, out):
    out[:] = 0
    if values.size == 0:
        return
    products = values * x[col_idx]
    # reduceat needs strictly increasing offsets, so reduce at non-empty rows only
    nonempty = np.diff(row_ptr) > 0
    out[nonempty] = np.add.reduceat(products, row_ptr[:-1][nonempty])


def csr_rmatvec(row_ptr, col_idx, values, x, out):
    rows = np.repeat(np.arange(row_ptr.size - 1), np.diff(row_ptr))
    out[:] = 0
    np.add.at(out, col_idx, values * x[rows])
