"""Unblocked dense LU (partial pivoting) and Cholesky with triangular solves.

All work happens in the precision of the input matrix. The factorizations
copy their argument once and overwrite that copy, so the caller's matrix
(typically the high-precision original needed for residuals) is untouched.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import DenseMatrix, Permutation, _as_vector
from .errors import DimensionMismatch, NotPositiveDefinite, SingularPivot


@dataclass(frozen=True)
class LuFactors:
    """``P A = L U`` packed in one array: unit-lower ``L`` below the diagonal, ``U`` on and above."""

    packed: DenseMatrix
    perm: Permutation

    @property
    def n(self):
        return self.packed.rows

    @property
    def dtype(self):
        return self.packed.dtype

    @property
    def nbytes(self):
        return self.packed.nbytes

    def lower(self):
        a = self.packed.data
        return np.tril(a, -1) + np.eye(self.n, dtype=a.dtype)

    def upper(self):
        return np.triu(self.packed.data)


@dataclass(frozen=True)
class CholeskyFactor:
    lower: DenseMatrix

    @property
    def n(self):
        return self.lower.rows

    @property
    def dtype(self):
        return self.lower.dtype

    @property
    def nbytes(self):
        return self.lower.nbytes


def _workspace(a, overwrite):
    if a.rows != a.cols:
        raise DimensionMismatch(f"matrix must be square, got {a.rows}x{a.cols}")
    if a.rows < 1:
        raise DimensionMismatch("matrix must have at least one row")
    if overwrite and a.data.flags.owndata:
        work = a.data
        work.flags.writeable = True
        return work
    return np.array(a.data, order="F", copy=True)


def lu_factor(a, overwrite=False):
    """Gaussian elimination with partial pivoting in ``a``'s precision.

    The pivot at column ``k`` is the first entry of largest magnitude on or
    below the diagonal. Raises :class:`SingularPivot` when it is exactly 0.
    With ``overwrite=True`` the storage of ``a`` is reused for the factors
    and ``a`` must not be used afterwards.
    """
    work = _workspace(a, overwrite)
    piv = np.empty(a.rows, dtype=np.intp)
    info = kernels.lu_factor_inplace(work, piv)
    if info >= 0:
        raise SingularPivot(int(info))
    return LuFactors(DenseMatrix._wrap(work), Permutation(piv))


def lu_solve(f, b):
    b = _as_vector(b)
    if b.size != f.n:
        raise DimensionMismatch(f"factor is {f.n}x{f.n}, right-hand side has {b.size} entries")
    x = np.array(b, dtype=f.dtype, copy=True)
    kernels.lu_solve_inplace(f.packed.data, f.perm.pivot, x)
    return x


def cholesky_factor(a, overwrite=False):
    """Right-looking Cholesky ``A = L L^T`` reading only the lower triangle."""
    work = _workspace(a, overwrite)
    info = kernels.cholesky_inplace(work)
    if info >= 0:
        raise NotPositiveDefinite(int(info))
    work[np.triu_indices(a.rows, 1)] = 0
    return CholeskyFactor(DenseMatrix._wrap(work))


def cholesky_solve(f, b):
    b = _as_vector(b)
    if b.size != f.n:
        raise DimensionMismatch(f"factor is {f.n}x{f.n}, right-hand side has {b.size} entries")
    x = np.array(b, dtype=f.dtype, copy=True)
    kernels.cholesky_solve_inplace(f.lower.data, x)
    return x
