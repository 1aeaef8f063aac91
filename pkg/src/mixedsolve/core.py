"""Precision-tagged matrix types, precision conversion, products and norms.

Two working precisions are supported: ``LOW`` (float32) and ``HIGH``
(float64). Vectors are plain 1-D numpy arrays; matrices are wrapped so that
their invariants are checked once, at construction, and the storage is
frozen afterwards.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InvalidMatrix, OverflowOnDemotion

LOW = np.dtype(np.float32)
HIGH = np.dtype(np.float64)
_PRECISIONS = (LOW, HIGH)


def unit_roundoff(dtype):
    """Half the gap between 1 and the next representable number."""
    return float(np.finfo(dtype).eps) / 2


def _check_dtype(dtype):
    dtype = np.dtype(dtype)
    if dtype not in _PRECISIONS:
        raise TypeError(f"unsupported precision {dtype}; use float32 or float64")
    return dtype


def _freeze(arr):
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PrecisionPair:
    """Unit roundoffs of the low (``eps_s``) and high (``eps_d``) precision.

    ``eps_s == eps_d`` is accepted so the fixed-precision refinement case can
    be expressed with the same type.
    """

    eps_s: float
    eps_d: float

    def __post_init__(self):
        if not (0 < self.eps_d <= self.eps_s < 1):
            raise ValueError(f"need 0 < eps_d <= eps_s < 1, got {self.eps_s}, {self.eps_d}")

    @classmethod
    def from_dtypes(cls, low=LOW, high=HIGH):
        return cls(unit_roundoff(low), unit_roundoff(high))

    @staticmethod
    def _dtype_for(eps):
        for dt in _PRECISIONS:
            if unit_roundoff(dt) == eps:
                return dt
        raise ValueError(f"no supported floating type has unit roundoff {eps}")

    @property
    def low(self):
        return self._dtype_for(self.eps_s)

    @property
    def high(self):
        return self._dtype_for(self.eps_d)


SINGLE_DOUBLE = PrecisionPair.from_dtypes(LOW, HIGH)


class DenseMatrix:
    """Dense column-major matrix in float32 or float64."""

    __slots__ = ("data",)

    def __init__(self, data, dtype=None):
        arr = np.array(data, dtype=dtype if dtype is not None else HIGH, order="F", copy=True)
        if arr.ndim != 2:
            raise InvalidMatrix(f"expected a 2-D array, got {arr.ndim}-D")
        _check_dtype(arr.dtype)
        if not np.all(np.isfinite(arr)):
            raise InvalidMatrix("matrix has non-finite entries")
        self.data = _freeze(arr)

    @classmethod
    def _wrap(cls, arr):
        # trusted internal constructor: arr is already F-ordered, finite and owned
        obj = cls.__new__(cls)
        obj.data = _freeze(arr)
        return obj

    @property
    def shape(self):
        return self.data.shape

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def nnz(self):
        return int(np.count_nonzero(self.data))

    @property
    def nbytes(self):
        return self.data.nbytes

    def to_numpy(self):
        return np.array(self.data)

    def is_symmetric(self, rtol=None):
        if self.rows != self.cols:
            return False
        if rtol is None:
            rtol = 4 * unit_roundoff(self.dtype)
        a = self.data
        return bool(np.all(np.abs(a - a.T) <= rtol * np.maximum(np.abs(a), np.abs(a.T))))

    def __matmul__(self, x):
        return matvec(self, x)

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols}, {self.dtype})"


class CsrMatrix:
    """Compressed-sparse-row matrix with sorted, duplicate-free rows.

    Use :meth:`from_coo` to build one from unsorted triplets (duplicates are
    summed). The plain constructor validates the arrays it is given and
    rejects anything that is not already canonical.
    """

    __slots__ = ("rows", "cols", "row_ptr", "col_idx", "values")

    def __init__(self, rows, cols, row_ptr, col_idx, values, dtype=None):
        rows, cols = int(rows), int(cols)
        if rows < 0 or cols < 0:
            raise InvalidMatrix("negative dimension")
        row_ptr = np.array(row_ptr, dtype=np.intp, copy=True)
        col_idx = np.array(col_idx, dtype=np.intp, copy=True)
        values = np.array(values, dtype=dtype if dtype is not None else HIGH, copy=True)
        _check_dtype(values.dtype)
        if row_ptr.ndim != 1 or col_idx.ndim != 1 or values.ndim != 1:
            raise InvalidMatrix("CSR arrays must be 1-D")
        if row_ptr.size != rows + 1:
            raise InvalidMatrix(f"row_ptr has length {row_ptr.size}, expected {rows + 1}")
        if row_ptr[0] != 0:
            raise InvalidMatrix("row_ptr[0] must be 0")
        if np.any(np.diff(row_ptr) < 0):
            raise InvalidMatrix("row_ptr must be nondecreasing")
        if row_ptr[-1] != values.size or col_idx.size != values.size:
            raise InvalidMatrix("row_ptr[-1], len(col_idx) and len(values) disagree")
        if col_idx.size and (col_idx.min() < 0 or col_idx.max() >= cols):
            raise InvalidMatrix("column index out of range")
        if col_idx.size > 1:
            # strictly increasing within a row; steps across a row boundary are free
            step_ok = np.diff(col_idx) > 0
            boundary = np.zeros(col_idx.size - 1, dtype=bool)
            inner = row_ptr[1:-1]
            inner = inner[(inner > 0) & (inner < col_idx.size)]
            boundary[inner - 1] = True
            if not np.all(step_ok | boundary):
                raise InvalidMatrix("column indices must be strictly increasing within each row")
        if not np.all(np.isfinite(values)):
            raise InvalidMatrix("matrix has non-finite entries")
        self.rows, self.cols = rows, cols
        self.row_ptr = _freeze(row_ptr)
        self.col_idx = _freeze(col_idx)
        self.values = _freeze(values)

    @classmethod
    def from_coo(cls, rows, cols, i, j, v, dtype=None):
        i = np.asarray(i, dtype=np.intp).ravel()
        j = np.asarray(j, dtype=np.intp).ravel()
        v = np.asarray(v, dtype=dtype if dtype is not None else HIGH).ravel()
        if not (i.size == j.size == v.size):
            raise InvalidMatrix("triplet arrays differ in length")
        if i.size and (i.min() < 0 or i.max() >= rows or j.min() < 0 or j.max() >= cols):
            raise InvalidMatrix("triplet index out of range")
        key = i * max(cols, 1) + j
        order = np.argsort(key, kind="stable")
        key, v = key[order], v[order]
        uniq, first = np.unique(key, return_index=True)
        summed = np.add.reduceat(v, first) if v.size else v
        ui, uj = np.divmod(uniq, max(cols, 1))
        row_ptr = np.zeros(rows + 1, dtype=np.intp)
        np.add.at(row_ptr, ui + 1, 1)
        return cls(rows, cols, np.cumsum(row_ptr), uj, summed, dtype=v.dtype)

    @classmethod
    def from_dense(cls, a, dtype=None):
        a = np.asarray(a)
        i, j = np.nonzero(a)
        return cls.from_coo(a.shape[0], a.shape[1], i, j, a[i, j], dtype=dtype or a.dtype)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def dtype(self):
        return self.values.dtype

    @property
    def nnz(self):
        return int(self.values.size)

    @property
    def nbytes(self):
        return self.values.nbytes + self.col_idx.nbytes + self.row_ptr.nbytes

    def to_dense(self):
        out = np.zeros((self.rows, self.cols), dtype=self.dtype, order="F")
        r = np.repeat(np.arange(self.rows), np.diff(self.row_ptr))
        out[r, self.col_idx] = self.values
        return out

    def _with_values(self, values):
        obj = CsrMatrix.__new__(CsrMatrix)
        obj.rows, obj.cols = self.rows, self.cols
        obj.row_ptr, obj.col_idx = self.row_ptr, self.col_idx
        obj.values = _freeze(values)
        return obj

    def __matmul__(self, x):
        return matvec(self, x)

    def __repr__(self):
        return f"CsrMatrix({self.rows}x{self.cols}, nnz={self.nnz}, {self.dtype})"


class Permutation:
    """Row permutation stored as a LAPACK-style sequential pivot list.

    ``pivot[k] = p`` means rows ``k`` and ``p`` were swapped at step ``k``.
    ``perm`` is the equivalent map: ``(P @ b)[i] == b[perm[i]]``.
    """

    __slots__ = ("pivot", "perm")

    def __init__(self, pivot):
        pivot = np.array(pivot, dtype=np.intp, copy=True)
        n = pivot.size
        if n and (pivot.min() < 0 or pivot.max() >= n):
            raise ValueError("pivot entry out of range")
        perm = np.arange(n, dtype=np.intp)
        for k, p in enumerate(pivot):
            if p != k:
                perm[k], perm[p] = perm[p], perm[k]
        self.pivot = _freeze(pivot)
        self.perm = _freeze(perm)

    def __len__(self):
        return self.pivot.size

    def apply(self, b):
        return np.asarray(b)[self.perm]

    def matrix(self):
        n = len(self)
        p = np.zeros((n, n))
        p[np.arange(n), self.perm] = 1.0
        return p


def _as_vector(x, dtype=None):
    x = np.asarray(x)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {x.shape}")
    if dtype is not None and x.dtype != dtype:
        raise TypeError(f"vector is {x.dtype}, operator is {dtype}")
    return x


def demote(a, dtype=LOW):
    """Round a high-precision matrix or vector to the low precision.

    Structure (shape, sparsity pattern) is preserved; each entry is rounded
    to nearest. Raises :class:`OverflowOnDemotion` instead of producing inf.
    """
    dtype = _check_dtype(dtype)
    big = np.finfo(dtype).max
    if isinstance(a, DenseMatrix):
        vals = a.data
    elif isinstance(a, CsrMatrix):
        vals = a.values
    else:
        vals = np.asarray(a, dtype=HIGH)
    if vals.size:
        worst = np.max(np.abs(vals))
        if worst > big:
            raise OverflowOnDemotion(float(worst))
    if isinstance(a, DenseMatrix):
        return DenseMatrix._wrap(np.asarray(vals, dtype=dtype, order="F").copy(order="F"))
    if isinstance(a, CsrMatrix):
        return a._with_values(vals.astype(dtype))
    return vals.astype(dtype)


def promote(a, dtype=HIGH):
    """Exact widening conversion; inverse of :func:`demote` on low-precision data."""
    dtype = _check_dtype(dtype)
    if isinstance(a, DenseMatrix):
        return DenseMatrix._wrap(a.data.astype(dtype, order="F"))
    if isinstance(a, CsrMatrix):
        return a._with_values(a.values.astype(dtype))
    return np.asarray(a).astype(dtype)


def matvec(a, x):
    """``y = A x`` evaluated in the precision of ``A`` (``x`` must match it)."""
    x = _as_vector(x, a.dtype)
    if a.cols != x.size:
        raise DimensionMismatch(f"operator has {a.cols} columns, vector has {x.size} entries")
    if isinstance(a, DenseMatrix):
        return a.data @ x
    out = np.empty(a.rows, dtype=a.dtype)
    kernels.csr_matvec(a.row_ptr, a.col_idx, a.values, np.ascontiguousarray(x), out)
    return out


def rmatvec(a, x):
    """``y = A^T x`` in the precision of ``A``."""
    x = _as_vector(x, a.dtype)
    if a.rows != x.size:
        raise DimensionMismatch(f"operator has {a.rows} rows, vector has {x.size} entries")
    if isinstance(a, DenseMatrix):
        return a.data.T @ x
    out = np.empty(a.cols, dtype=a.dtype)
    kernels.csr_rmatvec(a.row_ptr, a.col_idx, a.values, np.ascontiguousarray(x), out)
    return out


def norm2(x):
    """Euclidean norm, accumulated in float64 with scaling against overflow."""
    x = np.asarray(x, dtype=HIGH).ravel()
    if x.size == 0:
        return 0.0
    scale = float(np.max(np.abs(x)))
    if scale == 0.0 or not np.isfinite(scale):
        return scale
    y = x / scale
    return scale * float(np.sqrt(np.dot(y, y)))


def spectral_norm_estimate(a, iters=50, seed=0):
    """Lower estimate of ``||A||_2`` by power iteration on ``A^T A``.

    The estimate ``||A v_k||`` never exceeds the true norm and does not
    decrease with ``iters`` for a fixed seed.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.cols).astype(a.dtype)
    vn = norm2(v)
    if vn == 0.0:
        return 0.0
    v /= vn
    est = 0.0
    for _ in range(iters):
        w = matvec(a, v)
        est = norm2(w)
        if est == 0.0:
            break
        z = rmatvec(a, w)
        zn = norm2(z)
        if zn == 0.0:
            break
        v = (z / zn).astype(a.dtype, copy=False)
    return est
