"""Restarted GMRES and the inner-outer FGMRES(m_out)-GMRES(m_in) solver.

The outer flexible GMRES runs in high precision and is right-preconditioned
by one cycle of GMRES on the low-precision copy of the operator, started
from a zero guess. Operators are :class:`DenseMatrix` or :class:`CsrMatrix`
in either precision.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from .core import HIGH, LOW, _as_vector, matvec, norm2, spectral_norm_estimate, unit_roundoff
from .errors import DimensionMismatch, MaxIterationsExceeded, RankDeficient
from .mixed_ir import SolveReport

_REORTH = 1 / math.sqrt(2)


@dataclass(frozen=True)
class RestartConfig:
    """Restart lengths; ``m`` (plain GMRES) defaults to ``2 * m_out + m_in``."""

    m_in: int = 20
    m_out: int = 10
    m: int = None

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", 2 * self.m_out + self.m_in)
        if min(self.m_in, self.m_out, self.m) < 1:
            raise ValueError("restart lengths must be >= 1")


class VectorAccountant:
    """Tracks live and peak counts of basis vectors per floating type."""

    def __init__(self):
        self.live = {}
        self.peak = {}

    def alloc(self, dtype, count):
        key = np.dtype(dtype).name
        self.live[key] = self.live.get(key, 0) + count
        self.peak[key] = max(self.peak.get(key, 0), self.live[key])

    def free(self, dtype, count):
        self.live[np.dtype(dtype).name] -= count

    def peak_of(self, dtype):
        return self.peak.get(np.dtype(dtype).name, 0)


class _GivensLSQ:
    """Progressive QR of an upper-Hessenberg matrix by Givens rotations.

    Columns arrive one at a time; after each, ``|g[k]|`` is the residual of
    ``min ||beta e1 - H y||``.
    """

    def __init__(self, beta, m, dtype=HIGH):
        self.dtype = np.dtype(dtype)
        self.r = np.zeros((m + 1, m), dtype=self.dtype)
        self.cs = np.zeros(m, dtype=self.dtype)
        self.sn = np.zeros(m, dtype=self.dtype)
        self.g = np.zeros(m + 1, dtype=self.dtype)
        self.g[0] = beta
        self.k = 0

    def add_column(self, h):
        k = self.k
        col = np.zeros(k + 2, dtype=self.dtype)
        col[: len(h)] = h[: k + 2]
        for i in range(k):
            c, s = self.cs[i], self.sn[i]
            col[i], col[i + 1] = c * col[i] + s * col[i + 1], -s * col[i] + c * col[i + 1]
        a, b = col[k], col[k + 1]
        rho = np.hypot(a, b)
        if rho == 0:
            c, s = self.dtype.type(1), self.dtype.type(0)
        else:
            c, s = a / rho, b / rho
        self.cs[k], self.sn[k] = c, s
        col[k], col[k + 1] = rho, 0
        self.r[: k + 2, k] = col
        self.g[k + 1] = -s * self.g[k]
        self.g[k] = c * self.g[k]
        self.k = k + 1
        return abs(float(self.g[k + 1]))

    @property
    def residual_estimate(self):
        return abs(float(self.g[self.k]))

    def solve(self, k=None):
        k = self.k if k is None else k
        y = np.zeros(k, dtype=self.dtype)
        for j in range(k - 1, -1, -1):
            if self.r[j, j] == 0:
                raise RankDeficient(j)
            y[j] = (self.g[j] - np.dot(self.r[j, j + 1 : k], y[j + 1 : k])) / self.r[j, j]
        return y


def _solve_dropping_deficient(lsq):
    k = lsq.k
    while k > 0:
        try:
            return lsq.solve(k), k
        except RankDeficient as exc:
            k = exc.k
    return np.zeros(0, dtype=lsq.dtype), 0


def hessenberg_lsq(h, beta):
    """Minimize ``||beta e1 - H y||`` for a ``(k+1) x k`` upper-Hessenberg ``H``.

    Returns ``(y, residual_estimate)``. Raises :class:`RankDeficient` when a
    rotated diagonal entry is exactly zero.
    """
    h = np.asarray(h, dtype=HIGH)
    if h.ndim != 2 or h.shape[0] != h.shape[1] + 1:
        raise DimensionMismatch(f"expected a (k+1) x k array, got {h.shape}")
    if np.any(np.tril(h, -2)):
        raise ValueError("matrix is not upper Hessenberg")
    k = h.shape[1]
    lsq = _GivensLSQ(beta, k)
    for j in range(k):
        lsq.add_column(h[: j + 2, j])
    return lsq.solve(), lsq.residual_estimate


def _breakdown(h, dtype):
    # the new direction is roundoff relative to A v_j: the space is invariant
    return h[-1] <= unit_roundoff(dtype) * norm2(h)


def _orthogonalize(basis, j, w, dtype, reorth=True):
    """Modified Gram-Schmidt of ``w`` against ``basis[:j+1]``, one optional second pass."""
    h = np.zeros(j + 2, dtype=dtype)
    before = norm2(w)
    for i in range(j + 1):
        hij = np.dot(basis[i], w)
        h[i] = hij
        w -= hij * basis[i]
    after = norm2(w)
    if reorth and after < _REORTH * before:
        for i in range(j + 1):
            c = np.dot(basis[i], w)
            h[i] += c
            w -= c * basis[i]
        after = norm2(w)
    h[j + 1] = after
    return h


@dataclass
class ArnoldiWorkspace:
    """State of one Arnoldi cycle: ``basis[:steps+1]`` and the ``(steps+1) x steps`` Hessenberg."""

    basis: np.ndarray
    hessenberg: np.ndarray
    lsq: _GivensLSQ
    beta: float
    steps: int = 0
    breakdown: bool = False

    @property
    def givens(self):
        return self.lsq.cs[: self.steps], self.lsq.sn[: self.steps]

    @property
    def residual_estimate(self):
        return self.lsq.residual_estimate


def arnoldi_cycle(a, r0, m, tol=0.0, accountant=None):
    """Run up to ``m`` Arnoldi steps from ``r0`` in the operator's precision.

    Stops early on happy breakdown (``h[k+1,k] == 0``) or once the Givens
    residual estimate is at most ``tol``.
    """
    dtype = a.dtype
    r0 = np.asarray(r0, dtype=dtype)
    n = r0.size
    beta = norm2(r0)
    basis = np.zeros((m + 1, n), dtype=dtype)
    if accountant is not None:
        accountant.alloc(dtype, m + 1)
    hess = np.zeros((m + 1, m), dtype=dtype)
    ws = ArnoldiWorkspace(basis, hess, _GivensLSQ(beta, m, dtype), beta)
    if beta == 0:
        return ws
    basis[0] = r0 / dtype.type(beta)
    for j in range(m):
        w = matvec(a, basis[j])
        h = _orthogonalize(basis, j, w, dtype)
        ws.breakdown = _breakdown(h, dtype)
        if ws.breakdown:
            h[j + 1] = 0
        hess[: j + 2, j] = h
        est = ws.lsq.add_column(h)
        ws.steps = j + 1
        if ws.breakdown:
            break
        basis[j + 1] = w / h[j + 1]
        if est <= tol:
            break
    return ws


def gmres_cycle(a, b, x0, m, tol=0.0, accountant=None):
    """One restart cycle of GMRES(m); returns ``(x, residual_estimate, iters)``.

    Everything, including the Hessenberg least-squares problem, runs in the
    operator's precision.
    """
    dtype = a.dtype
    b = np.asarray(_as_vector(b), dtype=dtype)
    if a.rows != a.cols or b.size != a.rows:
        raise DimensionMismatch(f"operator {a.shape} incompatible with vector of length {b.size}")
    if x0 is None or not np.any(x0):
        x0 = np.zeros(b.size, dtype=dtype)
        r0 = b.copy()
    else:
        x0 = np.asarray(x0, dtype=dtype)
        r0 = b - matvec(a, x0)
    ws = arnoldi_cycle(a, r0, m, tol, accountant)
    if accountant is not None:
        accountant.free(dtype, m + 1)
    if ws.steps == 0:
        return x0, ws.beta, 0
    y, k = _solve_dropping_deficient(ws.lsq)
    x = x0 + ws.basis[:k].T @ y
    return x, ws.residual_estimate, ws.steps


class _StopTest:
    """Backward-error threshold (``tol=None``) or relative residual ``tol * ||b||``."""

    def __init__(self, a, b, tol, eps, norm_iters=50):
        self.n = b.size
        self.tol = tol
        self.b_norm = norm2(b)
        self.eps = eps
        self.a_norm = spectral_norm_estimate(a, norm_iters) if tol is None else float("nan")

    def threshold(self, x_norm):
        if self.tol is None:
            return x_norm * self.a_norm * self.eps * math.sqrt(self.n)
        return self.tol * self.b_norm

    def x_norm_floor(self):
        # ||b|| <= ||A|| ||x|| for any solution, so this never overstates the threshold
        return self.b_norm / self.a_norm if self.a_norm > 0 else 0.0


def _check_operator(a, b):
    if a.rows != a.cols:
        raise DimensionMismatch(f"operator must be square, got {a.shape}")
    b = np.asarray(_as_vector(b), dtype=HIGH)
    if b.size != a.rows:
        raise DimensionMismatch(f"operator {a.shape} incompatible with vector of length {b.size}")
    return b


def fgmres_mixed(
    a_high,
    a_low,
    b,
    cfg=None,
    tol=None,
    max_outer=1000,
    x0=None,
    inner=None,
    inner_tol=1e-4,
):
    """Inner-outer FGMRES(m_out)-GMRES(m_in); returns ``(x, report)``.

    ``tol=None`` stops on the backward-error test with the high unit
    roundoff; a float stops on ``||r|| <= tol ||b||``. Each preconditioner
    application is one GMRES(m_in) cycle on ``a_low`` from a zero guess,
    stopped early at relative residual ``inner_tol``. Pass ``a_low=a_high``
    for an all-high-precision comparator, or ``inner`` (a callable
    ``v -> z``) to replace the inner solve entirely. ``max_outer`` caps the
    number of outer restart cycles; on failure :class:`MaxIterationsExceeded`
    carries the last iterate and report.
    """
    cfg = cfg or RestartConfig()
    b = _check_operator(a_high, b)
    if a_high.dtype != HIGH:
        raise TypeError("the outer operator must be high precision")
    if a_low.shape != a_high.shape:
        raise DimensionMismatch("inner and outer operators differ in shape")
    n, m_out = b.size, cfg.m_out
    t_start = time.perf_counter()
    stop = _StopTest(a_high, b, tol, unit_roundoff(HIGH))
    acct = VectorAccountant()
    report = SolveReport(a_norm_est=stop.a_norm, high_bytes=a_high.nbytes)
    if a_low is not a_high:
        report.low_bytes = a_low.nbytes

    inner_dtype = a_low.dtype
    if inner is None:

        def inner(v):
            z, _, its = gmres_cycle(
                a_low, v.astype(inner_dtype), None, cfg.m_in, inner_tol * norm2(v), acct
            )
            report.inner_iterations += its
            return z

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=HIGH)
    v = np.zeros((m_out + 1, n))
    z = np.zeros((m_out, n))
    acct.alloc(HIGH, 2 * m_out + 1)
    for cycle in range(max_outer + 1):
        r = b - matvec(a_high, x)
        beta = norm2(r)
        report.residual_norms.append(beta)
        if beta <= stop.threshold(norm2(x)):
            report.converged = True
            break
        if cycle == max_outer or not np.isfinite(beta):
            break
        v[0] = r / beta
        lsq = _GivensLSQ(beta, m_out)
        for k in range(m_out):
            z[k] = inner(v[k])
            w = matvec(a_high, z[k])
            h = _orthogonalize(v, k, w, HIGH)
            done = _breakdown(h, HIGH)
            if done:
                h[k + 1] = 0
            est = lsq.add_column(h)
            report.iterations += 1
            if done:
                break
            v[k + 1] = w / h[k + 1]
            if est <= stop.threshold(max(norm2(x), stop.x_norm_floor())):
                y, kk = _solve_dropping_deficient(lsq)
                if est <= stop.threshold(norm2(x + z[:kk].T @ y)):
                    break
        y, kk = _solve_dropping_deficient(lsq)
        x = x + z[:kk].T @ y
        report.outer_cycles += 1

    report.high_vectors = acct.peak_of(HIGH)
    report.low_vectors = acct.peak_of(LOW)
    report.wall_times["total"] = time.perf_counter() - t_start
    if not report.converged:
        raise MaxIterationsExceeded(x, report)
    return x, report


def gmres_reference(a, b, m, tol=None, max_restarts=1000):
    """Plain restarted GMRES(m) entirely in high precision; returns ``(x, report)``."""
    b = _check_operator(a, b)
    if a.dtype != HIGH:
        raise TypeError("the reference solver needs a high-precision operator")
    t_start = time.perf_counter()
    stop = _StopTest(a, b, tol, unit_roundoff(HIGH))
    acct = VectorAccountant()
    report = SolveReport(a_norm_est=stop.a_norm, high_bytes=a.nbytes)
    x = np.zeros(b.size)
    for cycle in range(max_restarts + 1):
        r = b - matvec(a, x)
        beta = norm2(r)
        report.residual_norms.append(beta)
        if beta <= stop.threshold(norm2(x)):
            report.converged = True
            break
        if cycle == max_restarts or not np.isfinite(beta):
            break
        inner_tol = stop.threshold(max(norm2(x), stop.x_norm_floor()))
        x, _, its = gmres_cycle(a, b, x, m, inner_tol, acct)
        report.iterations += its
        report.outer_cycles += 1
    report.high_vectors = acct.peak_of(HIGH)
    report.wall_times["total"] = time.perf_counter() - t_start
    if not report.converged:
        raise MaxIterationsExceeded(x, report)
    return x, report
