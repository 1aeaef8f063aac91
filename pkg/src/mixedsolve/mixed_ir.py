"""Mixed-precision iterative refinement over a low-precision direct solver.

The expensive factorization and the triangular solves run in the low
precision; the residual ``b - A x`` (against the original matrix) and the
solution update run in the high precision. The loop is::

    x0 = solve_low(b)
    repeat:  r = b - A x        (high)
             stop if predicate(r, x)
             z = solve_low(r)   (low)
             x = x + z          (high)
"""
import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import (
    HIGH,
    SINGLE_DOUBLE,
    DenseMatrix,
    PrecisionPair,
    _as_vector,
    demote,
    matvec,
    norm2,
    spectral_norm_estimate,
)
from .dense_direct import cholesky_factor, cholesky_solve, lu_factor, lu_solve
from .errors import (
    DimensionMismatch,
    FallbackRequired,
    NotPositiveDefinite,
    OverflowOnDemotion,
    SingularPivot,
)


class Backend(str, enum.Enum):
    LU = "lu"
    CHOLESKY = "cholesky"


@dataclass(frozen=True)
class BackwardError:
    """Stop once ``||b - Ax|| <= ||x|| ||A|| eps sqrt(n)``; ``eps=None`` means the high unit roundoff."""

    eps: float | None = None


@dataclass(frozen=True)
class MatchReference:
    """Stop once the residual is within ``tolerance_factor`` of a full high-precision solve's residual."""

    tolerance_factor: float = 1.0

    def __post_init__(self):
        if self.tolerance_factor < 1:
            raise ValueError("tolerance_factor must be >= 1")


@dataclass(frozen=True)
class IrConfig:
    max_iters: int = 30
    stop_rule: BackwardError | MatchReference = field(default_factory=BackwardError)
    precision: PrecisionPair = SINGLE_DOUBLE
    backend: Backend = Backend.LU
    norm_iters: int = 50
    norm_seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        object.__setattr__(self, "backend", Backend(self.backend))


@dataclass
class SolveReport:
    """Telemetry for one solve.

    ``residual_norms[0]`` belongs to the initial iterate. ``iterations``
    counts correction steps for refinement and outer (FGMRES) or total
    (GMRES) steps for the Krylov solvers. Byte and vector counts come from
    the allocation accountant of each solver.
    """

    iterations: int = 0
    residual_norms: list = field(default_factory=list)
    converged: bool = False
    fell_back_to_high: bool = False
    low_bytes: int = 0
    high_bytes: int = 0
    a_norm_est: float = float("nan")
    wall_times: dict = field(default_factory=dict)
    outer_cycles: int = 0
    inner_iterations: int = 0
    high_vectors: int = 0
    low_vectors: int = 0

    @property
    def final_residual(self):
        return self.residual_norms[-1] if self.residual_norms else float("nan")

    @property
    def matrix_bytes(self):
        return self.low_bytes + self.high_bytes


class PrecisionAudit:
    """Records the floating type and flop count of every audited step.

    Pass an instance as ``audit=`` to :func:`ir_solve`; steps are labelled
    ``"residual"`` and ``"update"`` (the two high-precision steps) and
    ``"correction"`` (the low-precision solve).
    """

    def __init__(self):
        self.events = []

    def record(self, step, dtype, flops):
        self.events.append((step, np.dtype(dtype), int(flops)))

    def flops(self, steps=None, dtype=None):
        return sum(
            f
            for s, d, f in self.events
            if (steps is None or s in steps) and (dtype is None or d == np.dtype(dtype))
        )


def residual(a, x, b):
    """``b - A x`` computed in high precision against the original ``A``."""
    b = _as_vector(b, HIGH)
    x = _as_vector(x, HIGH)
    if a.dtype != HIGH:
        raise TypeError("residuals need the high-precision matrix")
    if b.size != a.rows:
        raise DimensionMismatch(f"operator has {a.rows} rows, right-hand side has {b.size} entries")
    return b - matvec(a, x)


def backward_stop(r_norm, x_norm, a_norm, n, eps):
    """Normwise backward-error test ``r <= x * a * eps * sqrt(n)`` (inclusive)."""
    return r_norm <= x_norm * a_norm * eps * math.sqrt(n)


def datta_iterations(pp, kappa):
    """Predicted refinement steps ``ceil(ln eps_d / (ln eps_s + ln kappa))``.

    Returns ``math.inf`` when ``kappa * eps_s >= 1``, where refinement is not
    expected to converge at all.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if kappa * pp.eps_s >= 1:
        return math.inf
    return math.ceil(math.log(pp.eps_d) / (math.log(pp.eps_s) + math.log(kappa)))


def _factor(a, backend, overwrite=False):
    if backend is Backend.CHOLESKY:
        return cholesky_factor(a, overwrite), cholesky_solve
    return lu_factor(a, overwrite), lu_solve


def _check_system(a, b, backend):
    if not isinstance(a, DenseMatrix):
        raise TypeError("dense solvers need a DenseMatrix")
    if a.rows != a.cols:
        raise DimensionMismatch(f"matrix must be square, got {a.rows}x{a.cols}")
    b = _as_vector(b)
    if b.size != a.rows:
        raise DimensionMismatch(f"matrix is {a.rows}x{a.cols}, right-hand side has {b.size} entries")
    if backend is Backend.CHOLESKY and not a.is_symmetric():
        raise ValueError("the Cholesky backend needs a symmetric matrix")
    return np.asarray(b, dtype=HIGH)


def solve_reference(a, b, backend=Backend.LU):
    """Solve entirely in ``a``'s (high) precision with the same kernels."""
    backend = Backend(backend)
    b = _check_system(a, b, backend)
    f, solve = _factor(a, backend)
    return solve(f, b)


def reference_matrix_bytes(a):
    """Matrix storage of the reference solver: one factor array, LAPACK-style in place."""
    return a.rows * a.cols * np.dtype(HIGH).itemsize


def ir_solve(a, b, cfg=None, audit=None):
    """Mixed-precision iterative refinement; returns ``(x, report)``.

    Raises :class:`FallbackRequired` when the low-precision factorization
    breaks down or the iteration cap is reached without meeting the stop
    rule; the exception carries the last iterate and the report so the
    caller can fall back to :func:`solve_reference`.
    """
    cfg = cfg or IrConfig()
    b = _check_system(a, b, cfg.backend)
    if a.dtype != HIGH:
        raise TypeError("ir_solve expects the high-precision matrix")
    low = cfg.precision.low
    n = a.rows
    rule = cfg.stop_rule
    report = SolveReport(high_bytes=a.nbytes)
    t_start = time.perf_counter()

    if isinstance(rule, MatchReference):
        x_ref = solve_reference(a, b, cfg.backend)
        target = rule.tolerance_factor * norm2(residual(a, x_ref, b))
        report.wall_times["reference"] = time.perf_counter() - t_start

        def converged(r_norm, x):
            return r_norm <= target

    else:
        eps = rule.eps if rule.eps is not None else cfg.precision.eps_d
        report.a_norm_est = spectral_norm_estimate(a, cfg.norm_iters, cfg.norm_seed)

        def converged(r_norm, x):
            return backward_stop(r_norm, norm2(x), report.a_norm_est, n, eps)

    t0 = time.perf_counter()
    try:
        # the demoted copy is the only low-precision matrix; factor it in place
        f, solve = _factor(demote(a, low), cfg.backend, overwrite=True)
    except (SingularPivot, NotPositiveDefinite, OverflowOnDemotion) as exc:
        raise FallbackRequired(f"low-precision factorization failed: {exc}", cause=exc) from exc
    report.low_bytes = f.nbytes
    x = solve(f, demote(b, low)).astype(HIGH)
    report.wall_times["factor"] = time.perf_counter() - t0
    if audit is not None:
        audit.record("correction", low, 2 * n * n)

    steps = []
    for k in range(cfg.max_iters + 1):
        ts = time.perf_counter()
        r = residual(a, x, b)
        if audit is not None:
            audit.record("residual", np.result_type(r, a.dtype), 2 * n * n)
        r_norm = norm2(r)
        report.residual_norms.append(r_norm)
        if not np.isfinite(r_norm):
            break
        if converged(r_norm, x):
            report.converged = True
            break
        if k == cfg.max_iters:
            break
        try:
            r_low = demote(r, low)
        except OverflowOnDemotion:
            break  # diverged past the low-precision range
        z = solve(f, r_low)
        if audit is not None:
            audit.record("correction", z.dtype, 2 * n * n)
        x = x + z.astype(HIGH)
        if audit is not None:
            audit.record("update", x.dtype, n)
        report.iterations = k + 1
        steps.append(time.perf_counter() - ts)

    report.wall_times["iterations"] = steps
    report.wall_times["total"] = time.perf_counter() - t_start
    if not report.converged:
        # a failed run is reported at the cap, whatever step it stopped at
        report.iterations = cfg.max_iters
        raise FallbackRequired(
            f"refinement did not converge in {cfg.max_iters} iterations", x=x, report=report
        )
    return x, report
