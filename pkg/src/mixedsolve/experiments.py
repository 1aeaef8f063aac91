"""Reproduction harness: conditioned test matrices, the iteration-count
sweep, restart defaults for the sparse test set, and dense timings."""
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .core import HIGH, LOW, SINGLE_DOUBLE, CsrMatrix, DenseMatrix, demote
from .dense_direct import lu_factor, lu_solve
from .errors import FallbackRequired, UnknownMatrixId
from .krylov import RestartConfig
from .mixed_ir import IrConfig, MatchReference, datta_iterations, ir_solve, solve_reference


@dataclass(frozen=True)
class MatrixRegistryEntry:
    id: int
    name: str
    size: int
    nonzeroes: int
    symmetric: bool
    pos_def: bool
    cond_magnitude: float


# sparse test set, metadata only (matrices are not bundled)
MATRIX_REGISTRY = {
    1: MatrixRegistryEntry(1, "SiO", 33401, 1317655, True, False, 1e3),
    2: MatrixRegistryEntry(2, "Lin", 25600, 1766400, True, False, 1e5),
    3: MatrixRegistryEntry(3, "c-71", 76638, 859554, True, False, 1e1),
    4: MatrixRegistryEntry(4, "cage-11", 39082, 559722, False, False, 1e0),
    5: MatrixRegistryEntry(5, "raefsky3", 21200, 1488768, False, False, 1e1),
    6: MatrixRegistryEntry(6, "poisson3Db", 85623, 2374949, False, False, 1e3),
}

# (m_in, m_out, m) tuned per matrix; m is not always 2*m_out + m_in
_RESTARTS = {
    1: (30, 20, 150),
    2: (20, 10, 40),
    3: (100, 9, 300),
    4: (10, 4, 18),
    5: (20, 20, 300),
    6: (20, 10, 50),
}


def restart_defaults(matrix_id):
    try:
        m_in, m_out, m = _RESTARTS[matrix_id]
    except KeyError:
        raise UnknownMatrixId(f"no restart values for matrix {matrix_id!r}") from None
    return RestartConfig(m_in=m_in, m_out=m_out, m=m)


def _orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    # sign fix makes q Haar-distributed
    return q * np.sign(np.diag(r))


def gen_prescribed_cond(n, kappa, seed=0, spd=False):
    """``U diag(s) V^T`` with random orthogonal ``U, V`` and ``s`` log-spaced from 1 to ``1/kappa``.

    ``spd=True`` uses ``V = U``, giving a symmetric positive definite matrix
    with the same spectrum.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    rng = np.random.default_rng(seed)
    u = _orthogonal(rng, n)
    s = np.logspace(0.0, -np.log10(kappa), n)
    if spd:
        a = (u * s) @ u.T
        a = (a + a.T) / 2
    else:
        a = (u * s) @ _orthogonal(rng, n).T
    return DenseMatrix._wrap(np.asfortranarray(a))


def poisson1d(n):
    """Tridiagonal ``(-1, 2, -1)`` as CSR."""
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(n)
    rows = np.concatenate([i, i[1:], i[:-1]])
    cols = np.concatenate([i, i[:-1], i[1:]])
    vals = np.concatenate([np.full(n, 2.0), np.full(2 * (n - 1), -1.0)])
    return CsrMatrix.from_coo(n, n, rows, cols, vals)


def poisson2d(nx, ny=None):
    """Five-point Laplacian on an ``nx`` by ``ny`` grid (x fastest), as CSR."""
    ny = nx if ny is None else ny
    if nx < 1 or ny < 1:
        raise ValueError("grid sides must be >= 1")
    idx = np.arange(nx * ny).reshape(ny, nx)
    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [np.full(nx * ny, 4.0)]
    for a, b in (
        (idx[:, :-1], idx[:, 1:]),
        (idx[:, 1:], idx[:, :-1]),
        (idx[:-1, :], idx[1:, :]),
        (idx[1:, :], idx[:-1, :]),
    ):
        rows.append(a.ravel())
        cols.append(b.ravel())
        vals.append(np.full(a.size, -1.0))
    n = nx * ny
    return CsrMatrix.from_coo(n, n, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


@dataclass(frozen=True)
class CondSweepSpec:
    n: int = 200
    trials: int = 200
    kappas: tuple = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
    max_iters: int = 30
    seed: int = 0
    match_factor: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(k < 1 for k in self.kappas):
            raise ValueError("every kappa must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    kappa: float
    n: int
    trials: int
    mean_iters: float
    failure_rate: float
    predicted_iters: float


def _trial_system(n, kappa, seed_seq):
    mat_seed, rhs_seed = seed_seq.spawn(2)
    a = gen_prescribed_cond(n, kappa, mat_seed)
    x_true = np.random.default_rng(rhs_seed).standard_normal(n)
    return a, a.data @ x_true, x_true


def condition_sweep(spec):
    """Mean refinement iterations per condition number.

    Each trial stops when its residual is no larger than ``match_factor``
    times that of a full high-precision LU solve. Non-converged trials
    count as ``max_iters``.
    """
    cfg = IrConfig(max_iters=spec.max_iters, stop_rule=MatchReference(spec.match_factor))
    root = np.random.SeedSequence(spec.seed)
    rows = []
    for kappa, kseq in zip(spec.kappas, root.spawn(len(spec.kappas))):
        iters = []
        failures = 0
        for tseq in kseq.spawn(spec.trials):
            a, b, _ = _trial_system(spec.n, kappa, tseq)
            try:
                _, report = ir_solve(a, b, cfg)
                iters.append(report.iterations)
            except FallbackRequired:
                failures += 1
                iters.append(spec.max_iters)
        rows.append(
            SweepRow(
                kappa=float(kappa),
                n=spec.n,
                trials=spec.trials,
                mean_iters=float(np.mean(iters)),
                failure_rate=failures / spec.trials,
                predicted_iters=float(datta_iterations(SINGLE_DOUBLE, kappa)),
            )
        )
    return rows


@dataclass(frozen=True)
class BenchRow:
    n: int
    dp_seconds: float
    sp_seconds: float
    mixed_seconds: float
    iterations: int
    samples: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if min(self.dp_seconds, self.sp_seconds, self.mixed_seconds) <= 0:
            raise ValueError("timings must be positive")

    @property
    def speedup_mixed(self):
        return self.dp_seconds / self.mixed_seconds

    @property
    def sp_ratio(self):
        return self.dp_seconds / self.sp_seconds


def solve_single(a, b):
    """Pure low-precision LU solve of a high-precision system (result promoted)."""
    f = lu_factor(demote(a, LOW), overwrite=True)
    return lu_solve(f, demote(b, LOW)).astype(HIGH)


def _median_time(fn, repeats):
    fn()  # warm-up, discarded
    samples = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t)
    return statistics.median(samples), samples


def timing_bench(sizes, repeats=3, seed=0, kappa=1e2):
    """Median wall time of double, single and mixed dense LU solves per size.

    Timings depend on the machine and are informational; the iteration
    count is deterministic for a given seed.
    """
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    rows = []
    for n in sizes:
        a, b, _ = _trial_system(n, kappa, np.random.SeedSequence([seed, n]))
        iterations = set()

        def mixed():
            _, report = ir_solve(a, b)
            iterations.add(report.iterations)

        dp, dp_s = _median_time(lambda: solve_reference(a, b), repeats)
        sp, sp_s = _median_time(lambda: solve_single(a, b), repeats)
        mx, mx_s = _median_time(mixed, repeats)
        if len(iterations) != 1:
            raise RuntimeError(f"iteration count varied across repeats: {sorted(iterations)}")
        rows.append(
            BenchRow(n, dp, sp, mx, iterations.pop(), samples={"dp": dp_s, "sp": sp_s, "mixed": mx_s})
        )
    return rows
