"""Command-line entry point.

Exit status: 0 on success, 2 when a solve or sweep did not converge (the
CSV report is still written), 1 on usage or I/O errors.
"""
import argparse
import sys
import time

import numpy as np

from . import csvio, kernels
from .core import SINGLE_DOUBLE, CsrMatrix, DenseMatrix, demote, norm2, spectral_norm_estimate
from .errors import FallbackRequired, MaxIterationsExceeded, ParseError, SolverError
from .experiments import (
    CondSweepSpec,
    condition_sweep,
    gen_prescribed_cond,
    poisson1d,
    poisson2d,
    solve_single,
    timing_bench,
)
from .krylov import RestartConfig, fgmres_mixed, gmres_reference
from .mixed_ir import (
    BackwardError,
    IrConfig,
    MatchReference,
    backward_stop,
    ir_solve,
    residual,
    solve_reference,
)
from .mmio import read_matrix_market

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def build_parser():
    p = _Parser(prog="mixedsolve", description="Mixed-precision linear solvers")
    p.add_argument("--kernels", choices=["compiled", "python"], help="kernel implementation")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("solve-dense", help="dense LU/Cholesky solve")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="FILE", help="MatrixMarket file")
    src.add_argument("--random", type=int, metavar="N", help="random N x N with prescribed kappa")
    d.add_argument("--kappa", type=float, default=100.0)
    d.add_argument("--backend", choices=["lu", "cholesky"], default="lu")
    d.add_argument("--mode", choices=["mixed", "double", "single"], default="mixed")
    d.add_argument("--max-iters", type=int, default=30)
    d.add_argument("--stop", choices=["backward", "match-ref"], default="backward")
    d.add_argument("--match-factor", type=float, default=1.0)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", metavar="CSV")

    it = sub.add_parser("solve-iterative", help="FGMRES-GMRES or plain GMRES on a sparse system")
    src = it.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="FILE", help="MatrixMarket file")
    src.add_argument("--stencil", type=_stencil, metavar="SPEC", help="poisson1d:N or poisson2d:NX[xNY]")
    it.add_argument("--m-in", type=int, default=20)
    it.add_argument("--m-out", type=int, default=10)
    it.add_argument("--m", type=int, help="plain GMRES restart (default 2*m_out + m_in)")
    it.add_argument("--mode", choices=["mixed", "double-inner", "plain-gmres"], default="mixed")
    it.add_argument("--tol", type=float, help="relative residual target (default: backward-error test)")
    it.add_argument("--max-outer", type=int, default=1000, help="outer cycle / restart cap")
    it.add_argument("--seed", type=int, default=0)
    it.add_argument("--out", metavar="CSV")

    c = sub.add_parser("cond-sweep", help="mean refinement iterations versus condition number")
    c.add_argument("--n", type=int, default=200)
    c.add_argument("--trials", type=int, default=200)
    c.add_argument("--kappas", type=_float_list, default=[1e1, 1e2, 1e3, 1e4, 1e5, 1e6])
    c.add_argument("--max-iters", type=int, default=30)
    c.add_argument("--match-factor", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", metavar="CSV")

    b = sub.add_parser("bench", help="double vs single vs mixed dense timings")
    b.add_argument("--sizes", type=_int_list, default=[256, 512, 1024])
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", metavar="CSV")
    return p


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rhs(a, seed):
    x_true = np.random.default_rng(seed).standard_normal(a.cols)
    if isinstance(a, DenseMatrix):
        return a.data @ x_true
    return a @ x_true


def _stencil(text):
    kind, _, size = text.partition(":")
    try:
        if kind == "poisson1d":
            return kind, int(size), None
        if kind == "poisson2d":
            nx, _, ny = size.partition("x")
            return kind, int(nx), int(ny) if ny else None
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad stencil {text!r}; use poisson1d:N or poisson2d:NX[xNY]")


def _build_stencil(spec):
    kind, nx, ny = spec
    return poisson1d(nx) if kind == "poisson1d" else poisson2d(nx, ny)


def _cmd_solve_dense(args):
    if args.matrix:
        m = read_matrix_market(args.matrix)
        a = DenseMatrix(m.to_dense()) if isinstance(m, CsrMatrix) else m
    else:
        a = gen_prescribed_cond(args.random, args.kappa, args.seed, spd=args.backend == "cholesky")
    if a.rows != a.cols:
        raise UsageError("solve-dense needs a square matrix")
    b = _rhs(a, args.seed)
    n = a.rows
    t0 = time.perf_counter()
    iterations, factor_seconds = 0, 0.0
    if args.mode == "mixed":
        rule = BackwardError() if args.stop == "backward" else MatchReference(args.match_factor)
        cfg = IrConfig(max_iters=args.max_iters, stop_rule=rule, backend=args.backend)
        try:
            x, report = ir_solve(a, b, cfg)
            converged = True
        except FallbackRequired as exc:
            print(f"mixedsolve: {exc.reason}; falling back to high precision", file=sys.stderr)
            report = exc.report
            x = solve_reference(a, b, args.backend)
            converged = False
        if report is not None:
            iterations = report.iterations
            factor_seconds = report.wall_times.get("factor", 0.0)
        a_norm = spectral_norm_estimate(a)
    else:
        a_norm = spectral_norm_estimate(a)
        tf = time.perf_counter()
        if args.mode == "double":
            x = solve_reference(a, b, args.backend)
            eps = SINGLE_DOUBLE.eps_d
        else:
            if args.backend != "lu":
                raise UsageError("single mode supports the lu backend only")
            x = solve_single(a, b)
            eps = SINGLE_DOUBLE.eps_s
        factor_seconds = time.perf_counter() - tf
        converged = backward_stop(norm2(residual(a, x, b)), norm2(x), a_norm, n, eps)
    row = {
        "mode": args.mode,
        "n": n,
        "nnz": a.nnz,
        "backend": args.backend,
        "iterations": iterations,
        "converged": bool(converged),
        "final_residual": norm2(residual(a, x, b)),
        "a_norm_est": a_norm,
        "factor_seconds": factor_seconds,
        "total_seconds": time.perf_counter() - t0,
    }
    _emit(csvio.write_csv([row], csvio.SOLVE), args.out)
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _cmd_solve_iterative(args):
    a = read_matrix_market(args.matrix) if args.matrix else _build_stencil(args.stencil)
    if a.rows != a.cols:
        raise UsageError("solve-iterative needs a square matrix")
    b = _rhs(a, args.seed)
    cfg = RestartConfig(args.m_in, args.m_out, args.m)
    t0 = time.perf_counter()
    if args.mode == "plain-gmres":
        setup = 0.0
        backend = f"gmres({cfg.m})"
        run = lambda: gmres_reference(a, b, cfg.m, args.tol, args.max_outer)
    else:
        a_low = demote(a) if args.mode == "mixed" else a
        setup = time.perf_counter() - t0
        backend = f"fgmres({cfg.m_out})-gmres_{'sp' if args.mode == 'mixed' else 'dp'}({cfg.m_in})"
        run = lambda: fgmres_mixed(a, a_low, b, cfg, args.tol, args.max_outer)
    try:
        _, report = run()
    except MaxIterationsExceeded as exc:
        report = exc.report
    row = {
        "mode": args.mode,
        "n": a.rows,
        "nnz": a.nnz,
        "backend": backend,
        "iterations": report.iterations,
        "converged": report.converged,
        "final_residual": report.final_residual,
        "a_norm_est": report.a_norm_est,
        "factor_seconds": setup,
        "total_seconds": time.perf_counter() - t0,
    }
    _emit(csvio.write_csv([row], csvio.SOLVE), args.out)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _cmd_cond_sweep(args):
    spec = CondSweepSpec(
        n=args.n,
        trials=args.trials,
        kappas=tuple(args.kappas),
        max_iters=args.max_iters,
        seed=args.seed,
        match_factor=args.match_factor,
    )
    rows = condition_sweep(spec)
    _emit(csvio.write_csv(rows, csvio.COND_SWEEP), args.out)
    return EXIT_NOT_CONVERGED if any(r.failure_rate >= 0.5 for r in rows) else EXIT_OK


def _cmd_bench(args):
    rows = timing_bench(args.sizes, args.repeats, args.seed)
    _emit(csvio.write_csv(rows, csvio.BENCH), args.out)
    return EXIT_OK


_COMMANDS = {
    "solve-dense": _cmd_solve_dense,
    "solve-iterative": _cmd_solve_iterative,
    "cond-sweep": _cmd_cond_sweep,
    "bench": _cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.kernels:
            kernels.use_backend(args.kernels)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mixedsolve: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    except (OSError, ParseError, SolverError, ValueError, RuntimeError) as exc:
        print(f"mixedsolve: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
