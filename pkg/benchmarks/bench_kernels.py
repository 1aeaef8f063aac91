"""Compiled versus numpy-fallback kernels: LU, Cholesky and CSR matvec.

    python benchmarks/bench_kernels.py --sizes 64,128,256 --out kernels.csv
"""
import argparse
import csv
import statistics
import sys
import time

import numpy as np

from mixedsolve import kernels
from mixedsolve.core import CsrMatrix
from mixedsolve.experiments import poisson2d


def median_time(fn, setup, repeats):
    samples = []
    for _ in range(repeats):
        args = setup()
        t = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t)
    return statistics.median(samples)


def cases(n, dtype, rng):
    a = np.asfortranarray(rng.standard_normal((n, n)).astype(dtype))
    spd = np.asfortranarray((a.T @ a + n * np.eye(n, dtype=dtype)).astype(dtype))
    side = max(2, int(np.sqrt(n * 16)))
    csr = poisson2d(side)
    csr = CsrMatrix(csr.rows, csr.cols, csr.row_ptr, csr.col_idx, csr.values, dtype=dtype)
    x = rng.standard_normal(csr.cols).astype(dtype)
    out = np.empty(csr.rows, dtype=dtype)
    return {
        "lu_factor": (
            lambda w, p: kernels.lu_factor_inplace(w, p),
            lambda: (a.copy(order="F"), np.empty(n, np.intp)),
        ),
        "cholesky": (lambda w: kernels.cholesky_inplace(w), lambda: (spd.copy(order="F"),)),
        "csr_matvec": (
            lambda: [kernels.csr_matvec(csr.row_ptr, csr.col_idx, csr.values, x, out) for _ in range(20)],
            lambda: (),
        ),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--sizes", default="64,128,256")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    args = p.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; timing the fallback only", file=sys.stderr)
    previous = kernels.active_backend()
    rows = []
    try:
        for n in sizes:
            for dtype in (np.float32, np.float64):
                timings = {}
                for backend in backends:
                    kernels.use_backend(backend)
                    for name, (fn, setup) in cases(n, dtype, np.random.default_rng(args.seed)).items():
                        timings[(name, backend)] = median_time(fn, setup, args.repeats)
                for name in ("lu_factor", "cholesky", "csr_matvec"):
                    py = timings[(name, "python")]
                    comp = timings.get((name, "compiled"), float("nan"))
                    rows.append([name, n, np.dtype(dtype).name, comp, py, py / comp])
    finally:
        kernels.use_backend(previous)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["kernel", "n", "dtype", "compiled_seconds", "python_seconds", "speedup"])
    w.writerows(rows)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
