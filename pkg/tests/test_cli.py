import subprocess
import sys

import numpy as np
import pytest

from mixedsolve import csvio, kernels
from mixedsolve.cli import main
from mixedsolve.core import CsrMatrix
from mixedsolve.mmio import write_matrix_market


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _strip_timing(text, schema):
    rows = csvio.parse_csv(text, schema)
    return [{k: v for k, v in r.items() if k not in schema.timing} for r in rows]


def test_solve_dense_random_mixed(capsys):
    code, out, _ = run(capsys, "solve-dense", "--random", "100", "--kappa", "100", "--mode", "mixed")
    assert code == 0
    (row,) = csvio.parse_csv(out, csvio.SOLVE)
    assert row["converged"] and row["iterations"] <= 4 and row["n"] == 100


@pytest.mark.parametrize("mode", ["double", "single"])
def test_solve_dense_other_modes(capsys, mode):
    code, out, _ = run(capsys, "solve-dense", "--random", "50", "--mode", mode)
    (row,) = csvio.parse_csv(out, csvio.SOLVE)
    assert row["mode"] == mode
    # single mode is judged against its own unit roundoff
    assert code == 0


def test_solve_dense_cholesky_and_match_ref(capsys):
    code, out, _ = run(
        capsys, "solve-dense", "--random", "60", "--backend", "cholesky", "--stop", "match-ref"
    )
    assert code == 0
    assert csvio.parse_csv(out, csvio.SOLVE)[0]["backend"] == "cholesky"


def test_solve_dense_nonconvergence_exit_2(capsys, tmp_path):
    out_path = tmp_path / "r.csv"
    code, _, err = run(
        capsys, "solve-dense", "--random", "80", "--kappa", "1e10", "--out", str(out_path)
    )
    assert code == 2
    (row,) = csvio.parse_csv(out_path.read_text(), csvio.SOLVE)
    assert not row["converged"] and row["iterations"] == 30
    assert "falling back" in err


def test_solve_dense_matrix_file(capsys, tmp_path):
    p = tmp_path / "a.mtx"
    p.write_text(write_matrix_market(CsrMatrix.from_dense(np.array([[4.0, 1.0], [1.0, 3.0]]))))
    code, out, _ = run(capsys, "solve-dense", "--matrix", str(p))
    assert code == 0
    assert csvio.parse_csv(out, csvio.SOLVE)[0]["nnz"] == 4


def test_missing_matrix_exit_1(capsys):
    code, _, err = run(capsys, "solve-dense", "--matrix", "missing.mtx")
    assert code == 1 and "missing.mtx" in err


def test_bad_matrix_file_exit_1(capsys, tmp_path):
    p = tmp_path / "bad.mtx"
    p.write_text("not a matrix\n")
    code, _, err = run(capsys, "solve-dense", "--matrix", str(p))
    assert code == 1 and "line 1" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["solve-dense"],
        ["solve-dense", "--random", "5", "--matrix", "x.mtx"],
        ["solve-iterative", "--stencil", "poisson3d:4"],
        ["cond-sweep", "--kappas", "1e1,abc"],
    ],
)
def test_usage_errors_exit_1_with_synopsis(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "usage:" in err


@pytest.mark.parametrize("mode", ["mixed", "double-inner", "plain-gmres"])
def test_solve_iterative_modes(capsys, mode):
    code, out, _ = run(capsys, "solve-iterative", "--stencil", "poisson2d:12x10", "--mode", mode)
    assert code == 0
    (row,) = csvio.parse_csv(out, csvio.SOLVE)
    assert row["converged"] and row["n"] == 120 and row["mode"] == mode


def test_solve_iterative_nonconvergence(capsys):
    code, out, _ = run(
        capsys, "solve-iterative", "--stencil", "poisson1d:400", "--m-in", "2", "--m-out", "2",
        "--max-outer", "1",
    )
    assert code == 2
    assert not csvio.parse_csv(out, csvio.SOLVE)[0]["converged"]


def test_cond_sweep_divergent_exit_2(capsys):
    code, out, _ = run(capsys, "cond-sweep", "--kappas", "1e9", "--trials", "5")
    assert code == 2
    (row,) = csvio.parse_csv(out, csvio.COND_SWEEP)
    assert row["failure_rate"] >= 0.95


def test_cond_sweep_and_bench_outputs(capsys):
    code, out, _ = run(capsys, "cond-sweep", "--n", "30", "--trials", "3", "--kappas", "1e1,1e2")
    assert code == 0 and len(csvio.parse_csv(out, csvio.COND_SWEEP)) == 2
    code, out, _ = run(capsys, "bench", "--sizes", "16,32", "--repeats", "3")
    assert code == 0 and [r["n"] for r in csvio.parse_csv(out, csvio.BENCH)] == [16, 32]


@pytest.mark.parametrize(
    "argv,schema",
    [
        (["solve-dense", "--random", "40", "--seed", "3"], csvio.SOLVE),
        (["solve-iterative", "--stencil", "poisson1d:200", "--seed", "3"], csvio.SOLVE),
        (["cond-sweep", "--n", "30", "--trials", "2", "--kappas", "1e2", "--seed", "3"], csvio.COND_SWEEP),
        (["bench", "--sizes", "16", "--seed", "3"], csvio.BENCH),
    ],
)
def test_cli_deterministic_given_seed(capsys, argv, schema):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert _strip_timing(first, schema) == _strip_timing(second, schema)


def test_kernel_flag(capsys):
    prev = kernels.active_backend()
    try:
        code, _, _ = run(capsys, "--kernels", "python", "solve-dense", "--random", "20")
        assert code == 0
        assert kernels.active_backend() == "python"
    finally:
        kernels.use_backend(prev)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mixedsolve", "solve-dense", "--random", "20"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("mode,n,nnz")
