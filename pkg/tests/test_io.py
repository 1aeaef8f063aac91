import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from mixedsolve import csvio
from mixedsolve.core import CsrMatrix, DenseMatrix
from mixedsolve.errors import ParseError, SchemaMismatch
from mixedsolve.experiments import BenchRow, SweepRow
from mixedsolve.mmio import parse_matrix_market, read_matrix_market, write_matrix_market

IDENTITY = """%%MatrixMarket matrix coordinate real general
2 2 2
1 1 1.0
2 2 1.0
"""


def test_parse_identity():
    a = parse_matrix_market(IDENTITY)
    assert isinstance(a, CsrMatrix)
    np.testing.assert_array_equal(a.to_dense(), np.eye(2))


def test_parse_symmetric_expands():
    text = "%%MatrixMarket matrix coordinate real symmetric\n% lower triangle\n2 2 3\n1 1 4\n2 1 2\n2 2 5\n"
    a = parse_matrix_market(text)
    assert a.nnz == 4
    np.testing.assert_array_equal(a.to_dense(), [[4, 2], [2, 5]])


def test_parse_out_of_bounds():
    with pytest.raises(ParseError) as err:
        parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n")
    assert err.value.line == 3


@pytest.mark.parametrize(
    "text",
    [
        "",
        "%%MatrixMarket vector coordinate real general\n1 1 1\n1 1 1\n",
        "%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n",
        "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
        "%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n",
        "%%MatrixMarket matrix array pattern general\n1 1\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n2 2 1.0\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
        "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n",
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(ParseError):
        parse_matrix_market(text)


def test_parse_pattern_integer_and_duplicates():
    a = parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n")
    np.testing.assert_array_equal(a.to_dense(), [[0, 1], [1, 0]])
    a = parse_matrix_market("%%MatrixMarket matrix coordinate integer general\n1 1 2\n1 1 3\n1 1 4\n")
    np.testing.assert_array_equal(a.to_dense(), [[7]])


def test_parse_array_column_major():
    a = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n")
    assert isinstance(a, DenseMatrix)
    np.testing.assert_array_equal(a.data, [[1, 3], [2, 4]])
    s = parse_matrix_market("%%MatrixMarket matrix array real symmetric\n2 2\n4\n2\n5\n")
    np.testing.assert_array_equal(s.data, [[4, 2], [2, 5]])


def test_read_from_file(tmp_path):
    p = tmp_path / "eye.mtx"
    p.write_text(IDENTITY)
    np.testing.assert_array_equal(read_matrix_market(p).to_dense(), np.eye(2))


@st.composite
def sparse_matrices(draw):
    rows, cols = draw(st.integers(1, 8)), draw(st.integers(1, 8))
    vals = st.floats(allow_nan=False, allow_infinity=False, width=64)
    d = draw(hnp.arrays(np.float64, (rows, cols), elements=vals))
    mask = draw(hnp.arrays(np.bool_, (rows, cols)))
    return d * mask


@given(sparse_matrices())
def test_matrix_market_csr_round_trip(d):
    a = CsrMatrix.from_dense(d)
    b = parse_matrix_market(write_matrix_market(a))
    assert b.shape == a.shape
    np.testing.assert_array_equal(b.row_ptr, a.row_ptr)
    np.testing.assert_array_equal(b.col_idx, a.col_idx)
    np.testing.assert_array_equal(b.values, a.values)


@given(sparse_matrices())
def test_matrix_market_dense_round_trip(d):
    a = DenseMatrix(d)
    np.testing.assert_array_equal(parse_matrix_market(write_matrix_market(a)).data, a.data)


def test_write_csv_examples():
    assert csvio.write_csv([], csvio.BENCH) == ",".join(csvio.BENCH.columns) + "\n"
    text = csvio.write_csv([BenchRow(64, 0.5, 0.25, 0.375, 2)], csvio.BENCH)
    assert len(text.splitlines()) == 2
    row = csvio.parse_csv(text, csvio.BENCH)[0]
    assert row["speedup_mixed"] == 0.5 / 0.375


def test_write_csv_schema_mismatch():
    with pytest.raises(SchemaMismatch):
        csvio.write_csv([{"n": 1}], csvio.BENCH)
    row = dict(zip(csvio.COND_SWEEP.columns, [1.0, 2, 3, 1.5, 0.0, 2.0]))
    with pytest.raises(SchemaMismatch):
        csvio.write_csv([dict(row, extra=1)], csvio.COND_SWEEP)
    with pytest.raises(SchemaMismatch):
        csvio.parse_csv("a,b\n", csvio.COND_SWEEP)
    with pytest.raises(SchemaMismatch):
        csvio.write_csv([dict(row, n=2.5)], csvio.COND_SWEEP)


finite = st.floats(allow_nan=False, allow_infinity=False)
counts = st.integers(0, 10**9)

solve_rows = st.fixed_dictionaries(
    {
        "mode": st.sampled_from(["mixed", "double", "single", "plain-gmres"]),
        "n": counts,
        "nnz": counts,
        "backend": st.sampled_from(["lu", "cholesky", "fgmres(10)-gmres_sp(20)"]),
        "iterations": counts,
        "converged": st.booleans(),
        "final_residual": finite,
        "a_norm_est": finite,
        "factor_seconds": finite,
        "total_seconds": finite,
    }
)
sweep_rows = st.builds(
    SweepRow, finite, counts, counts, finite, finite, st.one_of(finite, st.just(math.inf))
)
bench_rows = st.builds(
    BenchRow,
    counts,
    st.floats(1e-9, 1e3),
    st.floats(1e-9, 1e3),
    st.floats(1e-9, 1e3),
    counts,
)


@settings(max_examples=50)
@given(
    st.one_of(
        st.tuples(st.just(csvio.SOLVE), st.lists(solve_rows, max_size=5)),
        st.tuples(st.just(csvio.COND_SWEEP), st.lists(sweep_rows, max_size=5)),
        st.tuples(st.just(csvio.BENCH), st.lists(bench_rows, max_size=5)),
    )
)
def test_csv_write_parse_write_fixpoint(case):
    schema, rows = case
    text = csvio.write_csv(rows, schema)
    parsed = csvio.parse_csv(text, schema)
    assert len(parsed) == len(rows)
    assert csvio.write_csv(parsed, schema) == text
