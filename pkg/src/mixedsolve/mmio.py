"""MatrixMarket reader and writer (real/integer/pattern, general/symmetric)."""
import numpy as np

from .core import CsrMatrix, DenseMatrix
from .errors import ParseError

_FORMATS = {"coordinate", "array"}
_FIELDS = {"real", "integer", "pattern"}
_SYMMETRIES = {"general", "symmetric"}


def _parse_header(line):
    tokens = line.split()
    if not tokens or tokens[0].lower() != "%%matrixmarket":
        raise ParseError(1, "missing %%MatrixMarket banner")
    if len(tokens) != 5:
        raise ParseError(1, f"banner needs 4 qualifiers, got {len(tokens) - 1}")
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix":
        raise ParseError(1, f"unsupported object {obj!r}")
    if fmt not in _FORMATS:
        raise ParseError(1, f"unsupported format {fmt!r}")
    if fld not in _FIELDS:
        raise ParseError(1, f"unsupported field {fld!r}")
    if sym not in _SYMMETRIES:
        raise ParseError(1, f"unsupported symmetry {sym!r}")
    if fmt == "array" and fld == "pattern":
        raise ParseError(1, "pattern field is only valid with coordinate format")
    return fmt, fld, sym


def _ints(tokens, lineno, count):
    if len(tokens) != count:
        raise ParseError(lineno, f"expected {count} integers, got {len(tokens)} fields")
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(lineno, "expected integers") from None


def _number(token, lineno, fld):
    try:
        return float(int(token)) if fld == "integer" else float(token)
    except ValueError:
        raise ParseError(lineno, f"bad {fld} value {token!r}") from None


def parse_matrix_market(text):
    """Parse MatrixMarket text: coordinate gives a CsrMatrix, array a DenseMatrix.

    Indices are converted to 0-based, symmetric storage is expanded and
    duplicate coordinate entries are summed.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input")
    fmt, fld, sym = _parse_header(lines[0])
    body = [
        (no, ln.split())
        for no, ln in enumerate(lines[1:], start=2)
        if ln.strip() and not ln.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError(len(lines), "missing size line")
    size_no, size_tokens = body[0]
    entries = body[1:]

    if fmt == "array":
        rows, cols = _ints(size_tokens, size_no, 2)
        if sym == "symmetric" and rows != cols:
            raise ParseError(size_no, "symmetric matrix must be square")
        expected = rows * (rows + 1) // 2 if sym == "symmetric" else rows * cols
        if len(entries) != expected:
            last = entries[-1][0] if entries else size_no
            raise ParseError(last, f"expected {expected} entries, found {len(entries)}")
        vals = []
        for no, tok in entries:
            if len(tok) != 1:
                raise ParseError(no, "array entries hold one value per line")
            vals.append(_number(tok[0], no, fld))
        if sym == "general":
            return DenseMatrix(np.array(vals).reshape((rows, cols), order="F"))
        a = np.zeros((rows, cols))
        # upper triangle row by row == lower triangle column by column, transposed
        a[np.triu_indices(rows)[::-1]] = vals
        return DenseMatrix(np.tril(a) + np.tril(a, -1).T)

    rows, cols, nnz = _ints(size_tokens, size_no, 3)
    if rows < 0 or cols < 0 or nnz < 0:
        raise ParseError(size_no, "negative size")
    if sym == "symmetric" and rows != cols:
        raise ParseError(size_no, "symmetric matrix must be square")
    if len(entries) != nnz:
        last = entries[-1][0] if entries else size_no
        raise ParseError(last, f"expected {nnz} entries, found {len(entries)}")
    width = 2 if fld == "pattern" else 3
    ii = np.empty(nnz, dtype=np.intp)
    jj = np.empty(nnz, dtype=np.intp)
    vv = np.ones(nnz)
    for k, (no, tok) in enumerate(entries):
        if len(tok) != width:
            raise ParseError(no, f"expected {width} fields, got {len(tok)}")
        i, j = _ints(tok[:2], no, 2)
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ParseError(no, f"index ({i}, {j}) outside {rows}x{cols}")
        if sym == "symmetric" and i < j:
            raise ParseError(no, "symmetric storage holds the lower triangle only")
        ii[k], jj[k] = i - 1, j - 1
        if width == 3:
            vv[k] = _number(tok[2], no, fld)
    if sym == "symmetric":
        off = ii != jj
        ii, jj, vv = (
            np.concatenate([ii, jj[off]]),
            np.concatenate([jj, ii[off]]),
            np.concatenate([vv, vv[off]]),
        )
    if not np.all(np.isfinite(vv)):
        bad = entries[int(np.argmin(np.isfinite(vv[:nnz])))][0] if nnz else size_no
        raise ParseError(bad, "non-finite value")
    return CsrMatrix.from_coo(rows, cols, ii, jj, vv)


def write_matrix_market(a):
    """Serialize as ``real general``: coordinate for CSR, array for dense."""
    if isinstance(a, CsrMatrix):
        out = ["%%MatrixMarket matrix coordinate real general", f"{a.rows} {a.cols} {a.nnz}"]
        r = np.repeat(np.arange(a.rows), np.diff(a.row_ptr))
        for i, j, v in zip(r, a.col_idx, a.values):
            out.append(f"{i + 1} {j + 1} {float(v)!r}")
    else:
        out = ["%%MatrixMarket matrix array real general", f"{a.rows} {a.cols}"]
        out.extend(repr(float(v)) for v in a.data.ravel(order="F"))
    return "\n".join(out) + "\n"


def read_matrix_market(path):
    with open(path) as fh:
        return parse_matrix_market(fh.read())
