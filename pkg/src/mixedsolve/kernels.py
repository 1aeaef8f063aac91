"""Kernel dispatch: compiled extension when built, numpy fallback otherwise.

The choice is made once at import. ``use_backend`` switches it at run time,
which the kernel benchmark and the cross-check tests rely on.
"""
import logging

from . import _fallback

log = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
    log.debug("compiled kernels unavailable, using numpy fallback")

_NAMES = (
    "lu_factor_inplace",
    "lu_solve_inplace",
    "cholesky_inplace",
    "cholesky_solve_inplace",
    "csr_matvec",
    "csr_rmatvec",
)

_active = None


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def active_backend():
    return _active


def use_backend(name):
    """Select ``"compiled"`` or ``"python"`` kernels for subsequent calls."""
    global _active
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        impl = _compiled
    elif name == "python":
        impl = _fallback
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    g = globals()
    for fn in _NAMES:
        g[fn] = getattr(impl, fn)
    _active = name


use_backend("compiled" if _compiled is not None else "python")
