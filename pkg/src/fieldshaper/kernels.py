"""Selects the compiled element kernel when available, numpy fallback otherwise."""

from . import _kernels_py

try:
    from . import _kernels_cy

    _impl = _kernels_cy
    BACKEND = "cython"
except ImportError:  # extension not built
    _impl = _kernels_py
    BACKEND = "python"


def element_matrices(coords, rho, a11, a12, a22, beta, f, qpts, qwts):
    return _impl.element_matrices(coords, rho, a11, a12, a22, beta, f, qpts, qwts)


def available_backends() -> dict:
    """Name -> kernel function, for tests and benchmarks."""
    out = {"python": _kernels_py.element_matrices}
    if BACKEND == "cython":
        out["cython"] = _kernels_cy.element_matrices
    return out
