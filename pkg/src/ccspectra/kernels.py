"""Kernel dispatch: compiled Cython kernels when built, numpy fallback otherwise.

Set ``CCSPECTRA_PURE_PYTHON=1`` before import to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if not os.environ.get("CCSPECTRA_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

signed_gram = _impl.signed_gram
comember_laplacian = _impl.comember_laplacian
pair_energy = _impl.pair_energy
iso_search = _impl.iso_search


def backends():
    """Available kernel modules by name, for benchmarking and cross-checks."""
    found = {"python": _fallback}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
