"""Kernel backend selection.

The compiled extension is used when it was built at install time; otherwise
the numpy implementation takes over.  Both are importable explicitly
(``python`` and ``compiled``) for cross-checks and benchmarks.
"""
from . import _kernels_py as python

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

BACKEND = "cython" if compiled is not None else "python"
_impl = compiled if compiled is not None else python

min_permutation_cost = _impl.min_permutation_cost
sample_counts = _impl.sample_counts


def backends():
    """Available backends as a ``{name: module}`` dict."""
    out = {"python": python}
    if compiled is not None:
        out["cython"] = compiled
    return out
