"""Backend selection for the array kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy fallback in ``_kernels_py`` is used. Setting the environment variable
``VARSMOOTH_KERNELS=python`` forces the fallback.
"""

import importlib
import os

from . import _kernels_py

NAMES = (
    "diff_rows",
    "diff_rows_adj",
    "diff_cols",
    "diff_cols_adj",
    "correlate2d",
    "correlate2d_adj",
    "soft_threshold",
    "clip_abs",
)


def load_backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("._ckernels", __package__)
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends():
    found = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        found.insert(0, "cython")
    return found


def _select():
    requested = os.environ.get("VARSMOOTH_KERNELS", "").strip().lower()
    if requested == "python":
        return "python", _kernels_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        if requested == "cython":
            raise
        return "python", _kernels_py


BACKEND, _impl = _select()

diff_rows = _impl.diff_rows
diff_rows_adj = _impl.diff_rows_adj
diff_cols = _impl.diff_cols
diff_cols_adj = _impl.diff_cols_adj
correlate2d = _impl.correlate2d
correlate2d_adj = _impl.correlate2d_adj
soft_threshold = _impl.soft_threshold
clip_abs = _impl.clip_abs
