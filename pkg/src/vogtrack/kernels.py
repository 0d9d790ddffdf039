"""Backend selection for the hot kernels.

The compiled Cython module is used when it was built; otherwise the NumPy
reference implementation is used. Setting ``VOGTRACK_PURE_PYTHON=1`` forces
the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("VOGTRACK_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # noqa: F811
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"

block_mean = _impl.block_mean
label8 = _impl.label8
zigzag = _impl.zigzag


def backends():
    """Return the available backend modules keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
