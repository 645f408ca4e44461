"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise, or when
``MIRRORSQKD_PURE_PYTHON`` is set to a non-empty value, the numpy versions are.
"""

import os

from . import _kernels_py

if os.environ.get("MIRRORSQKD_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

sae_point = _impl.sae_point
sae_scan = _impl.sae_scan
golden_section = _impl.golden_section
tally_rounds = _impl.tally_rounds

__all__ = ["BACKEND", "sae_point", "sae_scan", "golden_section", "tally_rounds"]
