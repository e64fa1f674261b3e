"""Backend selection for the hot loops.

The compiled extension ``_kernels`` is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` is used.  Setting
``QCOMPLEXITY_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("QCOMPLEXITY_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "compiled"

row_power_sums = _impl.row_power_sums
sup_abs_exact = _impl.sup_abs_exact
sup_abs_words = _impl.sup_abs_words

__all__ = ["BACKEND", "row_power_sums", "sup_abs_exact", "sup_abs_words"]
