"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy
implementation. Set SECOFF_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SECOFF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

dual_eval_core = _impl.dual_eval_core
user_response_core = _impl.user_response_core
