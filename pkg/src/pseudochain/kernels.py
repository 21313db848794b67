"""Backend selection for the Lindblad kernel.

The compiled core is used when it imports; set ``PSEUDOCHAIN_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _core_py

if os.environ.get("PSEUDOCHAIN_PURE_PYTHON", "") not in ("", "0"):
    LindbladKernel = _core_py.LindbladKernel
    BACKEND = "python"
else:
    try:
        from ._core import LindbladKernel
        BACKEND = "cython"
    except ImportError:
        LindbladKernel = _core_py.LindbladKernel
        BACKEND = "python"

PythonKernel = _core_py.LindbladKernel

__all__ = ["BACKEND", "LindbladKernel", "PythonKernel"]
