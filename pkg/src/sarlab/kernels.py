"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``SARLAB_PURE_PYTHON=1`` to force the numpy implementation.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SARLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

quantized_entropy_gaussian = _impl.quantized_entropy_gaussian
quantized_entropy_mixture = _impl.quantized_entropy_mixture
box_muller = _impl.box_muller
