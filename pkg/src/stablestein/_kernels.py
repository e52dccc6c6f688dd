"""Backend selection for the partial-sum kernel.

The compiled kernel is used when it was built and the environment variable
STABLE_STEIN_PURE_PYTHON is unset; otherwise the numpy implementation.
"""
import os

from . import _pykernels

if os.environ.get("STABLE_STEIN_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
partial_sums = _impl.partial_sums
UNIFORMS = _pykernels.UNIFORMS
PARETO, TWOPOWER, TRIG, LOGTAIL, SLOWVARY = range(5)
