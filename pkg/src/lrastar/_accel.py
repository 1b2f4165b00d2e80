"""Select the compiled kernels when built, else the pure-Python fallback.

Set ``LRASTAR_PURE=1`` to force the fallback (used by the benchmark and by
the parity tests).
"""
import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("LRASTAR_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

LRACore = getattr(_impl, "LRACore", None)
IndexedHeap = _impl.IndexedHeap
segment_hits_boxes = _impl.segment_hits_boxes
sample_count = _impl.sample_count
