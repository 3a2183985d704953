"""Conv kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise
the numpy fallback takes over.  ``WAVESEG_PURE_PY=1`` forces the fallback
(used by the benchmark and for debugging).  Both backends produce
bit-identical results on the same inputs.
"""

import os

if os.environ.get("WAVESEG_PURE_PY"):
    from . import _conv_np as _impl
else:
    try:
        from . import _conv_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _conv_np as _impl

BACKEND = _impl.NAME

conv2d_forward = _impl.conv2d_forward
conv2d_backward_input = _impl.conv2d_backward_input
conv2d_backward_kernel = _impl.conv2d_backward_kernel
