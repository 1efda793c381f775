"""Hot-loop kernels with backend selection.

Imports the compiled extension when present, otherwise the pure-Python
reference.  Both expose the same four functions with identical semantics
(and bit-identical output); ``BACKEND`` reports which one is active.
Set ``HUSHLAB_FORCE_PY_KERNELS=1`` to force the fallback.
"""

import os

if os.environ.get("HUSHLAB_FORCE_PY_KERNELS") == "1":
    from hushlab.kernels import _pyref as _impl
else:
    try:
        from hushlab.kernels import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from hushlab.kernels import _pyref as _impl

BACKEND = _impl.BACKEND
biquad_cascade = _impl.biquad_cascade
drc_loop = _impl.drc_loop
agc_loop = _impl.agc_loop
transient_gain_loop = _impl.transient_gain_loop

__all__ = [
    "BACKEND",
    "biquad_cascade",
    "drc_loop",
    "agc_loop",
    "transient_gain_loop",
]
