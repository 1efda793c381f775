"""hushlab: trigger-sound attenuation toolkit.

Causal streaming DSP processors, deterministic mixture synthesis,
separation metrics and subjective-rating statistics, a simulated
noise-cancellation / selective-transparency pipeline, and a from-scratch
TPE parameter search — all behind one CLI (``hushlab``).
"""

__version__ = "0.1.0"

from hushlab.audio import AudioBuffer, read_wav, resample, write_wav
from hushlab.kernels import BACKEND as KERNEL_BACKEND

__all__ = [
    "AudioBuffer",
    "KERNEL_BACKEND",
    "__version__",
    "read_wav",
    "resample",
    "write_wav",
]
