"""Brute-force low-pass baseline.

A plain Butterworth low-pass (default 1 kHz, 4th order). Intentionally
crude: it removes everything above the cutoff, trigger or not, and serves
as the floor any selective method has to beat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hushlab import kernels
from hushlab.audio import DEFAULT_RATE, AudioBuffer
from hushlab.processors.base import StreamProcessor, apply_processor
from hushlab.processors.design import butterworth_lowpass_sos


@dataclass(frozen=True)
class LpfParams:
    cutoff_hz: float = 1000.0
    order: int = 4

    def __post_init__(self):
        if self.cutoff_hz <= 0.0:
            raise ValueError(f"cutoff_hz must be positive, got {self.cutoff_hz}")
        if self.order < 2 or self.order % 2 != 0:
            raise ValueError(f"order must be a positive even integer, got {self.order}")


class Lpf(StreamProcessor):
    """Streaming Butterworth low-pass filter."""

    def __init__(self, params: LpfParams = LpfParams(), fs: int = DEFAULT_RATE):
        self.params = params
        self.fs = fs
        if params.cutoff_hz >= fs / 2.0:
            raise ValueError(
                f"cutoff {params.cutoff_hz} Hz is at or above Nyquist ({fs / 2} Hz)"
            )
        self._sos = butterworth_lowpass_sos(params.cutoff_hz, params.order, fs)
        self._state = np.zeros((self._sos.shape[0], 2))

    def process(self, block: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(block, dtype=np.float64)
        return kernels.biquad_cascade(x, self._sos, self._state)

    def reset(self) -> None:
        self._state[:] = 0.0


def lpf_process(params: LpfParams, x: AudioBuffer) -> AudioBuffer:
    return apply_processor(Lpf(params, x.sample_rate_hz), x)
