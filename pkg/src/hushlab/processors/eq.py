"""Shelving-filter equalizer.

A cascade of second-order shelves, one per band.  The default band set is
the published configuration: low shelf -8 dB @ 200 Hz and high shelves
-2.75 dB (corner unprinted in the source, shipped at 2000 Hz — our
placeholder, not a published value), +1.6 dB @ 5 kHz, -3 dB @ 10 kHz and
-6 dB @ 15 kHz.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hushlab import kernels
from hushlab.audio import DEFAULT_RATE, AudioBuffer
from hushlab.processors.base import StreamProcessor, apply_processor
from hushlab.processors.design import shelf_biquad


@dataclass(frozen=True)
class EqBand:
    shelf_type: str  # "low" | "high"
    corner_hz: float
    gain_db: float

    def __post_init__(self):
        if self.shelf_type not in ("low", "high"):
            raise ValueError(f"shelf_type must be 'low' or 'high', got {self.shelf_type!r}")
        if self.corner_hz <= 0.0:
            raise ValueError(f"corner_hz must be positive, got {self.corner_hz}")


# The -2.75 dB shelf's 2000 Hz corner is a placeholder, not a published value.
DEFAULT_EQ_BANDS = (
    EqBand("low", 200.0, -8.0),
    EqBand("high", 2000.0, -2.75),
    EqBand("high", 5000.0, 1.6),
    EqBand("high", 10000.0, -3.0),
    EqBand("high", 15000.0, -6.0),
)


@dataclass(frozen=True)
class EqParams:
    bands: tuple = DEFAULT_EQ_BANDS

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))


class Eq(StreamProcessor):
    """Cascade of shelf biquads; linear, time-invariant, zero latency."""

    def __init__(self, params: EqParams = EqParams(), fs: int = DEFAULT_RATE):
        self.params = params
        self.fs = fs
        for b in params.bands:
            if b.corner_hz >= fs / 2.0:
                raise ValueError(
                    f"corner {b.corner_hz} Hz is at or above Nyquist ({fs / 2} Hz)"
                )
        if params.bands:
            self._coeffs = np.stack(
                [shelf_biquad(b.shelf_type, b.corner_hz, b.gain_db, fs) for b in params.bands]
            )
        else:
            self._coeffs = np.zeros((0, 5))
        self._state = np.zeros((self._coeffs.shape[0], 2))

    def process(self, block: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(block, dtype=np.float64)
        if self._coeffs.shape[0] == 0:
            return x.copy()
        return kernels.biquad_cascade(x, self._coeffs, self._state)

    def reset(self) -> None:
        self._state[:] = 0.0


def eq_process(params: EqParams, x: AudioBuffer) -> AudioBuffer:
    return apply_processor(Eq(params, x.sample_rate_hz), x)
