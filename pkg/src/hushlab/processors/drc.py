"""Dynamic range compression.

Feed-forward hard-knee design: per-sample log level, static gain curve
above threshold, one-pole gain smoothing with attack/release ballistics,
no makeup gain.  Defaults are the published optimum (-35 dB, 30:1,
0.01 ms attack, 100 ms release); the 0.01 ms attack is shorter than one
sample at 32 kHz and saturates to an instantaneous coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hushlab import kernels
from hushlab.audio import DEFAULT_RATE, AudioBuffer
from hushlab.processors.base import StreamProcessor, apply_processor, smoothing_coeff


@dataclass(frozen=True)
class DrcParams:
    threshold_db: float = -35.0
    ratio: float = 30.0
    attack_ms: float = 0.01
    release_ms: float = 100.0

    def __post_init__(self):
        if self.ratio < 1.0:
            raise ValueError(f"ratio must be >= 1, got {self.ratio}")
        if self.attack_ms < 0.0 or self.release_ms < 0.0:
            raise ValueError("attack/release times must be non-negative")


def static_gain_curve(params: DrcParams, level_dbfs: float) -> float:
    """Steady-state output level for a given input level (hard knee)."""
    over = level_dbfs - params.threshold_db
    if over <= 0.0:
        return level_dbfs
    return params.threshold_db + over / params.ratio


class Drc(StreamProcessor):
    """Streaming compressor; state is the smoothed gain in dB."""

    def __init__(self, params: DrcParams = DrcParams(), fs: int = DEFAULT_RATE):
        self.params = params
        self.fs = fs
        self._c_attack = smoothing_coeff(params.attack_ms, fs)
        self._c_release = smoothing_coeff(params.release_ms, fs)
        self._slope = 1.0 - 1.0 / params.ratio
        self._state = np.zeros(1)

    def process(self, block: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(block, dtype=np.float64)
        return kernels.drc_loop(
            x, self._c_attack, self._c_release,
            self.params.threshold_db, self._slope, self._state,
        )

    def reset(self) -> None:
        self._state[0] = 0.0


def drc_process(params: DrcParams, x: AudioBuffer) -> AudioBuffer:
    return apply_processor(Drc(params, x.sample_rate_hz), x)
