"""Automatic gain control.

One-pole amplitude envelope (attack when rising, release when falling)
driving a gain toward a target level, capped at max_gain.  Coefficients
are per-sample values, not time constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hushlab import kernels
from hushlab.audio import DEFAULT_RATE, AudioBuffer
from hushlab.processors.base import StreamProcessor, apply_processor


@dataclass(frozen=True)
class AgcParams:
    attack_coeff: float = 0.05
    release_coeff: float = 0.005
    target_level_dbfs: float = -25.0
    max_gain_db: float = 12.0

    def __post_init__(self):
        for name in ("attack_coeff", "release_coeff"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.max_gain_db < 0.0:
            raise ValueError(f"max_gain_db must be >= 0, got {self.max_gain_db}")


class Agc(StreamProcessor):
    """Streaming AGC; state is the amplitude envelope."""

    def __init__(self, params: AgcParams = AgcParams(), fs: int = DEFAULT_RATE):
        self.params = params
        self.fs = fs
        self._target_amp = 10.0 ** (params.target_level_dbfs / 20.0)
        self._max_gain = 10.0 ** (params.max_gain_db / 20.0)
        self._state = np.zeros(1)

    def process(self, block: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(block, dtype=np.float64)
        return kernels.agc_loop(
            x, self.params.attack_coeff, self.params.release_coeff,
            self._target_amp, self._max_gain, self._state,
        )

    def reset(self) -> None:
        self._state[0] = 0.0


def agc_process(params: AgcParams, x: AudioBuffer) -> AudioBuffer:
    return apply_processor(Agc(params, x.sample_rate_hz), x)
