"""Streaming-processor contract shared by every enhancement algorithm.

A StreamProcessor is causal and block-size agnostic: feeding a signal in
arbitrary block partitions yields bit-identical output to a single call,
and reset() restores the exact initial state.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from hushlab.audio import AudioBuffer


class StreamProcessor(ABC):
    """Causal block processor with explicit mutable state.

    One instance is single-threaded; independent instances are cheap to
    create and safe to hand across threads.
    """

    @abstractmethod
    def process(self, block: np.ndarray) -> np.ndarray:
        """Process one block; output has the same length as the input."""

    @abstractmethod
    def reset(self) -> None:
        """Restore the exact initial state."""

    def latency_samples(self) -> int:
        """Pure algorithmic delay in samples (0 unless overridden)."""
        return 0


class IdentityProcessor(StreamProcessor):
    """Pass-through; useful as an evaluation baseline."""

    def process(self, block: np.ndarray) -> np.ndarray:
        return np.array(block, dtype=np.float64, copy=True)

    def reset(self) -> None:
        pass


class ZeroProcessor(StreamProcessor):
    """Outputs silence; the degenerate lower bound for objectives."""

    def process(self, block: np.ndarray) -> np.ndarray:
        return np.zeros(len(block), dtype=np.float64)

    def reset(self) -> None:
        pass


def apply_processor(processor: StreamProcessor, buffer: AudioBuffer) -> AudioBuffer:
    """Run a buffer through a freshly reset processor in one block."""
    processor.reset()
    out = processor.process(np.ascontiguousarray(buffer.samples, dtype=np.float64))
    processor.reset()
    return AudioBuffer(out, buffer.sample_rate_hz)


def smoothing_coeff(tau_ms: float, fs: int) -> float:
    """One-pole coefficient for a time constant in ms.

    c = 1 - exp(-1/(tau_s * fs)); time constants shorter than one sample
    saturate to 1.0 (instantaneous).
    """
    tau_s = tau_ms / 1000.0
    if tau_s * fs < 1.0:
        return 1.0
    return 1.0 - math.exp(-1.0 / (tau_s * fs))
