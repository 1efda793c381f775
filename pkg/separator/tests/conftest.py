"""Synthetic mixture builders shared by the separator tests.

Kept free of hushsep/torch imports so collection succeeds (and the
tests skip cleanly) when the separator package is not installed.
"""

import numpy as np
import pytest


def synth_pairs(n_clips, length, rate, seed):
    """Build (id, mix, gt, rate) tuples: tonal keep + click-train trigger.

    Each clip's keep component is a sine at a per-clip frequency plus
    low-level noise; the trigger is a train of Hann-windowed clicks.
    Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(length) / rate
    window = np.hanning(64).astype(np.float32)
    pairs = []
    for i in range(n_clips):
        freq = rng.uniform(150.0, 900.0)
        keep = (
            0.25 * np.sin(2 * np.pi * freq * t)
            + 0.03 * rng.standard_normal(length)
        ).astype(np.float32)
        trigger = np.zeros(length, dtype=np.float32)
        for pos in rng.integers(0, length - 64, size=max(2, length // 340)):
            trigger[pos : pos + 64] += rng.uniform(0.4, 0.9) * window
        pairs.append((f"clip{i}", keep + trigger, keep, rate))
    return pairs


@pytest.fixture
def toy_pairs():
    """Eight short mixture/ground-truth pairs at 16 kHz."""
    return synth_pairs(8, 2048, 16000, seed=0)


@pytest.fixture
def pair_builder():
    """The `synth_pairs` builder, exposed without cross-module imports."""
    return synth_pairs
