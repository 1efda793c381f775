"""Signal helpers shared across the test suite."""

import numpy as np

from hushlab.audio import AudioBuffer

FS = 32000


def sine(freq_hz, duration_s, fs=FS, amp=1.0):
    t = np.arange(int(round(duration_s * fs))) / fs
    return amp * np.sin(2.0 * np.pi * freq_hz * t)


def buf(x, fs=FS):
    return AudioBuffer(np.asarray(x, dtype=np.float64), fs)


def rms(x):
    return float(np.sqrt(np.mean(np.square(np.asarray(x, dtype=np.float64)))))


def db(ratio):
    return 20.0 * float(np.log10(ratio))


def steady_gain_db(process_fn, freq_hz, fs=FS, duration_s=1.0, settle_s=0.5,
                   amp=0.1):
    """Steady-state gain on a sine probe, measured as tail-RMS ratio in dB."""
    x = sine(freq_hz, duration_s, fs, amp)
    y = process_fn(x)
    n0 = int(settle_s * fs)
    return db(rms(y[n0:]) / rms(x[n0:]))


def random_partition(n, rng, max_block=None):
    """Split range(n) into contiguous blocks of random sizes."""
    if max_block is None:
        max_block = max(1, n // 3)
    cuts = [0]
    while cuts[-1] < n:
        cuts.append(min(n, cuts[-1] + int(rng.integers(1, max_block + 1))))
    return list(zip(cuts[:-1], cuts[1:]))
