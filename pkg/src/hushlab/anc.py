"""Simulated noise-cancellation attenuation and selective transparency.

Passive+active isolation is modeled as a frequency-dependent attenuation
curve applied in the short-time spectrum (1024-sample windows, 75%
overlap, sqrt-Hann analysis/synthesis pair for exact reconstruction).
Selective transparency sums the attenuated ambient signal with an
enhancement algorithm's output.  This models offline stimulus
preparation, so the window latency here is acceptable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from hushlab.audio import AudioBuffer
from hushlab.errors import ConfigError
from hushlab.processors.base import StreamProcessor

STFT_WINDOW = 1024
STFT_HOP = STFT_WINDOW // 4

CURVE_HEADER = ("freq_hz", "attenuation_db")


@dataclass(frozen=True)
class AttenuationCurve:
    """Frequency -> attenuation mapping, strictly ascending, >= 2 points."""

    points: tuple  # ((freq_hz, attenuation_db), ...)

    def __post_init__(self):
        pts = tuple((float(f), float(a)) for f, a in self.points)
        if len(pts) < 2:
            raise ValueError(f"curve needs at least 2 points, got {len(pts)}")
        freqs = [f for f, _a in pts]
        if any(f <= 0.0 for f in freqs):
            raise ValueError("curve frequencies must be positive")
        if freqs != sorted(set(freqs)):
            raise ValueError("curve frequencies must be strictly ascending")
        if any(not np.isfinite(a) or a < 0.0 for _f, a in pts):
            raise ValueError("attenuations must be finite and >= 0 dB")
        object.__setattr__(self, "points", pts)

    def attenuation_db(self, freq_hz) -> np.ndarray:
        """Attenuation at arbitrary frequencies: linear in log-frequency
        between points, flat beyond the endpoints.  freq <= 0 (the DC
        bin) takes the first point's value."""
        f = np.atleast_1d(np.asarray(freq_hz, dtype=np.float64))
        log_f = np.log(np.maximum(f, self.points[0][0]))
        log_pts = np.log([p[0] for p in self.points])
        att = [p[1] for p in self.points]
        return np.interp(log_f, log_pts, att)

    @classmethod
    def from_csv(cls, path) -> "AttenuationCurve":
        """Read a ``freq_hz,attenuation_db`` CSV with ascending rows."""
        points = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(h.strip() for h in next(reader, ()))
            if header != CURVE_HEADER:
                raise ConfigError(f"{path}: header must be {','.join(CURVE_HEADER)}")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    points.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    raise ConfigError(f"{path}:{lineno}: bad curve row {row}") from None
        try:
            return cls(tuple(points))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


def default_curve() -> AttenuationCurve:
    """Packaged placeholder curve (non-authoritative): 20 dB below
    100 Hz rising to 35 dB at 1 kHz, 30 dB above 4 kHz."""
    with resources.as_file(
        resources.files("hushlab").joinpath("data/anc_default_curve.csv")
    ) as path:
        return AttenuationCurve.from_csv(path)


def apply_attenuation(x: AudioBuffer, curve: AttenuationCurve) -> AudioBuffer:
    """Attenuate each short-time spectral bin by the curve.

    Exact-reconstruction overlap-add (a flat 0 dB curve returns the
    input); output length equals input length.
    """
    samples = x.samples
    n = len(samples)
    if n == 0:
        return AudioBuffer(samples.copy(), x.sample_rate_hz)
    window = np.sqrt(np.hanning(STFT_WINDOW + 1)[:STFT_WINDOW])  # periodic Hann
    freqs = np.fft.rfftfreq(STFT_WINDOW, d=1.0 / x.sample_rate_hz)
    gains = 10.0 ** (-curve.attenuation_db(freqs) / 20.0)

    pad = STFT_WINDOW
    padded = np.concatenate([np.zeros(pad), samples, np.zeros(pad)])
    out = np.zeros(len(padded))
    norm = np.zeros(len(padded))
    w_sq = window * window
    for start in range(0, len(padded) - STFT_WINDOW + 1, STFT_HOP):
        frame = padded[start:start + STFT_WINDOW] * window
        spectrum = np.fft.rfft(frame) * gains
        out[start:start + STFT_WINDOW] += np.fft.irfft(spectrum, n=STFT_WINDOW) * window
        norm[start:start + STFT_WINDOW] += w_sq
    core = slice(pad, pad + n)
    return AudioBuffer(out[core] / norm[core], x.sample_rate_hz)


def selective_transparency(mixture: AudioBuffer, curve: AttenuationCurve,
                           processor: StreamProcessor,
                           algo_gain_db: float = 0.0) -> AudioBuffer:
    """ANC-attenuated ambient plus the algorithm's enhanced playback.

    The processor runs from reset over the whole mixture; its output is
    advanced by its declared latency so both paths are time-aligned,
    optionally scaled by ``algo_gain_db``, and summed with the
    attenuated mixture.
    """
    ambient = apply_attenuation(mixture, curve)
    processor.reset()
    enhanced = np.asarray(processor.process(mixture.samples), dtype=np.float64)
    processor.reset()
    if enhanced.shape != mixture.samples.shape:
        raise ValueError(
            f"processor changed length: {enhanced.shape} vs {mixture.samples.shape}"
        )
    latency = processor.latency_samples()
    if latency > 0:
        enhanced = np.concatenate([enhanced[latency:], np.zeros(latency)])
    if algo_gain_db != 0.0:
        enhanced = enhanced * 10.0 ** (algo_gain_db / 20.0)
    return AudioBuffer(ambient.samples + enhanced, mixture.sample_rate_hz)
