"""Multiband transient suppressor.

The signal is split by a tree of 4th-order Linkwitz-Riley crossovers
(band sums reconstruct to an allpass; earlier splits are phase-compensated
with the later crossovers' allpasses).  Each band runs fast/slow envelope
followers; where the fast/slow ratio exceeds the threshold the band gain
drops to threshold/ratio immediately and recovers with the release time.

Parameter defaults are a reconstruction (band edges 500/2000/8000 Hz,
1 ms / 50 ms envelopes, ratio threshold 2.0, 50 ms release); the original
publication defers its values to an external source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hushlab import kernels
from hushlab.audio import DEFAULT_RATE, AudioBuffer
from hushlab.processors.base import StreamProcessor, apply_processor, smoothing_coeff
from hushlab.processors.design import allpass_from_lowpass, linkwitz_riley_pair


@dataclass(frozen=True)
class MctrParams:
    band_edges_hz: tuple = (500.0, 2000.0, 8000.0)
    fast_tau_ms: float = 1.0
    slow_tau_ms: float = 50.0
    transient_threshold: float = 2.0
    release_ms: float = 50.0

    def __post_init__(self):
        edges = tuple(float(e) for e in self.band_edges_hz)
        if list(edges) != sorted(edges) or len(set(edges)) != len(edges):
            raise ValueError(f"band edges must be strictly ascending, got {edges}")
        if self.fast_tau_ms <= 0.0 or self.slow_tau_ms <= self.fast_tau_ms:
            raise ValueError("need 0 < fast_tau_ms < slow_tau_ms")
        if not self.transient_threshold > 1.0:
            raise ValueError(f"transient_threshold must be > 1, got {self.transient_threshold}")
        if self.release_ms <= 0.0:
            raise ValueError(f"release_ms must be positive, got {self.release_ms}")
        object.__setattr__(self, "band_edges_hz", edges)


class Mctr(StreamProcessor):
    """Streaming multiband transient suppressor."""

    def __init__(self, params: MctrParams = MctrParams(), fs: int = DEFAULT_RATE):
        self.params = params
        self.fs = fs
        for e in params.band_edges_hz:
            if e >= fs / 2.0:
                raise ValueError(f"band edge {e} Hz is at or above Nyquist ({fs / 2} Hz)")
        n_cross = len(params.band_edges_hz)
        self._lp = []
        self._hp = []
        self._ap = []
        for e in params.band_edges_hz:
            lp_sos, hp_sos = linkwitz_riley_pair(e, fs)
            self._lp.append(lp_sos)
            self._hp.append(hp_sos)
            self._ap.append(allpass_from_lowpass(lp_sos[0]))
        self._lp_state = [np.zeros((2, 2)) for _ in range(n_cross)]
        self._hp_state = [np.zeros((2, 2)) for _ in range(n_cross)]
        # phase compensation: band j needs the allpasses of crossovers > j
        self._ap_state = {
            (j, m): np.zeros((1, 2))
            for j in range(n_cross)
            for m in range(j + 1, n_cross)
        }
        self._c_fast = smoothing_coeff(params.fast_tau_ms, fs)
        self._c_slow = smoothing_coeff(params.slow_tau_ms, fs)
        self._c_release = smoothing_coeff(params.release_ms, fs)
        self._gate_state = [np.array([0.0, 0.0, 1.0]) for _ in range(n_cross + 1)]

    @property
    def n_bands(self) -> int:
        return len(self.params.band_edges_hz) + 1

    def _split(self, x: np.ndarray) -> list:
        n_cross = len(self._lp)
        bands = []
        sig = x
        for j in range(n_cross):
            low = kernels.biquad_cascade(sig, self._lp[j], self._lp_state[j])
            sig = kernels.biquad_cascade(sig, self._hp[j], self._hp_state[j])
            for m in range(j + 1, n_cross):
                low = kernels.biquad_cascade(low, self._ap[m], self._ap_state[(j, m)])
            bands.append(low)
        bands.append(sig)
        return bands

    def process(self, block: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(block, dtype=np.float64)
        y = np.zeros_like(x)
        for band, gate in zip(self._split(x), self._gate_state):
            y += kernels.transient_gain_loop(
                band, self._c_fast, self._c_slow,
                self.params.transient_threshold, self._c_release, gate,
            )
        return y

    def reset(self) -> None:
        for s in self._lp_state:
            s[:] = 0.0
        for s in self._hp_state:
            s[:] = 0.0
        for s in self._ap_state.values():
            s[:] = 0.0
        for s in self._gate_state:
            s[:] = (0.0, 0.0, 1.0)


def mctr_process(params: MctrParams, x: AudioBuffer) -> AudioBuffer:
    return apply_processor(Mctr(params, x.sample_rate_hz), x)
