"""Second-order section design: RBJ cookbook biquads and Butterworth stacks.

All functions return normalized coefficient rows (b0, b1, b2, a1, a2) for
the kernel cascade, a0 = 1.
"""

from __future__ import annotations

import math

import numpy as np

BUTTERWORTH_Q = 1.0 / math.sqrt(2.0)


def _check_corner(f0: float, fs: int) -> None:
    if not 0.0 < f0 < fs / 2.0:
        raise ValueError(f"corner {f0} Hz must lie in (0, Nyquist={fs / 2}) Hz")


def _normalize(b0, b1, b2, a0, a1, a2) -> np.ndarray:
    return np.array([b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0], dtype=np.float64)


def lowpass_biquad(f0: float, q: float, fs: int) -> np.ndarray:
    _check_corner(f0, fs)
    w0 = 2.0 * math.pi * f0 / fs
    alpha = math.sin(w0) / (2.0 * q)
    cw = math.cos(w0)
    return _normalize(
        (1.0 - cw) / 2.0, 1.0 - cw, (1.0 - cw) / 2.0,
        1.0 + alpha, -2.0 * cw, 1.0 - alpha,
    )


def highpass_biquad(f0: float, q: float, fs: int) -> np.ndarray:
    _check_corner(f0, fs)
    w0 = 2.0 * math.pi * f0 / fs
    alpha = math.sin(w0) / (2.0 * q)
    cw = math.cos(w0)
    return _normalize(
        (1.0 + cw) / 2.0, -(1.0 + cw), (1.0 + cw) / 2.0,
        1.0 + alpha, -2.0 * cw, 1.0 - alpha,
    )


def shelf_biquad(shelf_type: str, f0: float, gain_db: float, fs: int) -> np.ndarray:
    """Low or high shelf, Q = 1/sqrt(2).

    Gain is 10^(g/20) on the shelf side, unity on the far side and
    10^(g/40) at the corner.
    """
    _check_corner(f0, fs)
    if shelf_type not in ("low", "high"):
        raise ValueError(f"shelf_type must be 'low' or 'high', got {shelf_type!r}")
    a = 10.0 ** (gain_db / 40.0)
    w0 = 2.0 * math.pi * f0 / fs
    cw = math.cos(w0)
    alpha = math.sin(w0) / (2.0 * BUTTERWORTH_Q)
    two_sqrt_a_alpha = 2.0 * math.sqrt(a) * alpha
    if shelf_type == "low":
        b0 = a * ((a + 1.0) - (a - 1.0) * cw + two_sqrt_a_alpha)
        b1 = 2.0 * a * ((a - 1.0) - (a + 1.0) * cw)
        b2 = a * ((a + 1.0) - (a - 1.0) * cw - two_sqrt_a_alpha)
        a0 = (a + 1.0) + (a - 1.0) * cw + two_sqrt_a_alpha
        a1 = -2.0 * ((a - 1.0) + (a + 1.0) * cw)
        a2 = (a + 1.0) + (a - 1.0) * cw - two_sqrt_a_alpha
    else:
        b0 = a * ((a + 1.0) + (a - 1.0) * cw + two_sqrt_a_alpha)
        b1 = -2.0 * a * ((a - 1.0) + (a + 1.0) * cw)
        b2 = a * ((a + 1.0) + (a - 1.0) * cw - two_sqrt_a_alpha)
        a0 = (a + 1.0) - (a - 1.0) * cw + two_sqrt_a_alpha
        a1 = 2.0 * ((a - 1.0) - (a + 1.0) * cw)
        a2 = (a + 1.0) - (a - 1.0) * cw - two_sqrt_a_alpha
    return _normalize(b0, b1, b2, a0, a1, a2)


def butterworth_lowpass_sos(cutoff_hz: float, order: int, fs: int) -> np.ndarray:
    """Even-order Butterworth low-pass as a stack of RBJ sections.

    Section Q values follow the Butterworth pole angles, so the cascade is
    -3.01 dB at the cutoff.
    """
    if order <= 0 or order % 2 != 0:
        raise ValueError(f"order must be a positive even integer, got {order}")
    sections = []
    for k in range(order // 2):
        theta = math.pi * (2 * k + 1) / (2 * order)
        q = 1.0 / (2.0 * math.sin(theta))
        sections.append(lowpass_biquad(cutoff_hz, q, fs))
    return np.stack(sections)


def linkwitz_riley_pair(f0: float, fs: int) -> tuple[np.ndarray, np.ndarray]:
    """4th-order Linkwitz-Riley crossover: (lowpass SOS, highpass SOS).

    Each side is a squared 2nd-order Butterworth; the two sum to the
    allpass of allpass_from_lowpass on the same corner.
    """
    lp = lowpass_biquad(f0, BUTTERWORTH_Q, fs)
    hp = highpass_biquad(f0, BUTTERWORTH_Q, fs)
    return np.stack([lp, lp]), np.stack([hp, hp])


def allpass_from_lowpass(lp: np.ndarray) -> np.ndarray:
    """2nd-order allpass sharing a biquad's denominator.

    For a Linkwitz-Riley pair built from this lowpass, LP + HP equals this
    allpass exactly (rational identity preserved by the bilinear
    transform), which is what makes the crossover tree reconstruct.
    """
    a1, a2 = lp[3], lp[4]
    return np.array([[a2, a1, 1.0, a1, a2]], dtype=np.float64)
