"""Pure-Python reference implementation of the hot per-sample loops.

Selected automatically when the compiled extension is unavailable.  The
arithmetic here is kept expression-for-expression identical to
``_native.pyx`` so the two backends agree bit-exactly; any change must be
mirrored there.
"""

from math import exp, fabs, log10

import numpy as np

BACKEND = "python"


def biquad_cascade(x, coeffs, state):
    """Run a cascade of direct-form-II-transposed biquads over a block.

    Parameters
    ----------
    x : float64 array, shape (n,)
    coeffs : float64 array, shape (S, 5)
        Per section ``(b0, b1, b2, a1, a2)`` with a0 normalized to 1.
    state : float64 array, shape (S, 2)
        Per-section delay state, updated in place.
    """
    y = np.empty_like(x)
    n_sections = coeffs.shape[0]
    cl = coeffs.tolist()
    sl = state.tolist()
    xs = x.tolist()
    out = [0.0] * len(xs)
    for i, v in enumerate(xs):
        for s in range(n_sections):
            b0, b1, b2, a1, a2 = cl[s]
            s0, s1 = sl[s]
            w = b0 * v + s0
            sl[s][0] = b1 * v - a1 * w + s1
            sl[s][1] = b2 * v - a2 * w
            v = w
        out[i] = v
    state[:] = sl
    y[:] = out
    return y


def drc_loop(x, c_attack, c_release, threshold_db, slope, state):
    """Feed-forward compressor gain loop (log-domain one-pole smoothing).

    ``slope = 1 - 1/ratio``; ``state[0]`` holds the smoothed gain in dB and
    is updated in place.  A coefficient of 1.0 makes that branch
    instantaneous.
    """
    y = np.empty_like(x)
    g = float(state[0])
    xs = x.tolist()
    out = [0.0] * len(xs)
    for i, v in enumerate(xs):
        level = 20.0 * log10(fabs(v) + 1e-12)
        over = level - threshold_db
        target = -slope * over if over > 0.0 else 0.0
        c = c_attack if target < g else c_release
        g = g + c * (target - g)
        out[i] = v * 10.0 ** (g * 0.05)
    state[0] = g
    y[:] = out
    return y


def agc_loop(x, c_attack, c_release, target_amp, max_gain, state):
    """Slow gain control toward a target envelope level.

    ``state[0]`` holds the amplitude envelope, updated in place.  The gain
    is ``clamp(target_amp / max(env, 1e-6), 0, max_gain)``.
    """
    y = np.empty_like(x)
    env = float(state[0])
    xs = x.tolist()
    out = [0.0] * len(xs)
    for i, v in enumerate(xs):
        a = fabs(v)
        c = c_attack if a > env else c_release
        env = env + c * (a - env)
        floor = env if env > 1e-6 else 1e-6
        g = target_amp / floor
        if g > max_gain:
            g = max_gain
        out[i] = g * v
    state[0] = env
    y[:] = out
    return y


def transient_gain_loop(x, c_fast, c_slow, threshold, c_release, state):
    """Per-band transient suppressor: gate on the fast/slow envelope ratio.

    ``state`` holds ``(fast_env, slow_env, gain)`` and is updated in place.
    Gain reduction is instantaneous; recovery follows ``c_release``.
    """
    y = np.empty_like(x)
    f = float(state[0])
    s = float(state[1])
    g = float(state[2])
    xs = x.tolist()
    out = [0.0] * len(xs)
    for i, v in enumerate(xs):
        a = fabs(v)
        f = f + c_fast * (a - f)
        s = s + c_slow * (a - s)
        denom = s if s > 1e-9 else 1e-9
        r = f / denom
        target = threshold / r if r > threshold else 1.0
        if target < g:
            g = target
        else:
            g = g + c_release * (target - g)
        out[i] = v * g
    state[0] = f
    state[1] = s
    state[2] = g
    y[:] = out
    return y
