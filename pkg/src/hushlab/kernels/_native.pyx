# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-sample loops. Mirrors _pyref.py expression for expression."""

from libc.math cimport fabs, log10, pow

import numpy as np

BACKEND = "native"


def biquad_cascade(double[::1] x, double[:, ::1] coeffs, double[:, ::1] state):
    """Run a cascade of direct-form-II-transposed biquads over a block.

    ``coeffs`` rows are ``(b0, b1, b2, a1, a2)`` with a0 normalized to 1;
    ``state`` rows are per-section delays, updated in place.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_sections = coeffs.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, s
    cdef double v, w, b0, b1, b2, a1, a2
    with nogil:
        for i in range(n):
            v = x[i]
            for s in range(n_sections):
                b0 = coeffs[s, 0]
                b1 = coeffs[s, 1]
                b2 = coeffs[s, 2]
                a1 = coeffs[s, 3]
                a2 = coeffs[s, 4]
                w = b0 * v + state[s, 0]
                state[s, 0] = b1 * v - a1 * w + state[s, 1]
                state[s, 1] = b2 * v - a2 * w
                v = w
            y[i] = v
    return out


def drc_loop(double[::1] x, double c_attack, double c_release,
             double threshold_db, double slope, double[::1] state):
    """Feed-forward compressor gain loop (log-domain one-pole smoothing)."""
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double g = state[0]
    cdef double v, level, over, target, c
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            v = x[i]
            level = 20.0 * log10(fabs(v) + 1e-12)
            over = level - threshold_db
            target = -slope * over if over > 0.0 else 0.0
            c = c_attack if target < g else c_release
            g = g + c * (target - g)
            y[i] = v * pow(10.0, g * 0.05)
    state[0] = g
    return out


def agc_loop(double[::1] x, double c_attack, double c_release,
             double target_amp, double max_gain, double[::1] state):
    """Slow gain control toward a target envelope level."""
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double env = state[0]
    cdef double v, a, c, floor, g
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            v = x[i]
            a = fabs(v)
            c = c_attack if a > env else c_release
            env = env + c * (a - env)
            floor = env if env > 1e-6 else 1e-6
            g = target_amp / floor
            if g > max_gain:
                g = max_gain
            y[i] = g * v
    state[0] = env
    return out


def transient_gain_loop(double[::1] x, double c_fast, double c_slow,
                        double threshold, double c_release, double[::1] state):
    """Per-band transient suppressor: gate on the fast/slow envelope ratio."""
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double f = state[0]
    cdef double s = state[1]
    cdef double g = state[2]
    cdef double v, a, denom, r, target
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            v = x[i]
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
            y[i] = v * g
    state[0] = f
    state[1] = s
    state[2] = g
    return out
