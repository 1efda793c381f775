"""Throughput comparison: compiled kernels vs the pure-Python reference.

Runs each hot loop over seeded noise with both backends and prints
samples/second plus the speedup, confirming on the way that outputs stay
bit-identical.  Usage::

    python3 benchmarks/bench_kernels.py [--seconds 10] [--repeats 3]
"""

import argparse
import time

import numpy as np
from scipy.signal import butter

from hushlab.kernels import _pyref

try:
    from hushlab.kernels import _native
except ImportError:
    _native = None

RATE = 32000


def _workloads(n: int):
    rng = np.random.default_rng(0)
    x = 0.2 * rng.standard_normal(n)
    sos = butter(4, 1000.0, fs=RATE, output="sos")
    coeffs = np.ascontiguousarray(sos[:, [0, 1, 2, 4, 5]] / sos[:, [3]])
    return [
        ("biquad_cascade", "biquad_cascade",
         (x, coeffs), lambda: np.zeros((coeffs.shape[0], 2))),
        ("drc_loop", "drc_loop",
         (x, 0.9, 0.001, -35.0, 1.0 - 1.0 / 30.0), lambda: np.zeros(1)),
        ("agc_loop", "agc_loop",
         (x, 0.05, 0.005, 0.0562, 3.98), lambda: np.zeros(1)),
        ("transient_gain_loop", "transient_gain_loop",
         (x, 0.27, 0.0006, 2.0, 0.0006), lambda: np.array([0.0, 0.0, 1.0])),
    ]


def _time_call(fn, args, make_state, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        state = make_state()
        t0 = time.perf_counter()
        fn(*args, state)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seconds", type=float, default=10.0,
                        help="audio length per kernel call (default 10)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats, best-of (default 3)")
    args = parser.parse_args()

    n = int(args.seconds * RATE)
    print(f"workload: {args.seconds:g} s of noise at {RATE} Hz "
          f"({n} samples), best of {args.repeats}")
    if _native is None:
        print("compiled extension not built; timing the pure-Python "
              "reference only")

    header = f"{'kernel':<22}{'python':>14}{'native':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, name, call_args, make_state in _workloads(n):
        t_py = _time_call(getattr(_pyref, name), call_args, make_state,
                          args.repeats)
        row = f"{label:<22}{n / t_py:>12.2e}/s"
        if _native is not None:
            state_py, state_na = make_state(), make_state()
            out_py = getattr(_pyref, name)(*call_args, state_py)
            out_na = getattr(_native, name)(*call_args, state_na)
            assert np.array_equal(out_py, out_na), f"{name}: outputs diverge"
            assert np.array_equal(state_py, state_na), f"{name}: states diverge"
            t_na = _time_call(getattr(_native, name), call_args, make_state,
                              args.repeats)
            row += f"{n / t_na:>12.2e}/s{t_py / t_na:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
