"""Compiled vs numpy kernels, plus an end-to-end band computation per backend.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from fibspec import _kernels_py as py
from fibspec.fibword import fib_word
from fibspec.fractal import middle_cantor_cover
from fibspec.jacobi import TRACE, Coupling
from fibspec.transfer import _codes, _tables

try:
    from fibspec import _kernels as cy
except ImportError:
    cy = None

P, Q = 2.0, 1.0


def workloads():
    rng = np.random.default_rng(0)
    lams = rng.uniform(-3.0, 3.0, 20000)
    lo = np.sort(rng.uniform(-3.0, 3.0, 5000))
    codes = _codes(fib_word(16))
    hop, pot = _tables(Coupling(P, Q), TRACE)
    blo = np.linspace(-3.0, 3.0, 2000)
    cantor = middle_cantor_cover(1 / 3, 14)
    return {
        "trace_pair k=20, 20k energies": lambda m: m.trace_pair(lams, P, Q, 20),
        "escape_index depth 40, 20k": lambda m: m.escape_index(lams, P, Q, 2.25, 40),
        "interval_escaped depth 30, 5k": lambda m: m.interval_escaped(lo, lo + 1e-3, P, Q, 2.25, 30),
        "cocycle_half_trace F_16, 200": lambda m: m.cocycle_half_trace(codes, lams[:200], hop, pot),
        "bisect_level k=14, 2k brackets": lambda m: m.bisect_level(blo, blo + 3e-3, P, Q, 14, 1.0, 1e-12),
        "box_count 16k intervals": lambda m: m.box_count(cantor.lefts, cantor.rights, 3.0 ** -12),
    }


def end_to_end(pure: bool) -> float:
    code = ("import time; from fibspec.spectrum import bands; from fibspec.jacobi import Coupling; "
            "t = time.perf_counter(); bands(18, Coupling(2, 1)); print(time.perf_counter() - t)")
    env = dict(os.environ, FIBSPEC_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; only the numpy kernels are available")
    print(f"{'kernel':34s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in workloads().items():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:34s} {t_py:10.2f}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:34s} {t_py:10.2f} {t_cy:10.2f} {t_py / t_cy:7.1f}x")
    t_py = end_to_end(True)
    line = f"{'bands(18, (2,1)) end to end':34s} {t_py * 1e3:10.1f}"
    if cy is not None:
        t_cy = end_to_end(False)
        line += f" {t_cy * 1e3:10.1f} {t_py / t_cy:7.1f}x"
    print(line)


if __name__ == "__main__":
    main()
