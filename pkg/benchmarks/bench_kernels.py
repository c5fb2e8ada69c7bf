"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times a 5-year plasma integration at 0.01 h and the SPWVD lag-product
kernel on a 4-year daily record, and reports the largest disagreement
between backends.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from lhrhythm import _kernels
from lhrhythm.model import HOURS_PER_YEAR, PspikeProfile, SecretionParams, UniformSeries, integrate_plasma
from lhrhythm.tfr import SpwvdConfig, analytic_signal, spwvd


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = _kernels.available()
    print(f"backends: {', '.join(backends)} (default {_kernels.DEFAULT})")
    params, prof = SecretionParams(), PspikeProfile.damped()
    rng = np.random.default_rng(0)
    x = UniformSeries(0.0, 24.0, np.cos(2 * np.pi * np.arange(1461) / 365) + 0.1 * rng.standard_normal(1461))
    z = analytic_signal(x)
    cfg = SpwvdConfig(127, 127, 512)

    results = {}
    for name in backends:
        t_int, y = best_of(lambda: integrate_plasma(params, prof, 5 * HOURS_PER_YEAR, 0.01,
                                                    backend=name).values, args.repeat)
        t_tfr, m = best_of(lambda: spwvd(z, cfg, backend=name).values, args.repeat)
        results[name] = (y, m)
        print(f"{name:>7}: integrate 5 y @ 0.01 h {t_int * 1e3:8.1f} ms | "
              f"spwvd 1461 x 512 {t_tfr * 1e3:8.1f} ms")
    if len(results) == 2:
        (ya, ma), (yb, mb) = results.values()
        print(f"max relative difference: integrate "
              f"{np.max(np.abs(ya - yb)) / np.max(np.abs(ya)):.2e}, "
              f"spwvd {np.max(np.abs(ma - mb)) / np.max(np.abs(ma)):.2e}")


if __name__ == "__main__":
    main()
