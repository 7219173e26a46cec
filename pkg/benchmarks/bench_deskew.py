"""Compare the compiled and reference alignment kernels.

Run from the repo root:

    python benchmarks/bench_deskew.py [--points N] [--channels N] [--repeats N]

The workload mirrors the batch analyzer: coupled lossy channels with
randomized per-line excess delays, solved over the whole grid. Reported
per-channel times are the best of the repeat runs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from skewlab import ChannelSpec, LineSpec, build_channel, frequency_grid
from skewlab.network import _pair_entries
from skewlab._kernels import _deskew_py

try:
    from skewlab._kernels import _deskew_cy
except ImportError:
    _deskew_cy = None


def make_workload(points: int, channels: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    grid = frequency_grid(10e6, 110e9, points)
    nets = []
    for _ in range(channels):
        spec = LineSpec(
            length=rng.uniform(0.2, 0.6),
            odd_delay_per_m=3.6e-9,
            even_delay_per_m=3.6e-9 * (1.0 + rng.uniform(0.01, 0.08)),
            loss_coeff=rng.uniform(2.0, 12.0),
            p_excess_delay=rng.uniform(-2e-12, 2e-12),
            n_excess_delay=rng.uniform(-2e-12, 2e-12),
        )
        net = build_channel(ChannelSpec(segments=[spec], grid=grid))
        nets.append([np.ascontiguousarray(a) for a in _pair_entries(net)])
    return nets


def bench(kernel, nets, repeats: int) -> tuple[float, int]:
    best = float("inf")
    iters = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in nets:
            out = kernel.solve_deskew_grid(*args)
        best = min(best, time.perf_counter() - t0)
        iters = int(np.max(out[2]))
    return best, iters


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4401)
    ap.add_argument("--channels", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    nets = make_workload(args.points, args.channels)
    total_pts = args.points * args.channels
    print(f"workload: {args.channels} channels x {args.points} points "
          f"({total_pts} solves)")

    t_py, it_py = bench(_deskew_py, nets, args.repeats)
    print(f"python : {t_py:8.3f} s  ({total_pts / t_py / 1e3:8.1f} k solves/s, "
          f"max {it_py} iterations)")

    if _deskew_cy is None:
        print("cython : not built (set up with Cython installed, or unset "
              "SKEWLAB_NO_EXT)")
        return

    t_cy, it_cy = bench(_deskew_cy, nets, args.repeats)
    print(f"cython : {t_cy:8.3f} s  ({total_pts / t_cy / 1e3:8.1f} k solves/s, "
          f"max {it_cy} iterations)")
    print(f"speedup: {t_py / t_cy:.1f}x")


if __name__ == "__main__":
    main()
