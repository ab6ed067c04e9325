#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-Python fallback.

Times the scalar conversion kernels directly, then the end-to-end
Monte-Carlo geotag experiment in a subprocess per backend (the backend is
chosen at import time via AEROTAG_KERNEL).

Run: python benchmarks/bench_kernels.py [--points N] [--trials N]
"""

import argparse
import importlib.util
import os
import random
import subprocess
import sys
import time

A = 6378137.0
F = 1.0 / 298.257223563


def bench_kernels(mod, points):
    t0 = time.perf_counter()
    for lat, lon, alt in points:
        x, y, z = mod.geodetic_to_ecef(lat, lon, alt, A, F)
        mod.ecef_to_geodetic(x, y, z, A, F)
    roundtrip = time.perf_counter() - t0

    ref = points[0]
    t0 = time.perf_counter()
    for lat, lon, alt in points:
        x, y, z = mod.enu_to_ecef(lat % 1, lon % 1, alt % 1, *ref, A, F)
        mod.ecef_to_enu(x, y, z, *ref, A, F)
    enu = time.perf_counter() - t0
    return roundtrip, enu


def bench_experiment(backend, trials):
    code = (
        "import time\n"
        "from aerotag import kernels\n"
        "from aerotag.sim import demo_mission, run_accuracy_experiment\n"
        "target, log, intr, model = demo_mission(seed=1)\n"
        f"t0 = time.perf_counter()\n"
        f"run_accuracy_experiment(target, log, intr, model, trials={trials})\n"
        "print(f'{kernels.BACKEND} {time.perf_counter() - t0:.3f}')\n"
    )
    env = dict(os.environ, AEROTAG_KERNEL=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    name, seconds = out.stdout.split()
    assert name == backend, f"wanted {backend}, got {name}"
    return float(seconds)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=100000)
    ap.add_argument("--trials", type=int, default=10000)
    args = ap.parse_args()

    rng = random.Random(0)
    points = [(rng.uniform(-89.9, 89.9), rng.uniform(-180, 180),
               rng.uniform(-100, 10000)) for _ in range(args.points)]

    from aerotag.kernels import _pure
    backends = [("pure", _pure)]
    if importlib.util.find_spec("aerotag.kernels._core") is not None:
        from aerotag.kernels import _core
        backends.append(("cython", _core))
    else:
        print("compiled core not built; benchmarking pure backend only\n")

    print(f"scalar kernels over {args.points} points (seconds):")
    print(f"{'backend':>8} {'geodetic<->ecef':>16} {'enu<->ecef':>12}")
    results = {}
    for name, mod in backends:
        rt, enu = bench_kernels(mod, points)
        results[name] = rt
        print(f"{name:>8} {rt:>16.3f} {enu:>12.3f}")
    if "cython" in results:
        print(f"roundtrip speedup: {results['pure'] / results['cython']:.1f}x")

    print(f"\nend-to-end accuracy experiment, {args.trials} trials (seconds):")
    for name, _ in backends:
        print(f"{name:>8} {bench_experiment(name, args.trials):>10.3f}")


if __name__ == "__main__":
    main()
