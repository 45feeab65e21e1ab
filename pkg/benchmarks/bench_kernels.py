"""Timing comparison of the numba and numpy kernel backends.

Run with no arguments to benchmark both backends (each in a subprocess so
the HIMU_BACKEND import-time switch takes effect) and print a side-by-side
table. The --single flag is the child-process mode: it times the kernels
under whatever backend the current process imported and emits JSON.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

REPEATS = 5


def _best_of(fn, *args) -> float:
    fn(*args)  # warmup; also triggers JIT compilation under numba
    best = float("inf")
    for _ in range(REPEATS):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def run_single() -> dict:
    from himu import _kernels

    rng = np.random.default_rng(7)
    workloads = {
        "smooth_renorm (T=100k, sigma=2.0)": (
            _kernels.smooth_renorm, rng.random(100_000), 2.0),
        "smooth_strict (T=4k, sigma=1.5)": (
            _kernels.smooth_strict, rng.random(4_000), 1.5),
        "seq_compose (L=4, T=50k)": (
            _kernels.seq_compose, rng.random((4, 50_000))),
        "right_after (T=200k, kappa=2.0)": (
            _kernels.right_after_compose, rng.random(200_000),
            rng.random(200_000), 2.0),
    }
    timings = {
        name: _best_of(fn, *args) for name, (fn, *args) in workloads.items()
    }
    return {"backend": _kernels.BACKEND, "timings": timings}


def run_comparison() -> int:
    results = {}
    for backend in ("numpy", "numba"):
        env = dict(os.environ, HIMU_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--single"],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            print(f"{backend} backend failed:\n{proc.stderr}", file=sys.stderr)
            return 1
        payload = json.loads(proc.stdout)
        if payload["backend"] != backend:
            print(f"expected backend {backend}, got {payload['backend']}",
                  file=sys.stderr)
            return 1
        results[backend] = payload["timings"]

    width = max(len(name) for name in results["numpy"])
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name in results["numpy"]:
        base = results["numpy"][name]
        jit = results["numba"][name]
        print(f"{name:<{width}}  {base * 1e3:>8.2f}ms  {jit * 1e3:>8.2f}ms  "
              f"{base / jit:>7.1f}x")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--single", action="store_true",
                        help="time the current process's backend, emit JSON")
    args = parser.parse_args()
    if args.single:
        print(json.dumps(run_single()))
        return 0
    return run_comparison()


if __name__ == "__main__":
    raise SystemExit(main())
