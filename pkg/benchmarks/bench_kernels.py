"""Timing comparison of the compiled and pure-Python kernel backends.

The backend is fixed at import time, so each measurement runs in a child
process with PERCRENORM_BACKEND set. Reported numbers are best-of-repeats
wall clock for the three hot paths: cluster labeling, the bond-insertion
crossing sweep and one full renormalization trial batch.

Usage: python3 benchmarks/bench_kernels.py [--repeats 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_PAYLOAD = r"""
import json, time
import numpy as np
from percrenorm import (
    BACKEND, LatticeKind, PercolationParams, RenormScheme, RngSpec,
    crossing_curve, estimate_P, label_clusters, sample,
)
from percrenorm.percolation import block_graph

def best(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

repeats = int(REPEATS)
out = {"backend": BACKEND}

g = block_graph(LatticeKind.CUBIC, 10)
params = PercolationParams.mixed(1.0, 0.3)
cfgs = [sample(g, params, RngSpec(0, t)) for t in range(20)]
out["label_20x_cubic_k10"] = best(lambda: [label_clusters(c) for c in cfgs], repeats)

p_grid = [0.20 + 0.01 * i for i in range(11)]
out["curve_k6_200trials"] = best(
    lambda: crossing_curve(LatticeKind.CUBIC, 6, params, p_grid, 200, RngSpec(1)),
    repeats,
)

scheme = RenormScheme(LatticeKind.CUBIC, 3, 2, PercolationParams.mixed(1.0, 0.4))
out["renorm_L3_k2_100trials"] = best(
    lambda: estimate_P(scheme, 100, RngSpec(2)), repeats
)

print(json.dumps(out))
"""


def run_backend(backend: str, repeats: int) -> dict:
    env = dict(os.environ, PERCRENORM_BACKEND=backend)
    code = _PAYLOAD.replace("REPEATS", str(repeats))
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(f"{backend} run failed:\n{proc.stderr}")
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    results = {b: run_backend(b, args.repeats) for b in ("python", "compiled")}
    for b, res in results.items():
        if res["backend"] != b:
            raise RuntimeError(f"requested {b} backend but got {res['backend']}")

    keys = [k for k in results["python"] if k != "backend"]
    width = max(len(k) for k in keys)
    print(f"{'case'.ljust(width)}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for k in keys:
        tp, tc = results["python"][k], results["compiled"][k]
        print(f"{k.ljust(width)}  {tp:>9.4f}s  {tc:>9.4f}s  {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
