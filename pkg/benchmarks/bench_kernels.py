"""Time the numba kernels against the pure fallback.

Each mode runs in its own interpreter because the switch is read at import
time.  Usage: python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKLOAD = r"""
import json, sys, time
import numpy as np
from fractions import Fraction
from bipramsey._jit import NUMBA_ENABLED
from bipramsey.colourings import random_colouring
from bipramsey.graphs import make_path, make_grid
from bipramsey.ramsey import bipartite_ramsey_exact, find_monochromatic_copy
from bipramsey.regularity import VertexPair, eps_regular_exhaustive

repeat = int(sys.argv[1])

def warm():
    find_monochromatic_copy(random_colouring(4, 2, 0), make_path(3), 1)
    bipartite_ramsey_exact([make_path(2), make_path(2)], 2)
    rng = np.random.default_rng(0)
    eps_regular_exhaustive(VertexPair(tuple(range(4)), tuple(range(4, 8)), rng.random((4, 4)) < 0.5), Fraction(1, 4))

def ramsey():
    bipartite_ramsey_exact([make_path(4), make_path(4)], 4)

def mono():
    for seed in range(20):
        c = random_colouring(14, 2, seed)
        find_monochromatic_copy(c, make_grid(2, 5), 1)

def regular():
    rng = np.random.default_rng(1)
    for _ in range(5):
        adj = rng.random((16, 16)) < 0.5
        eps_regular_exhaustive(VertexPair(tuple(range(16)), tuple(range(16, 32)), adj), Fraction(1, 5))

t0 = time.perf_counter(); warm(); compile_s = time.perf_counter() - t0
out = {"numba": NUMBA_ENABLED, "warmup": compile_s}
for name, fn in (("ramsey_P4_P4", ramsey), ("mono_grid2x5_x20", mono), ("regular_16x16_x5", regular)):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(mode: str, repeat: int) -> dict:
    env = dict(os.environ, BIPRAMSEY_NO_NUMBA="0" if mode == "jit" else "1")
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env, capture_output=True,
                          text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    jit = run("jit", args.repeat)
    pure = run("pure", args.repeat)
    print(f"{'workload':<22}{'numba s':>12}{'fallback s':>12}{'speedup':>10}")
    for key in jit:
        if key == "numba":
            continue
        a, b = jit[key], pure[key]
        print(f"{key:<22}{a:>12.4f}{b:>12.4f}{b / a if a else float('nan'):>10.1f}")
    print(f"total wall time {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
