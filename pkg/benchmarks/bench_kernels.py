"""Compiled against pure-Python kernels on the genus-2 workload.

    python3 benchmarks/bench_kernels.py [--radius R] [--repeat K]
"""
import argparse
import time
from pathlib import Path

import numpy as np

from surface_markov import _kernels_py
from surface_markov.cayley import _packed_tables
from surface_markov.markov import transition_matrix
from surface_markov.partition import build_partition
from surface_markov.presentation import load_presentation

try:
    from surface_markov import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "genus2.pres"


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def spheres(mod, tabs, R):
    sphere = np.zeros(1, dtype=np.uint64)
    sizes = [1]
    for m in range(R):
        sphere, _ = mod.next_sphere(sphere, m, *tabs, 4096)
        sizes.append(len(sphere))
    return sizes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    G = load_presentation(FIXTURE.read_text())
    indptr, indices = transition_matrix(build_partition(G)).csr()
    tabs = _packed_tables(G)
    mods = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])

    print(f"{'kernel':<16}{'backend':<10}{'seconds':>12}  result")
    times = {}
    for name, mod in mods:
        t, (lam, it, _) = best_of(lambda: mod.power_iteration(indptr, indices, 1e-12, 10**6), args.repeat)
        times[("power", name)] = t
        print(f"{'power_iteration':<16}{name:<10}{t:>12.6f}  lambda={lam:.15g} in {it} steps")
        t, sizes = best_of(lambda: spheres(mod, tabs, args.radius), args.repeat)
        times[("sphere", name)] = t
        print(f"{'next_sphere':<16}{name:<10}{t:>12.6f}  sigma={sizes}")
    if _kernels_c is None:
        print("compiled extension not built; only the fallback was timed")
        return
    for k in ("power", "sphere"):
        print(f"speed-up {k}: {times[(k, 'python')] / times[(k, 'cython')]:.1f}x")


if __name__ == "__main__":
    main()
