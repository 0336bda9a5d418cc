"""Time the hot kernels with the JIT on versus the numpy fallback.

Each mode runs in a fresh subprocess because GRAPHONFL_NO_NUMBA is read
once at import. The child times whatever mode its environment dictates
and prints JSON; the parent runs both children and prints a table with
speedups.

Usage:
    python3 benchmarks/bench_kernels.py            # compare both modes
    python3 benchmarks/bench_kernels.py --child    # time current mode only
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _bench_current_mode(repeats: int) -> dict:
    import numpy as np

    from graphonfl import _kernels as K

    rng = np.random.default_rng(7)

    # Warm up so the jitted runs do not time compilation.
    y1 = rng.normal(size=64)
    out1 = np.empty_like(y1)
    K.tv1d(y1, 0.3, out1) if K.HAVE_NUMBA else K.tv1d_py(y1, 0.3, out1)
    y8 = rng.normal(size=(8, 8))
    (K.grid_fused if K.HAVE_NUMBA else K.grid_fused_py)(y8, 0.3, 1e-8, 200, y8.copy())
    d8 = np.abs(rng.normal(size=(8, 8)))
    d8 = (d8 + d8.T) / 2
    np.fill_diagonal(d8, 0.0)
    (K.greedy_tour if K.HAVE_NUMBA else K.greedy_tour_py)(d8, 0)
    K.cheb_pairwise(rng.normal(size=(8, 8)))
    K.cheb_pairwise_excl(rng.normal(size=(8, 8)))

    def best_of(fn) -> float:
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    results = {"numba": bool(K.HAVE_NUMBA)}

    y = rng.normal(size=200_000)
    out = np.empty_like(y)
    tv = K.tv1d if K.HAVE_NUMBA else K.tv1d_py
    results["tv1d_n200k"] = best_of(lambda: tv(y, 0.5, out))

    grid = rng.normal(size=(150, 150))
    gf = K.grid_fused if K.HAVE_NUMBA else K.grid_fused_py
    results["grid_fused_150x150"] = best_of(lambda: gf(grid, 0.4, 1e-8, 5000, grid.copy()))

    d = np.abs(rng.normal(size=(400, 400)))
    d = (d + d.T) / 2
    np.fill_diagonal(d, 0.0)
    tour = K.greedy_tour if K.HAVE_NUMBA else K.greedy_tour_py
    results["greedy_tour_s400"] = best_of(lambda: tour(d, 0))

    g = rng.normal(size=(400, 400))
    results["cheb_pairwise_s400"] = best_of(lambda: K.cheb_pairwise(g))
    return results


def _run_child(no_numba: bool, repeats: int) -> dict:
    env = dict(os.environ)
    env["GRAPHONFL_NO_NUMBA"] = "1" if no_numba else "0"
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--child",
         "--repeats", str(repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--child", action="store_true",
                    help="time the current mode and print JSON")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats per kernel (best is kept)")
    args = ap.parse_args()

    if args.child:
        print(json.dumps(_bench_current_mode(args.repeats)))
        return

    jit = _run_child(no_numba=False, repeats=args.repeats)
    ref = _run_child(no_numba=True, repeats=args.repeats)
    if not jit["numba"]:
        print("note: numba is not importable, both columns are the fallback")

    names = [k for k in jit if k != "numba"]
    w = max(len(n) for n in names)
    print(f"{'kernel':<{w}}  {'jit (s)':>10}  {'fallback (s)':>13}  {'speedup':>8}")
    for name in names:
        a, b = jit[name], ref[name]
        print(f"{name:<{w}}  {a:>10.4f}  {b:>13.4f}  {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
