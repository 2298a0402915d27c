"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each row checks that both backends return the same answer.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from trihit import kernels
from trihit._jit import HAVE_NUMBA
from trihit.graph import list_triangles
from trihit.random_scenes import random_graph


def _bits(g):
    n = g.n
    return n, {v: 1 << (n - 1 - i) for i, v in enumerate(g.vertices)}


def obstacle_case(n: int, seed: int):
    g = random_graph(n, 0.35, seed)
    n, bit = _bits(g)
    obs = np.array([bit[a] | bit[b] | bit[c] for a, b, c in list_triangles(g)], dtype=np.int64)
    return (n, obs, np.ones(n, dtype=np.int64))


def peeling_case(n: int, seed: int):
    g = random_graph(n, 0.3, seed)
    n, bit = _bits(g)
    adj = np.array([sum(bit[u] for u in g.nbrs(v)) for v in g.vertices], dtype=np.int64)
    return (n, adj, np.ones(n, dtype=np.int64), 0)


def boxes_case(n: int, seed: int):
    rng = np.random.default_rng(seed)
    x0 = rng.integers(0, 20 * n, n)
    y0 = rng.integers(0, 20 * n, n)
    return (x0, y0, x0 + rng.integers(0, 40, n), y0 + rng.integers(0, 40, n))


def _time(fn, args, repeat):
    out = None
    samples = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        samples.append(time.perf_counter() - t)
    return statistics.median(samples), out


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is disabled or missing; only the numpy backend can run", file=sys.stderr)
        return 1
    cases = [
        ("obstacle_hitting", n, kernels.min_obstacle_hitting_numpy, kernels.min_obstacle_hitting_numba,
         obstacle_case(n, args.seed)) for n in (14, 17, 20)
    ] + [
        ("peeling_hitting", n, kernels.min_peeling_hitting_numpy, kernels.min_peeling_hitting_numba,
         peeling_case(n, args.seed)) for n in (12, 15, 18)
    ] + [
        ("box_overlap", n, kernels.box_overlap_pairs_numpy, kernels.box_overlap_pairs_numba,
         boxes_case(n, args.seed)) for n in (1000, 5000, 20000)
    ]
    rows = []
    print(f"{'kernel':<18}{'size':>7}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for name, size, np_fn, nb_fn, case in cases:
        nb_fn(*case)  # compile outside the timing
        t_np, r_np = _time(np_fn, case, args.repeat)
        t_nb, r_nb = _time(nb_fn, case, args.repeat)
        agree = _same(r_np, r_nb)
        rows.append({"kernel": name, "size": size, "numpy_s": t_np, "numba_s": t_nb,
                     "speedup": t_np / t_nb if t_nb else float("inf"), "agree": agree})
        print(f"{name:<18}{size:>7}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / max(t_nb, 1e-9):>10.1f}  {agree}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["agree"] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
