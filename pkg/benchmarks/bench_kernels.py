"""Compare the compiled and pure-Python kernels on identical workloads.

Usage: python benchmarks/bench_kernels.py [--n 512] [--ops 50000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from dyncon import DynamicConnectivity, available_kernels, get_kernel
from dyncon.testkit.sequential import random_ops


def mixed_workload(kernel, n: int, ops, seed: int) -> float:
    dc = DynamicConnectivity(n, seed=seed, kernel=kernel)
    add, remove, conn = dc.add_edge, dc.remove_edge, dc.connected
    t0 = time.perf_counter()
    for kind, a, b in ops:
        if kind == "add":
            add(a, b)
        elif kind == "remove":
            remove(a, b)
        else:
            conn(a, b)
    return time.perf_counter() - t0


def read_workload(kernel, n: int, reads: int, seed: int) -> float:
    rng = random.Random(seed)
    dc = DynamicConnectivity(n, seed=seed, kernel=kernel)
    for _ in range(2 * n):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            dc.add_edge(a, b)
    pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(reads)]
    conn = dc.connected
    t0 = time.perf_counter()
    for a, b in pairs:
        conn(a, b)
    return time.perf_counter() - t0


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--ops", type=int, default=50_000)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()
    kernels = available_kernels()
    ops = random_ops(args.seed, args.n, args.ops)
    rows = {}
    for name in kernels:
        K = get_kernel(name)
        mixed = statistics.median(mixed_workload(K, args.n, ops, args.seed)
                                  for _ in range(args.repeats))
        reads = statistics.median(read_workload(K, args.n, args.ops, args.seed)
                                  for _ in range(args.repeats))
        rows[name] = (mixed, reads)
        print(f"{name:>7}: mixed {args.ops / mixed:10.0f} ops/s   reads {args.ops / reads:10.0f} ops/s")
    if "python" in rows and "cython" in rows:
        (pm, pr), (cm, cr) = rows["python"], rows["cython"]
        print(f"speedup: mixed {pm / cm:.2f}x   reads {pr / cr:.2f}x")
    else:
        print("compiled kernel unavailable; only the pure-Python kernel was measured")


if __name__ == "__main__":
    main()
