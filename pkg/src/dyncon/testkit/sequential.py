"""Randomized sequential equivalence against the oracle, with shrinking."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from ..connectivity import DynamicConnectivity
from .invariants import check_all
from .oracle import OracleGraph

Op = Tuple[str, int, int]


def random_ops(seed: int, n: int, count: int, pool_factor: float = 2.0,
               mix: Tuple[float, float] = (1 / 3, 2 / 3)) -> List[Op]:
    """Deterministic op list: adds and removes over a fixed random edge pool.

    The pool holds about ``pool_factor * n`` distinct pairs, which keeps the
    graph near the connectivity threshold so spanning removals are common.
    ``mix`` gives the cumulative add and remove fractions; the rest are queries.
    """
    rng = random.Random(seed)
    if n < 2:
        return [("connected", 0, 0)] * count
    pool_size = max(1, int(pool_factor * n))
    pool = set()
    limit = n * (n - 1) // 2
    while len(pool) < min(pool_size, limit):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            pool.add((min(a, b), max(a, b)))
    pool_list = sorted(pool)
    ops: List[Op] = []
    p_add, p_rem = mix
    for _ in range(count):
        r = rng.random()
        if r < p_add:
            a, b = pool_list[rng.randrange(len(pool_list))]
            ops.append(("add", a, b))
        elif r < p_rem:
            a, b = pool_list[rng.randrange(len(pool_list))]
            ops.append(("remove", a, b))
        else:
            ops.append(("connected", rng.randrange(n), rng.randrange(n)))
    return ops


@dataclass
class SequentialReport:
    seed: int
    n: int
    ops_run: int
    passed: bool
    failure_index: Optional[int] = None
    message: str = ""
    reproducer: List[Op] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def summary(self) -> str:
        if self.passed:
            return f"seed={self.seed} n={self.n} ops={self.ops_run}: pass"
        return (f"seed={self.seed} n={self.n}: FAIL at op {self.failure_index}: {self.message}; "
                f"reproducer has {len(self.reproducer)} ops")


def replay(n: int, ops: Sequence[Op], make: Callable[[], DynamicConnectivity],
           invariants_every: int = 0) -> Tuple[Optional[int], str, DynamicConnectivity]:
    """Run ``ops`` on a fresh engine and oracle; return the first failing index."""
    dc = make()
    for f in dc.levels.F:
        f.check_versions = True
    g = OracleGraph(n)
    add, remove, conn = dc.add_edge, dc.remove_edge, dc.connected
    g_add, g_remove, g_conn = g.add_edge, g.remove_edge, g.connected
    for i, (kind, a, b) in enumerate(ops):
        try:
            if kind == "add":
                if a != b:
                    add(a, b)
                    g_add(a, b)
            elif kind == "remove":
                if a != b:
                    remove(a, b)
                    g_remove(a, b)
            else:
                got = conn(a, b)
                want = g_conn(a, b)
                if got != want:
                    return i, f"connected({a}, {b}) returned {got}, oracle says {want}", dc
        except AssertionError as exc:
            return i, f"{type(exc).__name__}: {exc}", dc
        if invariants_every and (i + 1) % invariants_every == 0:
            errs = check_all(dc)
            if errs:
                return i, "invariant: " + errs[0], dc
    return None, "", dc


def shrink(n: int, ops: List[Op], make: Callable[[], DynamicConnectivity],
           invariants_every: int = 0, budget: int = 400) -> List[Op]:
    """Smallest failing prefix by bisection, then greedy chunk deletion."""
    lo, hi = 0, len(ops)
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if replay(n, ops[:mid], make, invariants_every)[0] is not None:
            hi = mid
        else:
            lo = mid
    cur = ops[:hi]
    chunk = max(1, len(cur) // 2)
    tries = 0
    while chunk >= 1 and tries < budget:
        i = 0
        changed = False
        while i < len(cur) - 1 and tries < budget:
            cand = cur[:i] + cur[i + chunk:]
            tries += 1
            if cand and replay(n, cand, make, invariants_every)[0] is not None:
                cur = cand
                changed = True
            else:
                i += chunk
        if not changed:
            chunk //= 2
    return cur


def run_sequential_equivalence(seed: int, n: int, ops: int, variant: str = "full",
                               kernel=None, samples: int = 16, mutations=(),
                               invariants_every: int = 0, do_shrink: bool = True,
                               op_list: Optional[List[Op]] = None) -> SequentialReport:
    """Execute ``ops`` random operations against engine and oracle."""
    op_list = op_list if op_list is not None else random_ops(seed, n, ops)

    def make() -> DynamicConnectivity:
        return DynamicConnectivity(n, variant=variant, samples=samples, seed=seed,
                                   kernel=kernel, mutations=mutations)

    idx, msg, dc = replay(n, op_list, make, invariants_every)
    if idx is None:
        return SequentialReport(seed, n, len(op_list), True, stats=dc.stats())
    repro = shrink(n, op_list[: idx + 1], make, invariants_every) if do_shrink else op_list[: idx + 1]
    return SequentialReport(seed, n, idx + 1, False, idx, msg, repro, dc.stats())
