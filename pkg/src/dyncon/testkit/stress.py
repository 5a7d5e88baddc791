"""Phase-based concurrent stress with oracle reconciliation at every barrier."""

from __future__ import annotations

import faulthandler
import random
import sys
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..connectivity import DynamicConnectivity
from .history import HistoryRecord, HistoryRecorder, find_linearization
from .invariants import check_all, partition
from .oracle import OracleGraph, same_partition

Edge = Tuple[int, int]


@dataclass
class StressReport:
    threads: int
    n: int
    phases_run: int
    ops: int
    passed: bool
    failures: List[str] = field(default_factory=list)
    watchdog_trips: int = 0
    reads: int = 0
    first_try_reads: int = 0
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def first_try_rate(self) -> float:
        return self.first_try_reads / self.reads if self.reads else 1.0

    def summary(self) -> str:
        head = "pass" if self.passed else "FAIL"
        return (f"{head}: {self.threads} threads, n={self.n}, {self.phases_run} phases, "
                f"{self.ops} ops in {self.seconds:.1f}s; first-try reads "
                f"{self.first_try_reads}/{self.reads} ({100 * self.first_try_rate:.4f}%); "
                f"watchdog trips {self.watchdog_trips}"
                + (f"; first failure: {self.failures[0]}" if self.failures else ""))


class _UnionFind:
    __slots__ = ("p",)

    def __init__(self, n: int, edges):
        self.p = list(range(n))
        for a, b in edges:
            self.union(a, b)

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[a] = b

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


def reconcile_edges(start: Set[Edge], records: Sequence[HistoryRecord],
                    final: Set[Edge]) -> List[str]:
    """Per-edge check that the final edge set is some linearization's outcome.

    Updates on different edges commute, so each edge is an independent
    register. Its final presence must equal the effect of an update that no
    other update on the same edge strictly follows in real time.
    """
    by_edge: Dict[Edge, List[HistoryRecord]] = {}
    for r in records:
        if r.kind != "connected":
            a, b = r.args
            by_edge.setdefault((min(a, b), max(a, b)), []).append(r)
    errs = []
    touched = set(by_edge)
    for e in (start | final) - touched:
        if (e in start) != (e in final):
            errs.append(f"edge {e} changed with no update on it")
    for e, ups in by_edge.items():
        latest_inv = max(r.invoked for r in ups)
        possible = {r.kind == "add" for r in ups if r.responded >= latest_inv}
        if (e in final) not in possible:
            errs.append(f"edge {e} final presence {e in final} matches no last update")
    return errs


def check_reads(n: int, start: Set[Edge], records: Sequence[HistoryRecord]) -> List[str]:
    """Bound every read by edge sets surely present and possibly present during it."""
    adds: Dict[Edge, List[HistoryRecord]] = {}
    rems: Dict[Edge, List[HistoryRecord]] = {}
    reads = []
    for r in records:
        if r.kind == "connected":
            reads.append(r)
            continue
        a, b = r.args
        e = (min(a, b), max(a, b))
        (adds if r.kind == "add" else rems).setdefault(e, []).append(r)
    all_upper = _UnionFind(n, start | set(adds))
    all_lower = _UnionFind(n, start - set(rems))
    errs = []
    for q in reads:
        u, v = q.args
        if q.result and all_lower.same(u, v):
            continue
        if not q.result and not all_upper.same(u, v):
            continue
        if q.result:
            upper = {e for e in start | set(adds)
                     if e in start or any(r.invoked < q.responded for r in adds.get(e, ()))}
            if not _UnionFind(n, upper).same(u, v):
                errs.append(f"connected{q.args} returned True but no possible graph connects them")
        else:
            lower = set()
            for e in start | set(adds):
                if any(r.invoked < q.responded for r in rems.get(e, ())):
                    continue
                if e in start or any(r.responded < q.invoked for r in adds.get(e, ())):
                    lower.add(e)
            if _UnionFind(n, lower).same(u, v):
                errs.append(f"connected{q.args} returned False but edges present throughout connect them")
    return errs


def _edge_pool(rng: random.Random, n: int, size: int) -> List[Edge]:
    pool = set()
    limit = n * (n - 1) // 2
    while len(pool) < min(size, limit):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            pool.add((min(a, b), max(a, b)))
    return sorted(pool)


def run_phase_stress(threads: int = 2, n: int = 64, phases: int = 50, ops_per_phase: int = 500,
                     read_ratio: float = 0.34, variant: str = "full", kernel=None,
                     seed: int = 0, samples: int = 16, invariants: bool = True,
                     watchdog: float = 60.0, switch_interval: Optional[float] = None,
                     pool_factor: float = 2.0, record_history: bool = True) -> StressReport:
    """Concurrent random phases; each ends with a barrier and full reconciliation."""
    rng = random.Random(seed)
    pool = _edge_pool(rng, n, int(pool_factor * n))
    dc = DynamicConnectivity(n, variant=variant, samples=samples, seed=seed, kernel=kernel)
    rec = HistoryRecorder(dc)
    report = StressReport(threads, n, 0, 0, True)
    current: Set[Edge] = set()
    old_interval = sys.getswitchinterval()
    if switch_interval is not None:
        sys.setswitchinterval(switch_interval)
    t_start = time.perf_counter()
    try:
        for phase in range(phases):
            rec.clear()
            per_thread = [ops_per_phase // threads + (1 if t < ops_per_phase % threads else 0)
                          for t in range(threads)]
            barrier = threading.Barrier(threads)
            errors: List[str] = []

            def worker(tid: int, count: int) -> None:
                r = random.Random(f"{seed}:{phase}:{tid}")
                call = rec.call if record_history else None
                add, remove, conn = dc.add_edge, dc.remove_edge, dc.connected
                w = (1 - read_ratio) / 2
                try:
                    barrier.wait()
                    for _ in range(count):
                        x = r.random()
                        if x < read_ratio:
                            a, b = r.randrange(n), r.randrange(n)
                            if call:
                                call(tid, "connected", a, b)
                            else:
                                conn(a, b)
                        else:
                            a, b = pool[r.randrange(len(pool))]
                            kind = "add" if x < read_ratio + w else "remove"
                            if call:
                                call(tid, kind, a, b)
                            elif kind == "add":
                                add(a, b)
                            else:
                                remove(a, b)
                except BaseException as exc:
                    errors.append(f"thread {tid}: {type(exc).__name__}: {exc}")

            ts = [threading.Thread(target=worker, args=(t, per_thread[t]), daemon=True,
                                   name=f"stress-{t}") for t in range(threads)]
            for t in ts:
                t.start()
            deadline = time.monotonic() + watchdog
            for t in ts:
                t.join(max(0.0, deadline - time.monotonic()))
            if any(t.is_alive() for t in ts):
                report.watchdog_trips += 1
                with tempfile.TemporaryFile("w+") as fh:
                    faulthandler.dump_traceback(file=fh, all_threads=True)
                    fh.seek(0)
                    dump = fh.read()
                report.failures.append(f"phase {phase}: watchdog tripped after {watchdog}s\n{dump}")
                break
            report.phases_run += 1
            report.ops += ops_per_phase
            if errors:
                report.failures.append(f"phase {phase}: {errors[0]}")
                break
            final = set(dc.edges())
            problems = []
            if record_history:
                records = rec.records()
                problems += reconcile_edges(current, records, final)
                problems += check_reads(n, current, records)
            oracle = OracleGraph.from_edges(n, final)
            if not same_partition(partition(dc), oracle.components()):
                problems.append("component partition differs from the oracle")
            if invariants:
                problems += check_all(dc, tours=True)
            if problems:
                report.failures.append(f"phase {phase} (seed {seed}): {problems[0]}")
                break
            current = final
    finally:
        sys.setswitchinterval(old_interval)
    report.seconds = time.perf_counter() - t_start
    st = dc.stats()
    report.stats = st
    report.reads = int(st["reads"])
    report.first_try_reads = int(st["first_try_reads"])
    report.passed = not report.failures
    return report


@dataclass
class SmallHistoryReport:
    trials: int
    checked: int
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def run_small_histories(trials: int = 50, threads: int = 3, ops_per_thread: int = 4,
                        n: int = 6, variant: str = "full", kernel=None, seed: int = 0,
                        switch_interval: float = 1e-6) -> SmallHistoryReport:
    """Short concurrent bursts checked exhaustively for a linearization."""
    if threads * ops_per_thread > 12:
        raise ValueError("exhaustive checking is limited to 12 operations per history")
    out = SmallHistoryReport(trials, 0)
    old = sys.getswitchinterval()
    sys.setswitchinterval(switch_interval)
    try:
        for trial in range(trials):
            r = random.Random(seed * 1_000_003 + trial)
            dc = DynamicConnectivity(n, variant=variant, seed=trial, kernel=kernel)
            pool = _edge_pool(r, n, 2 * n)
            initial = set()
            for e in pool:
                if r.random() < 0.5:
                    dc.add_edge(*e)
                    initial.add(e)
            rec = HistoryRecorder(dc)
            plans = []
            for _ in range(threads):
                plan = []
                for _ in range(ops_per_thread):
                    x = r.random()
                    if x < 0.4:
                        plan.append(("connected",) + (r.randrange(n), r.randrange(n)))
                    else:
                        plan.append(("add" if x < 0.7 else "remove",) + pool[r.randrange(len(pool))])
                plans.append(plan)
            barrier = threading.Barrier(threads)

            def worker(tid: int) -> None:
                barrier.wait()
                for kind, a, b in plans[tid]:
                    rec.call(tid, kind, a, b)

            ts = [threading.Thread(target=worker, args=(t,)) for t in range(threads)]
            for t in ts:
                t.start()
            for t in ts:
                t.join()
            hist = rec.records()
            out.checked += 1
            if find_linearization(n, hist, frozenset(initial)) is None:
                out.violations.append(f"trial {trial} (seed {seed}): no linearization for {hist}")
    finally:
        sys.setswitchinterval(old)
    return out
