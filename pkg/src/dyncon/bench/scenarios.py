"""Benchmark scenarios, run metrics and CSV output."""

from __future__ import annotations

import csv
import os
import random
import statistics
import threading
import time
from dataclasses import asdict, dataclass, fields
from typing import Iterable, List, Optional

from .._kernel import get_kernel
from ..connectivity import VARIANTS, DynamicConnectivity
from .graphs import Graph

SCENARIOS = ("random", "incremental", "decremental")


@dataclass
class ScenarioConfig:
    scenario: str = "random"
    read_ratio: float = 0.99
    threads: int = 1
    ops: Optional[int] = 100_000
    seconds: Optional[float] = None
    variant: str = "full"
    samples: int = 16
    seed: int = 0
    kernel: Optional[str] = None
    warmup: int = 0
    repeats: int = 1

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if not 0.0 <= self.read_ratio <= 1.0:
            raise ValueError("read_ratio must lie in [0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.scenario == "random" and not self.ops and not self.seconds:
            raise ValueError("random scenario needs an op count or a duration")
        if self.samples < 0 or self.warmup < 0 or self.repeats < 1:
            raise ValueError("samples and warmup must be >= 0, repeats >= 1")


@dataclass
class RunMetrics:
    """One row of results. Fractions lie in [0, 1]."""

    graph: str
    n: int
    m: int
    scenario: str
    variant: str
    kernel: str
    threads: int
    read_ratio: float
    samples: int
    seed: int
    ops: int
    seconds: float
    throughput: float
    active_time_rate: float
    pct_non_spanning_additions: float
    pct_non_spanning_removals: float
    largest_component_fraction: float
    read_first_try_rate: float
    reads: int
    ns_additions: int
    spanning_additions: int
    ns_removals: int
    spanning_removals: int
    replacements: int
    examined: int
    promotions: int


TIMING_COLUMNS = ("seconds", "throughput", "active_time_rate")
COLUMNS = tuple(f.name for f in fields(RunMetrics))


def _ratio(a: float, b: float, empty: float = 0.0) -> float:
    return a / b if b else empty


def _largest_component(dc) -> float:
    root_of = dc.K.root_of
    sizes = {}
    for x in dc.F0.vnode:
        r = root_of(x)
        sizes[id(r)] = r.size
    return max(sizes.values()) / dc.n


def _plans(cfg: ScenarioConfig, g: Graph, rng: random.Random):
    """Per-thread work lists for the fixed-work scenarios."""
    edges = list(g.edges)
    rng.shuffle(edges)
    k = cfg.threads
    return [edges[t::k] for t in range(k)]


def _one_run(cfg: ScenarioConfig, g: Graph) -> RunMetrics:
    kernel = get_kernel(cfg.kernel)
    dc = DynamicConnectivity(g.n, variant=cfg.variant, samples=cfg.samples, seed=cfg.seed,
                             kernel=kernel)
    rng = random.Random(cfg.seed)
    edges = g.edges
    n = g.n
    if cfg.scenario == "random":
        for e in edges:
            if rng.random() < 0.5:
                dc.add_edge(*e)
    elif cfg.scenario == "decremental":
        for e in edges:
            dc.add_edge(*e)
    dc.reset_stats()
    plans = _plans(cfg, g, rng) if cfg.scenario != "random" else None
    counts = [0] * cfg.threads
    barrier = threading.Barrier(cfg.threads + 1)
    errors: List[BaseException] = []
    deadline_box = [0.0]
    per_thread_ops = None
    if cfg.scenario == "random" and cfg.ops:
        per_thread_ops = [cfg.ops // cfg.threads + (1 if t < cfg.ops % cfg.threads else 0)
                          for t in range(cfg.threads)]

    def random_worker(tid: int) -> None:
        r = random.Random(f"{cfg.seed}:{tid}")
        add, remove, conn = dc.add_edge, dc.remove_edge, dc.connected
        rr = cfg.read_ratio
        half = rr + (1 - rr) / 2
        m = len(edges)
        rand, rrange = r.random, r.randrange
        barrier.wait()
        done = 0
        limit = per_thread_ops[tid] if per_thread_ops is not None else None
        deadline = deadline_box[0]
        while True:
            if limit is not None:
                if done >= limit:
                    break
            elif (done & 63) == 0 and time.perf_counter() >= deadline:
                break
            x = rand()
            if x < rr or m == 0:
                conn(rrange(n), rrange(n))
            else:
                a, b = edges[rrange(m)]
                if x < half:
                    add(a, b)
                else:
                    remove(a, b)
            done += 1
        counts[tid] = done

    def fixed_worker(tid: int) -> None:
        fn = dc.add_edge if cfg.scenario == "incremental" else dc.remove_edge
        plan = plans[tid]
        barrier.wait()
        for a, b in plan:
            fn(a, b)
        counts[tid] = len(plan)

    target = random_worker if cfg.scenario == "random" else fixed_worker

    def guarded(tid: int) -> None:
        try:
            target(tid)
        except BaseException as exc:
            errors.append(exc)
            try:
                barrier.abort()
            except Exception:
                pass

    ts = [threading.Thread(target=guarded, args=(t,), daemon=True) for t in range(cfg.threads)]
    for t in ts:
        t.start()
    t0 = time.perf_counter()
    deadline_box[0] = t0 + (cfg.seconds or 0.0)
    barrier.wait()
    for t in ts:
        t.join()
    wall = time.perf_counter() - t0
    if errors:
        raise errors[0]
    st = dc.stats()
    total = sum(counts)
    ns_add, sp_add = int(st["ns_add"]), int(st["sp_add"])
    ns_rem, sp_rem = int(st["ns_rem"]), int(st["sp_rem"])
    reads = int(st["reads"])
    return RunMetrics(
        graph=g.name, n=g.n, m=g.m, scenario=cfg.scenario, variant=cfg.variant,
        kernel=kernel.BACKEND, threads=cfg.threads, read_ratio=cfg.read_ratio,
        samples=cfg.samples, seed=cfg.seed, ops=total, seconds=wall,
        throughput=_ratio(total, wall),
        active_time_rate=max(0.0, 1.0 - _ratio(st["lock_wait"], wall * cfg.threads)),
        pct_non_spanning_additions=_ratio(ns_add, ns_add + sp_add),
        pct_non_spanning_removals=_ratio(ns_rem, ns_rem + sp_rem),
        largest_component_fraction=_largest_component(dc),
        read_first_try_rate=_ratio(st["first_try_reads"], reads, 1.0),
        reads=reads, ns_additions=ns_add, spanning_additions=sp_add,
        ns_removals=ns_rem, spanning_removals=sp_rem,
        replacements=int(st["replacements"]), examined=int(st["examined"]),
        promotions=int(st["promotions"] + st["tree_promotions"]),
    )


def run_scenario(cfg: ScenarioConfig, g: Graph) -> RunMetrics:
    """Warmup runs are discarded; timing columns are medians of the timed runs.

    Statistics columns come from the first timed run, so single-threaded
    results are a deterministic function of the graph and the seed.
    """
    cfg.validate()
    for _ in range(cfg.warmup):
        _one_run(cfg, g)
    runs = [_one_run(cfg, g) for _ in range(cfg.repeats)]
    out = runs[0]
    if len(runs) > 1:
        out.seconds = statistics.median(r.seconds for r in runs)
        out.throughput = statistics.median(r.throughput for r in runs)
        out.active_time_rate = statistics.median(r.active_time_rate for r in runs)
    return out


def write_csv(metrics: Iterable[RunMetrics], path: str, append: bool = False) -> None:
    """Header plus one row per run, columns in ``COLUMNS`` order."""
    rows = list(metrics)
    new = not (append and os.path.exists(path) and os.path.getsize(path) > 0)
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        if new:
            w.writeheader()
        for r in rows:
            w.writerow(asdict(r))
