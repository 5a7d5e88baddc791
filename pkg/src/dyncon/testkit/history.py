"""Concurrent operation histories and an exhaustive linearizability search."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .oracle import OracleGraph

_clock = time.perf_counter_ns


@dataclass(frozen=True)
class HistoryRecord:
    """One completed operation; timestamps come from a monotone clock."""

    thread: int
    kind: str
    args: Tuple[int, int]
    result: object
    invoked: int
    responded: int


class HistoryRecorder:
    """Wraps an engine so every call lands in a per-thread log."""

    def __init__(self, dc):
        self.dc = dc
        self._logs: Dict[int, List[HistoryRecord]] = {}
        self._guard = threading.Lock()

    def _log(self, tid: int) -> List[HistoryRecord]:
        log = self._logs.get(tid)
        if log is None:
            with self._guard:
                log = self._logs.setdefault(tid, [])
        return log

    def call(self, tid: int, kind: str, u: int, v: int):
        fn = getattr(self.dc, kind if kind == "connected" else f"{kind}_edge")
        t0 = _clock()
        res = fn(u, v)
        t1 = _clock()
        self._log(tid).append(HistoryRecord(tid, kind, (u, v), res, t0, t1))
        return res

    def records(self) -> List[HistoryRecord]:
        with self._guard:
            logs = list(self._logs.values())
        out = [r for log in logs for r in log]
        out.sort(key=lambda r: r.invoked)
        return out

    def clear(self) -> None:
        with self._guard:
            self._logs.clear()


def _canon(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _connected(n: int, edges: FrozenSet[Tuple[int, int]], u: int, v: int) -> bool:
    return OracleGraph.from_edges(n, edges).connected(u, v)


def find_linearization(n: int, history: Sequence[HistoryRecord],
                       initial: FrozenSet[Tuple[int, int]] = frozenset(),
                       limit: int = 12) -> Optional[List[HistoryRecord]]:
    """Exhaustive search for a legal order respecting real time.

    Returns one witness order, or None when the history is not linearizable.
    Histories longer than ``limit`` are rejected to keep the search bounded.
    """
    ops = list(history)
    if len(ops) > limit:
        raise ValueError(f"history has {len(ops)} operations; the exhaustive check allows {limit}")
    k = len(ops)
    full = (1 << k) - 1
    failed = set()

    def step(done: int, state: FrozenSet[Tuple[int, int]], order: List[int]) -> bool:
        if done == full:
            return True
        key = (done, state)
        if key in failed:
            return False
        pending = [i for i in range(k) if not done >> i & 1]
        horizon = min(ops[i].responded for i in pending)
        for i in pending:
            op = ops[i]
            if op.invoked > horizon:
                continue
            e = _canon(*op.args)
            if op.kind == "add":
                nxt = state | {e}
            elif op.kind == "remove":
                nxt = state - {e}
            else:
                if _connected(n, state, *op.args) != op.result:
                    continue
                nxt = state
            order.append(i)
            if step(done | 1 << i, nxt, order):
                return True
            order.pop()
        failed.add(key)
        return False

    order: List[int] = []
    if step(0, frozenset(initial), order):
        return [ops[i] for i in order]
    return None


def stale_root_history(final_recheck: bool) -> Tuple[List[HistoryRecord], FrozenSet]:
    """The four-node stale-root schedule expressed as a graph history.

    Vertices 0..3 stand for u, v, w, r with tree edges u-w, v-w, w-r. The
    writer removes, re-adds and removes (w, r) while the reader's single
    check spans all of it.
    """
    from .scripted import run_scripted

    name = "stale-root-full" if final_recheck else "stale-root-truncated"
    verdict = run_scripted(name)
    t = iter(range(1, 100))
    r0 = next(t)
    w_ops = []
    for kind in ("remove", "add", "remove"):
        a = next(t)
        w_ops.append(HistoryRecord(1, kind, (2, 3), None, a, next(t)))
    reader = HistoryRecord(0, "connected", (0, 1), verdict.result, r0, next(t))
    return [reader] + w_ops, frozenset({(0, 2), (1, 2), (2, 3)})
