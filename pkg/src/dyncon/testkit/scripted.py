"""Deterministic reader/writer interleavings driven through pause points.

Two families:

* ``stale-root-full`` / ``stale-root-truncated``: a reader's connectivity
  check over four raw tree nodes while a writer cuts and relinks them at
  exact points inside the reader's root searches.
* ``replacement-*``: one lock-free addition of the only candidate replacement
  racing a spanning-edge removal, in each of the four orderings of
  descriptor publication, descriptor read, slot closing and slot reuse.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .._kernel import _pykernel
from ..connectivity import DynamicConnectivity
from ..states import IN_PROGRESS, INITIAL, NON_SPANNING, SPANNING, STATUS_NAMES
from .invariants import check_all
from .oracle import OracleGraph

HOOK_NAMES = (
    "after_add_info", "after_read_op", "after_propose", "before_blocking_add",
    "before_publish", "after_publish", "after_finalize",
)

SCHEDULES = (
    "stale-root-full",
    "stale-root-truncated",
    "replacement-publish-first",
    "replacement-read-first",
    "replacement-closed-slot",
    "replacement-reused-slot",
)


@dataclass
class Verdict:
    schedule: str
    passed: bool
    result: object = None
    expected: object = None
    trace: List[str] = field(default_factory=list)
    problems: List[str] = field(default_factory=list)
    transitions: List[Tuple] = field(default_factory=list)

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = "; ".join(self.problems)
        return f"{self.schedule}: {status} (result={self.result!r}, expected={self.expected!r}){' ' + extra if extra else ''}"


# -- four-node reader/writer schedule -----------------------------------------

def _stale_root(final_recheck: bool) -> Verdict:
    K = _pykernel
    u, v, w, r = (K.Node(p, i, vertex=i) for i, p in enumerate((1, 2, 3, 4)))
    u.parent = w
    v.parent = w
    w.parent = r
    trace: List[str] = []
    calls = [0]

    def writer_actions(call: int, point: str) -> None:
        if call == 1 and point == "before_version":
            # The reader already stands on r.
            r.version += 1
            w.version += 1
            w.parent = None
            trace.append("W: cut (w, r); versions r=1 w=1")
            r.version += 1
            w.version += 1
            trace.append("W: start relinking (w, r); versions r=2 w=2")
        elif call == 2 and point == "before_version":
            # The reader stands on w and has seen no parent.
            r.parent = w
            trace.append("W: finish relink with parent link r -> w")
            w.version += 1
            trace.append("W: start cutting (w, r) again; version w=3")
        elif call == 3 and point == "start":
            # Mid-cut restructuring puts r above w for a moment.
            r.parent = None
            w.parent = r
            trace.append("W: restructure during the cut, r on top")
        elif call == 4 and point == "start":
            w.parent = None
            trace.append("W: finish the cut; w and r are separate roots")

    def find_root(x):
        calls[0] += 1
        k = calls[0]
        writer_actions(k, "start")
        cur = x
        while cur.parent is not None:
            cur = cur.parent
        writer_actions(k, "before_version")
        out = (cur, cur.version)
        trace.append(f"R: root search {k} returns (node {cur.vertex}, version {cur.version})")
        return out

    check = K.make_connected(find_root, final_recheck=final_recheck)
    got, attempts = check(u, v)
    name = "stale-root-full" if final_recheck else "stale-root-truncated"
    expected = True if final_recheck else False
    trace.append(f"R: connected(u, v) = {got} after {attempts} attempt(s)")
    return Verdict(name, got == expected, got, expected, trace)


# -- pause points over real threads -------------------------------------------

class PausePoints:
    """Named, single-shot pause points keyed by ``(thread name, hook name)``."""

    def __init__(self, timeout: float = 10.0):
        self.timeout = timeout
        self._armed: Dict[Tuple[str, str], Optional[Callable[[], None]]] = {}
        self._reached = defaultdict(threading.Event)
        self._go = defaultdict(threading.Event)
        self._guard = threading.Lock()
        self.log: List[str] = []

    def arm(self, thread: str, hook: str, on_reach: Optional[Callable[[], None]] = None,
            block: bool = True) -> None:
        self._armed[(thread, hook)] = (on_reach, block)

    def __call__(self, hook: str) -> None:
        key = (threading.current_thread().name, hook)
        with self._guard:
            entry = self._armed.pop(key, None)
        if entry is None:
            return
        on_reach, block = entry
        self.log.append(f"{key[0]}: {hook}")
        if on_reach is not None:
            on_reach()
        self._reached[key].set()
        if block and not self._go[key].wait(self.timeout):
            raise TimeoutError(f"{key} was never released")

    def wait(self, thread: str, hook: str) -> None:
        if not self._reached[(thread, hook)].wait(self.timeout):
            raise TimeoutError(f"{thread} never reached {hook}")

    def release(self, thread: str, hook: str) -> None:
        self._go[(thread, hook)].set()

    def release_all(self) -> None:
        for key in list(self._armed):
            self._go[key].set()
        for ev in list(self._go.values()):
            ev.set()


# State-machine arcs: (old status or None, new status or None, level rule).
_ALLOWED = {
    (None, INITIAL),
    (INITIAL, NON_SPANNING),
    (INITIAL, IN_PROGRESS),
    (INITIAL, SPANNING),
    (INITIAL, None),
    (IN_PROGRESS, SPANNING),
    (NON_SPANNING, NON_SPANNING),
    (NON_SPANNING, SPANNING),
    (NON_SPANNING, None),
    (SPANNING, None),
    # Tree-edge promotion and a failed proposal's revert.
    (SPANNING, SPANNING),
    (SPANNING, NON_SPANNING),
}


class TransitionRecorder:
    """Collects every state-map transition and flags arcs outside the machine."""

    def __init__(self, n: int):
        self.n = n
        self.transitions: List[Tuple] = []
        self.bad: List[str] = []
        self._guard = threading.Lock()

    def __call__(self, edge, old, new) -> None:
        a = None if old is None else old.status
        b = None if new is None else new.status
        with self._guard:
            self.transitions.append((divmod(edge, self.n), old, new))
        ok = (a, b) in _ALLOWED
        if ok and a == b == NON_SPANNING:
            ok = new.level == old.level + 1
        if ok and a == b == SPANNING:
            ok = new.level == old.level + 1
        if ok and a == SPANNING and b == NON_SPANNING:
            ok = new.level == old.level
        if ok and a == NON_SPANNING and b == SPANNING:
            ok = new.level == old.level
        if not ok:
            name = lambda s: "REMOVED" if s is None else f"{STATUS_NAMES[s.status]}({s.level})"
            with self._guard:
                self.bad.append(f"edge {divmod(edge, self.n)}: {name(old)} -> {name(new)}")


def bridging_non_spanning(dc) -> List[Tuple[int, int]]:
    """Non-spanning edges whose endpoints lie in different level-0 trees."""
    out = []
    n = dc.n
    root_of = dc.K.root_of
    vn = dc.F0.vnode
    for e, s in dc.states.items():
        if s.status == NON_SPANNING:
            a, b = divmod(e, n)
            if root_of(vn[a]) is not root_of(vn[b]):
                out.append((a, b))
    return out


def _path_engine(kernel, seed: int):
    """Path 0-1-2-3; removing (1, 2) splits it into {0, 1} and {2, 3}."""
    dc = DynamicConnectivity(4, variant="full", samples=16, seed=seed, kernel=kernel)
    for a, b in ((0, 1), (1, 2), (2, 3)):
        dc.add_edge(a, b)
    rec = TransitionRecorder(4)
    dc.states.recorder = rec
    return dc, rec


def _spawn(name: str, fn) -> Tuple[threading.Thread, list]:
    errors: list = []

    def body():
        try:
            fn()
        except BaseException as exc:
            errors.append(exc)

    t = threading.Thread(target=body, name=name, daemon=True)
    t.start()
    return t, errors


def _finish(schedule: str, dc, rec, pauses, threads, expected_edges, trace) -> Verdict:
    problems: List[str] = []
    pauses.release_all()
    for t, errs in threads:
        t.join(pauses.timeout)
        if t.is_alive():
            problems.append(f"thread {t.name} did not finish")
        for exc in errs:
            problems.append(f"thread {t.name} raised {type(exc).__name__}: {exc}")
    bridging = bridging_non_spanning(dc)
    if bridging:
        problems.append(f"non-spanning edges bridge two components: {bridging}")
    problems += rec.bad
    problems += check_all(dc)
    g = OracleGraph(dc.n)
    for a, b in expected_edges:
        g.add_edge(a, b)
    if dc.edges() != sorted(expected_edges):
        problems.append(f"edge set {dc.edges()} differs from expected {sorted(expected_edges)}")
    for a in range(dc.n):
        for b in range(dc.n):
            if dc.connected(a, b) != g.connected(a, b):
                problems.append(f"connected({a}, {b}) disagrees with the oracle")
    result = {f"{a}-{b}": STATUS_NAMES[s.status] for (a, b), s in
              ((divmod(e, dc.n), s) for e, s in dc.states.items())}
    return Verdict(schedule, not problems, result, "no bridging non-spanning edge",
                   trace + pauses.log, problems, rec.transitions)


def _publish_first(kernel, seed: int) -> Verdict:
    """Descriptor published before the adder reads it: the adder proposes itself."""
    dc, rec = _path_engine(kernel, seed)
    p = PausePoints()
    dc.hooks = {h: p for h in HOOK_NAMES}
    p.arm("remover", "after_publish")
    threads = []
    threads.append(_spawn("remover", lambda: dc.remove_edge(1, 2)))
    p.wait("remover", "after_publish")
    threads.append(_spawn("adder", lambda: dc.add_edge(0, 3)))
    threads[-1][0].join(p.timeout)
    p.release("remover", "after_publish")
    trace = ["remover published its descriptor", "adder ran to completion", "remover resumed"]
    return _finish("replacement-publish-first", dc, rec, p, threads, [(0, 1), (2, 3), (0, 3)], trace)


def _read_first(kernel, seed: int) -> Verdict:
    """Adder reads an empty descriptor first; the removal's scan helps it."""
    dc, rec = _path_engine(kernel, seed)
    p = PausePoints()
    dc.hooks = {h: p for h in HOOK_NAMES}
    p.arm("adder", "after_read_op")
    p.arm("remover", "before_publish")
    threads = [_spawn("adder", lambda: dc.add_edge(0, 3))]
    p.wait("adder", "after_read_op")
    threads.append(_spawn("remover", lambda: dc.remove_edge(1, 2)))
    p.wait("remover", "before_publish")
    p.release("remover", "before_publish")
    threads[1][0].join(p.timeout)
    p.release("adder", "after_read_op")
    trace = ["adder published info and read no descriptor", "remover ran to completion",
             "adder resumed"]
    return _finish("replacement-read-first", dc, rec, p, threads, [(0, 1), (2, 3), (0, 3)], trace)


def _closed_slot(kernel, seed: int) -> Verdict:
    """Adder meets a CLOSED slot and falls back to the locked path."""
    dc, rec = _path_engine(kernel, seed)
    p = PausePoints()
    dc.hooks = {h: p for h in HOOK_NAMES}
    p.arm("remover", "after_finalize")
    p.arm("adder", "before_blocking_add", block=False)
    threads = [_spawn("remover", lambda: dc.remove_edge(1, 2))]
    p.wait("remover", "after_finalize")
    threads.append(_spawn("adder", lambda: dc.add_edge(0, 3)))
    p.wait("adder", "before_blocking_add")
    p.release("remover", "after_finalize")
    trace = ["remover closed the slot with no replacement", "adder saw CLOSED",
             "remover committed the split", "adder linked under the locks"]
    return _finish("replacement-closed-slot", dc, rec, p, threads, [(0, 1), (2, 3), (0, 3)], trace)


def _reused_slot(kernel, seed: int) -> Verdict:
    """Slot holds an edge that was then removed; a later proposer clears it and wins."""
    dc, rec = _path_engine(kernel, seed)
    p = PausePoints()
    dc.hooks = {h: p for h in HOOK_NAMES}
    # B installs g's INITIAL state and reads no descriptor.
    p.arm("B", "after_read_op")
    p.arm("remover", "before_publish")
    p.arm("remover", "after_publish")
    threads = [_spawn("B", lambda: dc.add_edge(0, 2))]
    p.wait("B", "after_read_op")
    threads.append(_spawn("remover", lambda: dc.remove_edge(1, 2)))
    p.wait("remover", "before_publish")
    p.release("remover", "before_publish")
    p.wait("remover", "after_publish")
    # A1 adopts B's INITIAL state, proposes (g, s) and stalls.
    p.arm("A1", "after_propose")
    threads.append(_spawn("A1", lambda: dc.add_edge(0, 2)))
    p.wait("A1", "after_propose")
    # B settles g as non-spanning, then C removes it.
    p.release("B", "after_read_op")
    threads[0][0].join(p.timeout)
    threads.append(_spawn("C", lambda: dc.remove_edge(0, 2)))
    threads[-1][0].join(p.timeout)
    # D finds the slot holding a removed edge, clears it and proposes f.
    threads.append(_spawn("D", lambda: dc.add_edge(1, 3)))
    threads[-1][0].join(p.timeout)
    p.release("A1", "after_propose")
    threads[2][0].join(p.timeout)
    p.release("remover", "after_publish")
    trace = ["B read no descriptor", "remover published", "A1 proposed g",
             "B settled g as non-spanning", "C removed g", "D cleared the slot and proposed f",
             "A1 and the remover resumed"]
    return _finish("replacement-reused-slot", dc, rec, p, threads, [(0, 1), (2, 3), (1, 3)], trace)


def run_scripted(schedule: str, kernel=None, seed: int = 0) -> Verdict:
    """Drive one named schedule and check its claimed outcome."""
    if schedule == "stale-root-full":
        return _stale_root(True)
    if schedule == "stale-root-truncated":
        return _stale_root(False)
    cases = {
        "replacement-publish-first": _publish_first,
        "replacement-read-first": _read_first,
        "replacement-closed-slot": _closed_slot,
        "replacement-reused-slot": _reused_slot,
    }
    if schedule not in cases:
        raise ValueError(f"unknown schedule {schedule!r}; expected one of {SCHEDULES}")
    return cases[schedule](kernel, seed)
