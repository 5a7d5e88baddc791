"""Thread-safe dynamic connectivity facade.

Variants:

* ``coarse``: one global lock serializes updates; queries are lock-free.
* ``fine``: per-component root locks for updates and queries.
* ``nb-reads``: per-component locks for updates; queries are lock-free.
* ``full``: ``nb-reads`` plus lock-free insertion and removal of non-spanning
  edges, with removal descriptors and replacement helping.
"""

from __future__ import annotations

import threading
import time
from typing import Callable, Dict, List, Optional, Tuple

from ._kernel import Kernel, get_kernel
from .levels import DEFAULT_SAMPLES, LevelForest, SearchStats
from .states import (
    CLOSED,
    IN_PROGRESS,
    INITIAL,
    NON_SPANNING,
    SPANNING,
    EdgeState,
    propose_replacement,
)

VARIANTS = ("coarse", "fine", "nb-reads", "full")

_perf = time.perf_counter

BACKOFF_AFTER = 64
_BACKOFF_CAP = 1e-3


def _backoff(failures: int) -> None:
    """Sleep with capped exponential growth once ``failures`` passes the threshold."""
    if failures > BACKOFF_AFTER:
        time.sleep(min(_BACKOFF_CAP, 1e-6 * (1 << min(failures - BACKOFF_AFTER, 10))))


class ThreadStats:
    """Per-thread operation counters."""

    __slots__ = (
        "reads", "first_try_reads", "read_attempts",
        "ns_add", "sp_add", "ns_rem", "sp_rem", "replacements",
        "lock_wait", "lock_retries", "search",
    )

    def __init__(self):
        self.reads = 0
        self.first_try_reads = 0
        self.read_attempts = 0
        self.ns_add = 0
        self.sp_add = 0
        self.ns_rem = 0
        self.sp_rem = 0
        self.replacements = 0
        self.lock_wait = 0.0
        self.lock_retries = 0
        self.search = SearchStats()


class DynamicConnectivity:
    """Undirected graph on vertices ``0..n-1`` with linearizable queries.

    ``samples`` is the per-level random sampling budget tried before the full
    replacement scan (0 disables sampling).
    """

    def __init__(
        self,
        n: int,
        variant: str = "full",
        samples: int = DEFAULT_SAMPLES,
        seed: int = 0,
        kernel: Optional[Kernel] = None,
        mutations=(),
    ):
        if n < 1:
            raise ValueError("vertex count must be at least 1")
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        self.n = n
        self.variant = variant
        self.K = K = kernel if kernel is not None else get_kernel()
        self.states = K.StateMap()
        self.levels = LevelForest(n, self.states, K, seed, samples)
        self.F0 = self.levels.F[0]
        self._vn = self.F0.vnode
        self._root_of = K.root_of
        self._kconnected = K.connected
        self._global = threading.Lock()
        self._local = threading.local()
        self._stats_all: List[ThreadStats] = []
        self._stats_guard = threading.Lock()
        self.hooks: Dict[str, Callable[[str], None]] = {}
        self.levels.hook = self._fire
        for f in self.levels.F:
            f.mutations = set(mutations)
        if variant == "full":
            self.add_edge = self._add_full
            self.remove_edge = self._remove_full
        else:
            self.add_edge = self._add_locked
            self.remove_edge = self._remove_locked
        if variant == "fine":
            self.connected = self._connected_locked

    # -- plumbing ------------------------------------------------------------

    def _stats(self) -> ThreadStats:
        try:
            return self._local.s
        except AttributeError:
            s = self._local.s = ThreadStats()
            with self._stats_guard:
                self._stats_all.append(s)
            return s

    def _fire(self, name: str) -> None:
        fn = self.hooks.get(name)
        if fn is not None:
            fn(name)

    def _edge(self, u: int, v: int) -> int:
        n = self.n
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"vertex out of range: ({u}, {v}) with n = {n}")
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) is not allowed")
        return u * n + v if u < v else v * n + u

    def _lock(self, u: int, v: int) -> Tuple:
        """Acquire the locks of ``u``'s and ``v``'s current components."""
        st = self._stats()
        if self.variant == "coarse":
            t0 = _perf()
            self._global.acquire()
            st.lock_wait += _perf() - t0
            return (self._global,)
        vn = self._vn
        root_of = self._root_of
        x, y = vn[u], vn[v]
        while True:
            xu = root_of(x)
            yv = root_of(y)
            # Always take locks in node-id order.
            if xu.nid > yv.nid:
                first, second = yv, xu
            else:
                first, second = xu, yv
            t0 = _perf()
            first.lock.acquire()
            if second is not first:
                second.lock.acquire()
            st.lock_wait += _perf() - t0
            if (xu.parent is None and yv.parent is None
                    and root_of(x) is xu and root_of(y) is yv):
                return (first.lock,) if second is first else (first.lock, second.lock)
            if second is not first:
                second.lock.release()
            first.lock.release()
            st.lock_retries += 1

    @staticmethod
    def _unlock(locks: Tuple) -> None:
        for lk in reversed(locks):
            lk.release()

    # -- queries -------------------------------------------------------------

    def connected(self, u: int, v: int) -> bool:
        n = self.n
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"vertex out of range: ({u}, {v}) with n = {n}")
        if u == v:
            return True
        ans, attempts = self._kconnected(self._vn[u], self._vn[v])
        st = self._stats()
        st.reads += 1
        st.read_attempts += attempts
        if attempts == 1:
            st.first_try_reads += 1
        return ans

    def _connected_locked(self, u: int, v: int) -> bool:
        n = self.n
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"vertex out of range: ({u}, {v}) with n = {n}")
        if u == v:
            return True
        locks = self._lock(u, v)
        try:
            ans = self._root_of(self._vn[u]) is self._root_of(self._vn[v])
        finally:
            self._unlock(locks)
        st = self._stats()
        st.reads += 1
        st.read_attempts += 1
        st.first_try_reads += 1
        return ans

    # -- lock-based updates (coarse, fine, nb-reads) -------------------------

    def _add_locked(self, u: int, v: int) -> None:
        e = self._edge(u, v)
        locks = self._lock(u, v)
        try:
            if self.states.get(e) is not None:
                return
            st = self._stats()
            if self._root_of(self._vn[u]) is not self._root_of(self._vn[v]):
                self.states.put_if_absent(e, EdgeState(SPANNING, 0))
                self.levels.insert_spanning(u, v)
                st.sp_add += 1
            else:
                self.F0.add_info(e)
                self.states.put_if_absent(e, EdgeState(NON_SPANNING, 0))
                st.ns_add += 1
        finally:
            self._unlock(locks)

    def _remove_locked(self, u: int, v: int) -> None:
        e = self._edge(u, v)
        locks = self._lock(u, v)
        try:
            s = self.states.get(e)
            if s is None:
                return
            st = self._stats()
            if s.status == NON_SPANNING:
                self.states.cas(e, s, None)
                self.levels.F[s.level].remove_info(e)
                st.ns_rem += 1
            else:
                f = self.levels.remove_spanning(e, s.level, st.search, publish=False)
                self.states.cas(e, s, None)
                st.sp_rem += 1
                if f is not None:
                    st.replacements += 1
        finally:
            self._unlock(locks)

    # -- full protocol -------------------------------------------------------

    def _add_full(self, u: int, v: int) -> None:
        e = self._edge(u, v)
        states = self.states
        init = EdgeState.initial()
        prev = states.put_if_absent(e, init)
        if prev is not None:
            if prev.status != INITIAL:
                return
            init = prev
        failures = 0
        while True:
            s = states.get(e)
            if s is not init:
                if s is not None and s.status == IN_PROGRESS:
                    self._unlock(self._lock(u, v))
                return
            if self.F0.connected(u, v):
                if self._try_add_non_spanning(e, u, v, init):
                    return
                failures += 1
                _backoff(failures)
            else:
                self._blocking_add(e, u, v, init)
                return

    def _try_add_non_spanning(self, e: int, u: int, v: int, init) -> bool:
        F0 = self.F0
        states = self.states
        hooks = self.hooks
        F0.add_info(e)
        if hooks:
            self._fire("after_add_info")
        op = self._root_of(self._vn[u]).removal_op
        if hooks:
            self._fire("after_read_op")
        if op is not None and op.can_be_replacement(e):
            if propose_replacement(states, op, e, init):
                if hooks:
                    self._fire("after_propose")
                F0.remove_info(e)
                states.cas(e, init, EdgeState(SPANNING, 0))
                self._stats().ns_add += 1
                return True
            if op.slot.get() is CLOSED:
                F0.remove_info(e)
                if hooks:
                    self._fire("before_blocking_add")
                self._blocking_add(e, u, v, init)
                return True
        if F0.connected(u, v) and states.cas(e, init, EdgeState(NON_SPANNING, 0)):
            self._stats().ns_add += 1
            return True
        F0.remove_info(e)
        return False

    def _blocking_add(self, e: int, u: int, v: int, init) -> None:
        states = self.states
        locks = self._lock(u, v)
        try:
            if states.get(e) is not init:
                return
            st = self._stats()
            if self._root_of(self._vn[u]) is not self._root_of(self._vn[v]):
                ip = EdgeState(IN_PROGRESS, 0)
                if not states.cas(e, init, ip):
                    return
                self.levels.insert_spanning(u, v)
                states.cas(e, ip, EdgeState(SPANNING, 0))
                st.sp_add += 1
            else:
                self.F0.add_info(e)
                if states.cas(e, init, EdgeState(NON_SPANNING, 0)):
                    st.ns_add += 1
                else:
                    self.F0.remove_info(e)
        finally:
            self._unlock(locks)

    def _remove_full(self, u: int, v: int) -> None:
        e = self._edge(u, v)
        states = self.states
        failures = 0
        while True:
            s = states.get(e)
            if s is None or s.status == INITIAL:
                return
            if s.status == SPANNING or s.status == IN_PROGRESS:
                self._blocking_remove(e, u, v)
                return
            if self._try_remove_non_spanning(e, s):
                return
            failures += 1
            _backoff(failures)

    def _try_remove_non_spanning(self, e: int, s) -> bool:
        if self.states.cas(e, s, None):
            self.levels.F[s.level].remove_info(e)
            self._stats().ns_rem += 1
            return True
        return False

    def _blocking_remove(self, e: int, u: int, v: int) -> None:
        states = self.states
        locks = self._lock(u, v)
        try:
            s = states.get(e)
            if s is None or s.status == INITIAL:
                return
            if s.status == NON_SPANNING:
                self._try_remove_non_spanning(e, s)
                return
            st = self._stats()
            f = self.levels.remove_spanning(e, s.level, st.search, publish=True)
            states.cas(e, s, None)
            st.sp_rem += 1
            if f is not None:
                st.replacements += 1
        finally:
            self._unlock(locks)

    # -- inspection ----------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        s = self.states.get(self._edge(u, v))
        return s is not None and s.status in (SPANNING, NON_SPANNING)

    def edge_state(self, u: int, v: int) -> Optional[EdgeState]:
        return self.states.get(self._edge(u, v))

    def edges(self) -> List[Tuple[int, int]]:
        n = self.n
        return sorted(divmod(e, n) for e, s in self.states.items()
                      if s.status in (SPANNING, NON_SPANNING))

    def stats(self) -> Dict[str, float]:
        """Sum of all threads' counters."""
        out: Dict[str, float] = {k: 0 for k in ThreadStats.__slots__ if k != "search"}
        for k in SearchStats.__slots__:
            out[k] = 0
        with self._stats_guard:
            all_stats = list(self._stats_all)
        for s in all_stats:
            for k in ThreadStats.__slots__:
                if k != "search":
                    out[k] += getattr(s, k)
            for k in SearchStats.__slots__:
                out[k] += getattr(s.search, k)
        return out

    def reset_stats(self) -> None:
        with self._stats_guard:
            all_stats = list(self._stats_all)
        for s in all_stats:
            fresh = ThreadStats()
            for k in ThreadStats.__slots__:
                setattr(s, k, getattr(fresh, k))
