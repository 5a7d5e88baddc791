"""Single-writer, multi-reader Euler tour forest over treaps.

Each vertex owns one designated node; each tree edge owns two arc nodes, one
per direction. A tour is a linear treap sequence; rotating it re-roots the
tree. Every merge and split is published to readers by one parent-link store,
and all intermediate pieces of a restructuring stay hung below the surviving
root so that readers never observe a component that does not exist.

Mutating methods assume the caller holds the component's writer role.
"""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass
from typing import Callable, List, Optional

from ._kernel import Kernel, get_kernel


class InvariantError(AssertionError):
    """Raised by debug checks when a structural invariant is violated."""


@dataclass
class CutHandle:
    """State of a spanning-edge removal between preparation and commit.

    ``root`` is the pre-split root; ``left_top`` and ``right_top`` are the
    tops of the two prepared pieces (one of them is ``root``).
    """

    root: object
    left_top: object
    right_top: object
    u: int
    v: int


class EulerTourForest:
    """One level of the forest structure: a set of Euler tours over ``n`` vertices.

    ``lazy`` defers creation of vertex nodes until first use, which is only
    safe for levels touched exclusively by lock holders.
    """

    def __init__(
        self,
        n: int,
        rng: Optional[random.Random] = None,
        ids: Optional[itertools.count] = None,
        kernel: Optional[Kernel] = None,
        lazy: bool = False,
        with_locks: bool = False,
        level: int = 0,
    ):
        if n < 1:
            raise ValueError("vertex count must be at least 1")
        self.n = n
        self.level = level
        self.K = K = kernel if kernel is not None else get_kernel()
        self._rng = rng if rng is not None else random.Random(0)
        self._ids = ids if ids is not None else itertools.count()
        self._with_locks = with_locks
        self.arcs = {}
        self.mutations = set()
        self.check_versions = False
        self.trace: Optional[Callable] = None
        if lazy:
            self.vnode: List = [None] * n
        else:
            self.vnode = [self._make_vertex(v) for v in range(n)]
        self._find_root = K.find_root
        self._root_of = K.root_of
        self._connected = K.connected
        self._split_before = K.split_before
        self._split_after = K.split_after
        self._join = K.join
        self._position = K.position
        self._set_flags_up = K.set_flags_up

    # -- node management -----------------------------------------------------

    def _make_vertex(self, v: int):
        K = self.K
        node = K.Node(self._rng.getrandbits(64), next(self._ids), v)
        node.edges = K.ConcurrentMultiset()
        if self._with_locks:
            node.lock = threading.Lock()
        return node

    def node(self, v: int):
        """Designated node of ``v`` (created on demand for lazy levels)."""
        x = self.vnode[v]
        if x is None:
            x = self.vnode[v] = self._make_vertex(v)
        return x

    def _make_arc(self, a: int, b: int):
        return self.K.Node(self._rng.getrandbits(64), next(self._ids), -1, (a, b))

    # -- reader side ---------------------------------------------------------

    def find_root(self, v: int):
        return self._find_root(self.node(v))

    def root(self, v: int):
        return self._root_of(self.node(v))

    def connected(self, u: int, v: int) -> bool:
        if u == v:
            return True
        return self._connected(self.node(u), self.node(v))[0]

    def connected_ex(self, u: int, v: int):
        """``(answer, attempts)``; attempts counts retries of the check loop."""
        if u == v:
            return True, 1
        return self._connected(self.node(u), self.node(v))

    def size_of(self, v: int) -> int:
        """Number of vertices in ``v``'s tree (writer-side)."""
        x = self.vnode[v]
        return 1 if x is None else self._root_of(x).size

    def has_tree_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    # -- writer side ---------------------------------------------------------

    def bump(self, r) -> None:
        """Advance ``r``'s version; must precede every structural change."""
        if "skip_version_bump" in self.mutations:
            return
        r.version += 1
        if self.trace is not None:
            self.trace("bump", r)

    def _splice(self, x, y, a_xy, a_yx, anchor):
        """Join the tours of ``x`` and ``y`` through the arc pair; returns the top."""
        split_after, split_before, join = self._split_after, self._split_before, self._join
        p1, p2 = split_after(x, anchor)
        q1, q2 = split_before(y, anchor)
        t = join(p1, a_xy, anchor)
        t = join(t, q2, anchor)
        t = join(t, q1, anchor)
        t = join(t, a_yx, anchor)
        return join(t, p2, anchor)

    def _new_arcs(self, u: int, v: int, span: bool):
        a_uv = self._make_arc(u, v)
        a_vu = self._make_arc(v, u)
        lo_end = a_uv if u < v else a_vu
        if span:
            lo_end.span_here = True
            lo_end.sp = True
        self.arcs[(u, v)] = a_uv
        self.arcs[(v, u)] = a_vu
        return a_uv, a_vu

    def link(self, u: int, v: int, span: bool = False) -> None:
        """Merge the trees of ``u`` and ``v`` with tree edge ``(u, v)``.

        ``span`` marks the edge as belonging to this level exactly.
        """
        x = self.node(u)
        y = self.node(v)
        ru = self._root_of(x)
        rv = self._root_of(y)
        if ru is rv:
            raise InvariantError(f"link({u}, {v}): endpoints already connected")
        before = (ru.version, rv.version)
        self.bump(ru)
        self.bump(rv)
        if self.K.higher(ru, rv):
            hi, lo = ru, rv
        else:
            hi, lo = rv, ru
        # Logical merge: readers from lo's tree now reach hi.
        lo.parent = hi
        if self.trace is not None:
            self.trace("merge", lo)
        a_uv, a_vu = self._new_arcs(u, v, span)
        top = self._splice(x, y, a_uv, a_vu, hi)
        if top is not hi:
            raise InvariantError("merged tree top is not the higher root")
        if self.check_versions and (ru.version <= before[0] or rv.version <= before[1]):
            raise InvariantError(f"link({u}, {v}) did not advance the root version")

    def prepare_cut(self, u: int, v: int) -> CutHandle:
        """Restructure around tree edge ``(u, v)`` without splitting logically.

        Afterwards the tour is two pieces, both still reachable from the old
        root. The arc nodes are retired; they keep pointing into the tree so a
        reader standing on one still terminates.
        """
        a1 = self.arcs.pop((u, v), None)
        a2 = self.arcs.pop((v, u), None)
        if a1 is None or a2 is None:
            raise InvariantError(f"cut({u}, {v}): not a tree edge of this level")
        R = self._root_of(self.vnode[u])
        before = R.version
        self.bump(R)
        if self.check_versions and R.version <= before:
            raise InvariantError(f"cut({u}, {v}) did not advance the root version")
        if self._position(a1) > self._position(a2):
            a1, a2 = a2, a1
        split_before, split_after, join = self._split_before, self._split_after, self._join
        left, rest = split_before(a1, R)
        _, rest = split_after(a1, R)
        mid, rest = split_before(a2, R)
        _, right = split_after(a2, R)
        outer = join(left, right, R)
        return CutHandle(R, outer, mid, u, v)

    def commit_cut(self, h: CutHandle) -> None:
        """Detach the piece that does not hold the old root: the logical split."""
        lo = h.right_top if h.left_top is h.root else h.left_top
        self.bump(lo)
        lo.parent = None
        if self.trace is not None:
            self.trace("split", lo)

    def commit_replace(self, h: CutHandle, x: int, y: int, span: bool = False) -> None:
        """Reconnect the prepared pieces through edge ``(x, y)``; no logical change."""
        a_xy, a_yx = self._new_arcs(x, y, span)
        top = self._splice(self.node(x), self.node(y), a_xy, a_yx, h.root)
        if top is not h.root:
            raise InvariantError("replacement splice changed the root")

    def cut(self, u: int, v: int) -> None:
        self.commit_cut(self.prepare_cut(u, v))

    # -- span marks ----------------------------------------------------------

    def set_span(self, u: int, v: int, value: bool) -> None:
        """Mark or unmark tree edge ``(u, v)`` as belonging to exactly this level."""
        a = self.arcs[(min(u, v), max(u, v))]
        a.span_here = value
        self.K.pull_up(a)

    def span_edges(self, top) -> List:
        """Tree edges of exactly this level inside ``top``'s piece, as ``(a, b)``."""
        out = []
        stack = [top]
        while stack:
            x = stack.pop()
            if x is None or not x.sp:
                continue
            if x.span_here:
                out.append(x.arc)
            stack.append(x.left)
            stack.append(x.right)
        return out

    # -- non-spanning edge info ---------------------------------------------

    def add_info(self, e: int) -> None:
        """Store edge ``e`` at both endpoints and raise flags toward the roots."""
        u, v = divmod(e, self.n)
        x = self.node(u)
        x.edges.add(e)
        self._set_flags_up(x)
        y = self.node(v)
        y.edges.add(e)
        self._set_flags_up(y)

    def remove_info(self, e: int) -> None:
        """Drop one stored copy of ``e`` at each endpoint; flags are left alone."""
        u, v = divmod(e, self.n)
        ok_u = self.vnode[u].edges.remove_one(e)
        ok_v = self.vnode[v].edges.remove_one(e)
        if not (ok_u and ok_v):
            raise InvariantError(f"remove_info: no stored copy of edge {divmod(e, self.n)}")

    def info_count(self, e: int) -> int:
        u, v = divmod(e, self.n)
        x = self.vnode[u]
        return 0 if x is None else x.edges.count(e)

    # -- inspection ----------------------------------------------------------

    def tour(self, v: int) -> List:
        """In-order node sequence of ``v``'s tree (quiescent use only)."""
        return list(self.K.inorder(self.root(v)))

    def tour_labels(self, v: int) -> List:
        """Tour as labels: vertex ids for vertex nodes, ``(a, b)`` for arcs."""
        return [x.vertex if x.vertex >= 0 else x.arc for x in self.tour(v)]

    def nodes(self):
        for x in self.vnode:
            if x is not None:
                yield x
        yield from self.arcs.values()
