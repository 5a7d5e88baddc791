"""Level structure: nested forests F_0 ⊇ F_1 ⊇ ... and replacement search.

F_0 is shared with lock-free readers and adders. F_1 and above are touched
only by lock holders; lock-free removers merely drop multiset copies there.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, List, Optional

from ._kernel import Kernel, get_kernel
from .ett import EulerTourForest, InvariantError
from .states import (
    INITIAL,
    NON_SPANNING,
    SPANNING,
    EdgeState,
    RemovalOp,
    finalize_replacement_search,
    propose_replacement,
)

DEFAULT_SAMPLES = 16


def max_level(n: int) -> int:
    return max(n, 1).bit_length() - 1


class SearchStats:
    """Writer-side counters for one thread."""

    __slots__ = ("examined", "promotions", "tree_promotions", "sampled_hits", "scan_hits")

    def __init__(self):
        self.examined = 0
        self.promotions = 0
        self.tree_promotions = 0
        self.sampled_hits = 0
        self.scan_hits = 0


class LevelForest:
    """Forests for levels ``0..max_level(n)`` plus replacement search.

    ``states`` is the shared edge-state map; edges are encoded as
    ``u * n + v`` with ``u < v``.
    """

    def __init__(self, n: int, states, kernel: Optional[Kernel] = None, seed: int = 0,
                 samples: int = DEFAULT_SAMPLES):
        self.n = n
        self.K = K = kernel if kernel is not None else get_kernel()
        self.lmax = max_level(n)
        self.states = states
        self.samples = samples
        self._rng = random.Random(seed)
        ids = itertools.count()
        self.F: List[EulerTourForest] = [
            EulerTourForest(n, self._rng, ids, K, lazy=i > 0, with_locks=i == 0, level=i)
            for i in range(self.lmax + 1)
        ]
        self.hook: Optional[Callable[[str], None]] = None

    # -- spanning insertion ---------------------------------------------------

    def insert_spanning(self, u: int, v: int) -> None:
        self.F[0].link(u, v, span=True)

    # -- spanning removal -----------------------------------------------------

    def remove_spanning(self, e: int, level: int, stats: SearchStats,
                        publish: bool = True) -> Optional[int]:
        """Remove tree edge ``e`` of ``level``; return its replacement or None.

        The caller holds the component lock. The edge's state entry is left
        for the caller to delete.
        """
        n = self.n
        u, v = divmod(e, n)
        F = self.F
        h = F[0].prepare_cut(u, v)
        for i in range(level, 0, -1):
            F[i].cut(u, v)
        for i in range(level, 0, -1):
            f = self._search_upper(i, u, v, stats)
            if f is not None:
                x, y = divmod(f, n)
                for j in range(1, i + 1):
                    F[j].link(x, y, span=j == i)
                F[0].commit_replace(h, x, y)
                return f
        return self._search_level0(h, u, v, stats, publish)

    def _smaller(self, a_top, b_top, a_has_min: bool):
        if a_top.size < b_top.size or (a_top.size == b_top.size and a_has_min):
            return a_top, b_top
        return b_top, a_top

    def _promote_tree_edges(self, i: int, top, stats: SearchStats) -> None:
        """Move every level-``i`` tree edge inside ``top``'s piece up one level."""
        if i >= self.lmax:
            return
        Fi, Fn = self.F[i], self.F[i + 1]
        states, n = self.states, self.n
        for (a, b) in Fi.span_edges(top):
            e = a * n + b
            st = states.get(e)
            if st is None or st.status != SPANNING or st.level != i:
                raise InvariantError(f"tree edge {(a, b)} has state {st} at level {i}")
            if not states.cas(e, st, EdgeState(SPANNING, i + 1)):
                raise InvariantError(f"tree edge {(a, b)} changed state under the lock")
            Fi.set_span(a, b, False)
            Fn.link(a, b, span=True)
            stats.tree_promotions += 1

    def _promote_non_tree(self, i: int, e: int, st, stats: SearchStats) -> None:
        """Optimistic move of a non-spanning edge from level ``i`` to ``i + 1``."""
        if i >= self.lmax:
            return
        upper = self.F[i + 1]
        upper.add_info(e)
        if self.states.cas(e, st, EdgeState(NON_SPANNING, i + 1)):
            self.F[i].remove_info(e)
            stats.promotions += 1
        else:
            upper.remove_info(e)

    def _pick_random_edge(self, top):
        K = self.K
        vx = K.select_vertex(top, self._rng.randrange(top.size))
        ms = vx.edges
        if ms is None:
            return None
        items = list(ms)
        if not items:
            return None
        return items[self._rng.randrange(len(items))]

    # -- levels >= 1 (lock holder only) ---------------------------------------

    def _search_upper(self, i: int, u: int, v: int, stats: SearchStats) -> Optional[int]:
        Fi = self.F[i]
        root_of = self.K.root_of
        ru = root_of(Fi.node(u))
        rv = root_of(Fi.node(v))
        a_top, _ = self._smaller(ru, rv, u < v)
        n = self.n
        states = self.states
        nodes = Fi.vnode

        def candidate(e: int, st) -> bool:
            x, y = divmod(e, n)
            return (root_of(nodes[x]) is a_top) != (root_of(nodes[y]) is a_top)

        def take(e: int, st) -> bool:
            if states.cas(e, st, EdgeState(SPANNING, i)):
                Fi.remove_info(e)
                return True
            return False

        for _ in range(self.samples if self.samples else 0):
            e = self._pick_random_edge(a_top)
            if e is None:
                continue
            stats.examined += 1
            st = states.get(e)
            if st is not None and st.status == NON_SPANNING and st.level == i and candidate(e, st):
                if take(e, st):
                    stats.sampled_hits += 1
                    return e

        self._promote_tree_edges(i, a_top, stats)

        recalc = self.K.recalculate_flags
        found: List[int] = []

        def scan(node) -> bool:
            if node is None or not node.nsp:
                return False
            hit = False
            ms = node.edges
            if ms is not None:
                for e in ms:
                    stats.examined += 1
                    st = states.get(e)
                    if st is None or st.status != NON_SPANNING or st.level != i:
                        continue
                    if candidate(e, st):
                        if take(e, st):
                            found.append(e)
                            hit = True
                            break
                    else:
                        self._promote_non_tree(i, e, st, stats)
            if not hit:
                hit = scan(node.left)
            if not hit:
                hit = scan(node.right)
            recalc(node)
            return hit

        if scan(a_top):
            stats.scan_hits += 1
            return found[0]
        return None

    # -- level 0 (shared with lock-free adders) -------------------------------

    def _search_level0(self, h, u: int, v: int, stats: SearchStats, publish: bool) -> Optional[int]:
        F0 = self.F[0]
        K = self.K
        n = self.n
        states = self.states
        R = h.root
        a_has_min = K.piece_root(F0.vnode[min(u, v)]) is h.left_top
        a_top, b_top = self._smaller(h.left_top, h.right_top, a_has_min)
        op = RemovalOp(u, v, a_top, b_top, K.AtomicRef(None), K.piece_root, F0.vnode, n)
        if self.hook is not None:
            self.hook("before_publish")
        if publish:
            R.removal_op = op
        if self.hook is not None:
            self.hook("after_publish")
        found = False

        def try_candidate(e: int, st) -> bool:
            """Returns True when the search can stop (slot is taken)."""
            sp = EdgeState(SPANNING, 0)
            if states.cas(e, st, sp):
                if propose_replacement(states, op, e, sp):
                    F0.remove_info(e)
                else:
                    states.cas(e, sp, st)
                return True
            return False

        for _ in range(self.samples if self.samples else 0):
            e = self._pick_random_edge(a_top)
            if e is None:
                continue
            stats.examined += 1
            st = states.get(e)
            if (st is not None and st.status == NON_SPANNING and st.level == 0
                    and op.can_be_replacement(e)):
                if try_candidate(e, st):
                    stats.sampled_hits += 1
                    found = True
                    break

        if not found:
            self._promote_tree_edges(0, a_top, stats)
            recalc = K.recalculate_flags
            can_be_replacement = op.can_be_replacement
            root_of = K.root_of
            vnode = F0.vnode

            def scan(node) -> bool:
                if node is None or not node.nsp:
                    return False
                hit = False
                ms = node.edges
                for e in (ms if ms is not None else ()):
                    stats.examined += 1
                    st = states.get(e)
                    if st is None or st.level != 0:
                        continue
                    if st.status == INITIAL:
                        # Help a lock-free addition finish.
                        if can_be_replacement(e) and propose_replacement(states, op, e, st):
                            if states.cas(e, st, EdgeState(SPANNING, 0)):
                                hit = True
                                break
                        x, y = divmod(e, n)
                        if root_of(vnode[x]) is root_of(vnode[y]):
                            F0.add_info(e)
                            if not states.cas(e, st, EdgeState(NON_SPANNING, 0)):
                                F0.remove_info(e)
                        st = states.get(e)
                        if st is None or st.level != 0:
                            continue
                    if st.status != NON_SPANNING:
                        continue
                    if can_be_replacement(e):
                        if try_candidate(e, st):
                            hit = True
                            break
                    else:
                        self._promote_non_tree(0, e, st, stats)
                if not hit:
                    hit = scan(node.left)
                if not hit:
                    hit = scan(node.right)
                recalc(node)
                return hit

            if scan(a_top):
                stats.scan_hits += 1

        f = finalize_replacement_search(states, op)
        if self.hook is not None:
            self.hook("after_finalize")
        if f is not None:
            x, y = divmod(f, n)
            F0.commit_replace(h, x, y, span=True)
        else:
            F0.commit_cut(h)
        if publish:
            R.removal_op = None
        return f
