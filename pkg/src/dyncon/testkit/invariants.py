"""Quiescent invariant sweeps over the forest levels and the edge-state map.

Every function returns a list of human-readable violations (empty when the
structure is sound). None of them may run concurrently with writers.
"""

from __future__ import annotations

from collections import Counter
from typing import Dict, List

from ..states import INITIAL, IN_PROGRESS, NON_SPANNING, SPANNING


def _reachable(forest):
    seen = set()
    out = []
    for x in forest.nodes():
        if id(x) not in seen:
            seen.add(id(x))
            out.append(x)
    return out


def check_acyclic(forest, limit: int = 1 << 22) -> List[str]:
    """Every parent chain terminates without revisiting a node."""
    errs = []
    for x in _reachable(forest):
        seen = set()
        cur = x
        steps = 0
        while cur is not None:
            if id(cur) in seen:
                errs.append(f"level {forest.level}: parent cycle through {cur!r}")
                break
            seen.add(id(cur))
            cur = cur.parent
            steps += 1
            if steps > limit:
                errs.append(f"level {forest.level}: parent chain too long from {x!r}")
                break
    return errs


def check_treaps(forest) -> List[str]:
    """Child/parent agreement, heap order and aggregates for every tree."""
    K = forest.K
    errs = []
    roots = {}
    for x in _reachable(forest):
        r = K.root_of(x)
        roots[id(r)] = r
    for r in roots.values():
        if r.parent is not None:
            errs.append(f"level {forest.level}: root {r!r} has a parent")
        if r.vertex < 0:
            errs.append(f"level {forest.level}: root {r!r} is an arc node")
        stack = [r]
        while stack:
            x = stack.pop()
            cnt, size, sp = 1, 1 if x.vertex >= 0 else 0, x.span_here
            for c in (x.left, x.right):
                if c is None:
                    continue
                if c.parent is not x:
                    errs.append(f"level {forest.level}: child {c!r} of {x!r} points to {c.parent!r}")
                if K.higher(c, x):
                    errs.append(f"level {forest.level}: heap order broken at {x!r} > {c!r}")
                cnt += c.cnt
                size += c.size
                sp = sp or c.sp
                stack.append(c)
            if (cnt, size, bool(sp)) != (x.cnt, x.size, bool(x.sp)):
                errs.append(
                    f"level {forest.level}: aggregates of {x!r} are "
                    f"{(x.cnt, x.size, x.sp)}, expected {(cnt, size, sp)}"
                )
    return errs


def check_tours(forest) -> List[str]:
    """Each tree's in-order sequence is a closed walk using each tree edge twice."""
    K = forest.K
    errs = []
    seen_roots = set()
    arcs_seen = set()
    for v, x in enumerate(forest.vnode):
        if x is None:
            continue
        r = K.root_of(x)
        if id(r) in seen_roots:
            continue
        seen_roots.add(id(r))
        seq = list(K.inorder(r))
        first = seq[0]
        start = first.vertex if first.vertex >= 0 else first.arc[0]
        at = start
        for node in seq:
            if node.vertex >= 0:
                if node.vertex != at:
                    errs.append(f"level {forest.level}: vertex {node.vertex} met while walk is at {at}")
            else:
                a, b = node.arc
                if a != at:
                    errs.append(f"level {forest.level}: arc {node.arc} leaves {a} while walk is at {at}")
                at = b
                if forest.arcs.get((a, b)) is not node:
                    errs.append(f"level {forest.level}: stray arc node {node.arc}")
                arcs_seen.add((a, b))
        if at != start:
            errs.append(f"level {forest.level}: tour starting at {start} ends at {at}")
    if arcs_seen != set(forest.arcs):
        missing = set(forest.arcs) - arcs_seen
        errs.append(f"level {forest.level}: registered arcs missing from tours: {sorted(missing)[:5]}")
    return errs


def check_flags(forest) -> List[str]:
    """A cleared non-spanning flag means an empty subtree (flag soundness)."""
    K = forest.K
    errs = []
    roots = {}
    for x in _reachable(forest):
        r = K.root_of(x)
        roots[id(r)] = r
    for r in roots.values():
        def has_edges(x) -> bool:
            if x is None:
                return False
            below = has_edges(x.left) | has_edges(x.right)
            own = x.edges is not None and x.edges.nonempty()
            if (own or below) and not x.nsp:
                errs.append(f"level {forest.level}: {x!r} has stored edges below but flag is false")
            return own or below
        has_edges(r)
    return errs


def check_levels(dc) -> List[str]:
    """Nesting, span marks, stored-copy audit, maximality and size bounds."""
    lf = dc.levels
    n = lf.n
    errs: List[str] = []
    tree_edges = [set() for _ in lf.F]
    for i, F in enumerate(lf.F):
        for (a, b) in F.arcs:
            if a < b:
                tree_edges[i].add(a * n + b)
    spanning = {}
    nonspanning = {}
    for e, s in dc.states.items():
        if s.status == SPANNING:
            spanning[e] = s.level
        elif s.status == NON_SPANNING:
            nonspanning[e] = s.level
        elif s.status in (INITIAL, IN_PROGRESS):
            errs.append(f"edge {divmod(e, n)} left in transient status {s!r}")
    for i in range(len(lf.F)):
        expect = {e for e, lvl in spanning.items() if lvl >= i}
        if tree_edges[i] != expect:
            extra = sorted(divmod(e, n) for e in tree_edges[i] - expect)[:5]
            missing = sorted(divmod(e, n) for e in expect - tree_edges[i])[:5]
            errs.append(f"level {i}: tree edges differ; extra {extra} missing {missing}")
        if i + 1 < len(lf.F) and not tree_edges[i + 1] <= tree_edges[i]:
            errs.append(f"level {i + 1} forest is not nested in level {i}")
    for e, lvl in spanning.items():
        a, b = divmod(e, n)
        for i in range(lvl + 1):
            arc = lf.F[i].arcs.get((a, b))
            if arc is not None and arc.span_here != (i == lvl):
                errs.append(f"edge {(a, b)}: span mark wrong at level {i}")
    stored: Dict[int, Counter] = {}
    for i, F in enumerate(lf.F):
        c = Counter()
        for x in F.vnode:
            if x is not None and x.edges is not None:
                for e in x.edges:
                    c[(e, x.vertex)] += 1
        stored[i] = c
        for (e, vx), k in c.items():
            if nonspanning.get(e) != i:
                errs.append(f"level {i}: stale stored copy of edge {divmod(e, n)} at vertex {vx}")
    for e, lvl in nonspanning.items():
        a, b = divmod(e, n)
        F = lf.F[lvl]
        for vx in (a, b):
            if stored[lvl][(e, vx)] < 1:
                errs.append(f"non-spanning edge {(a, b)} has no stored copy at {vx} on level {lvl}")
        if F.vnode[a] is None or F.vnode[b] is None or F.root(a) is not F.root(b):
            errs.append(f"non-spanning edge {(a, b)} of level {lvl} spans two level-{lvl} trees")
    for i, F in enumerate(lf.F):
        seen = set()
        for x in F.vnode:
            if x is None:
                continue
            r = F.K.root_of(x)
            if id(r) in seen:
                continue
            seen.add(id(r))
            if r.size * (1 << i) > n:
                errs.append(f"level {i}: tree of size {r.size} exceeds n/2^{i} = {n / (1 << i):g}")
    return errs


def check_all(dc, tours: bool = True) -> List[str]:
    """Run every sweep on every level."""
    errs: List[str] = []
    for F in dc.levels.F:
        errs += check_acyclic(F)
        errs += check_treaps(F)
        if tours:
            errs += check_tours(F)
        errs += check_flags(F)
    errs += check_levels(dc)
    return errs


def partition(dc) -> Dict[int, int]:
    """Vertex -> representative id of its level-0 tree."""
    K = dc.K
    return {v: id(K.root_of(x)) for v, x in enumerate(dc.F0.vnode)}
