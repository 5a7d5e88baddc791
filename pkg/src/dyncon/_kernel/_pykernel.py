"""Pure-Python kernel: treap nodes, versioned root search, split/join, CAS cells.

This module and the compiled ``_ckernel`` expose the same names. Everything
above the kernel is written against that shared surface.

Atomicity: CPython offers no compare-and-swap on attributes, so every
conditional update here runs under one of a fixed set of striped locks. Plain
loads stay lock-free (attribute reads are atomic under the interpreter lock).
"""

from __future__ import annotations

import threading
from typing import Iterator, Optional

BACKEND = "python"

_STRIPES = tuple(threading.Lock() for _ in range(64))

# Test-only pause point called after every parent-link store in split/join.
_write_hook = None


def set_write_hook(fn) -> None:
    global _write_hook
    _write_hook = fn


def _stripe(obj) -> threading.Lock:
    return _STRIPES[(id(obj) >> 4) & 63]


class Node:
    """Cartesian-tree node of an Euler tour.

    ``key`` orders nodes for the heap property: vertex-designated nodes always
    outrank arc nodes, then the random priority decides, then ``nid``.
    """

    __slots__ = (
        "parent", "left", "right", "key", "priority", "nid", "vertex", "arc",
        "version", "cnt", "size", "nsp", "sp", "span_here", "edges",
        "removal_op", "lock",
    )

    def __init__(self, priority: int, nid: int, vertex: int = -1, arc=None):
        self.parent = None
        self.left = None
        self.right = None
        self.priority = priority
        self.nid = nid
        self.vertex = vertex
        self.arc = arc
        self.key = ((1 if vertex >= 0 else 0) << 128) | (priority << 64) | nid
        self.version = 0
        self.cnt = 1
        self.size = 1 if vertex >= 0 else 0
        self.nsp = False
        self.sp = False
        self.span_here = False
        self.edges = None
        self.removal_op = None
        self.lock = None

    def __repr__(self) -> str:
        if self.vertex >= 0:
            return f"Node(v={self.vertex}, nid={self.nid})"
        return f"Node(arc={self.arc}, nid={self.nid})"


def higher(a: Node, b: Node) -> bool:
    return a.key > b.key


# -- readers -----------------------------------------------------------------

def find_root(x: Node):
    """Follow parent links to the root; return ``(root, version)``.

    The version is loaded only after the absent parent was observed.
    """
    while True:
        p = x.parent
        if p is None:
            return x, x.version
        x = p


def root_of(x: Node) -> Node:
    while True:
        p = x.parent
        if p is None:
            return x
        x = p


def connected(a: Node, b: Node):
    """Linearizable same-tree check. Returns ``(answer, attempts)``."""
    if a is b:
        return True, 1
    attempts = 0
    while True:
        attempts += 1
        ur, uv = find_root(a)
        vr, vv = find_root(b)
        r, ver = find_root(a)
        if r is not ur or ver != uv:
            continue
        if ur is not vr:
            r, ver = find_root(b)
            if r is not vr or ver != vv:
                continue
            r, ver = find_root(a)
            if r is not ur or ver != uv:
                continue
        return ur is vr, attempts


def make_connected(find_root_fn, final_recheck: bool = True):
    """Build the same check over a custom root search (for scripted schedules).

    ``final_recheck=False`` drops the last re-verification of ``a``; that
    variant is known to be non-linearizable and exists only for tests.
    """

    def check(a, b):
        attempts = 0
        while True:
            attempts += 1
            ur, uv = find_root_fn(a)
            vr, vv = find_root_fn(b)
            if find_root_fn(a) != (ur, uv):
                continue
            if ur is not vr:
                if find_root_fn(b) != (vr, vv):
                    continue
                if final_recheck and find_root_fn(a) != (ur, uv):
                    continue
            return ur is vr, attempts

    return check


def piece_root(x: Node) -> Node:
    """Top of ``x``'s physical treap, stopping at a parent that does not own it."""
    while True:
        p = x.parent
        if p is None or (p.left is not x and p.right is not x):
            return x
        x = p


# -- writer-side treap maintenance -------------------------------------------

def _should_flag(x: Node) -> bool:
    e = x.edges
    if e is not None and e.nonempty():
        return True
    c = x.left
    if c is not None and c.nsp:
        return True
    c = x.right
    return c is not None and c.nsp


def recalculate_flags(x: Node) -> None:
    """Recompute ``nsp`` for a lock holder; repair a ``False`` that raced a raise."""
    flag = _should_flag(x)
    x.nsp = flag
    if not flag and _should_flag(x):
        x.nsp = True


def set_flags_up(x: Optional[Node]) -> None:
    while x is not None:
        if x.nsp:
            return
        x.nsp = True
        x = x.parent


def pull(x: Node) -> None:
    l = x.left
    r = x.right
    c = 1
    s = 1 if x.vertex >= 0 else 0
    sp = x.span_here
    if l is not None:
        c += l.cnt
        s += l.size
        sp = sp or l.sp
    if r is not None:
        c += r.cnt
        s += r.size
        sp = sp or r.sp
    x.cnt = c
    x.size = s
    x.sp = sp
    recalculate_flags(x)


def pull_up(x: Node) -> None:
    """Refresh aggregates from ``x`` to the top of its piece."""
    while True:
        pull(x)
        p = x.parent
        if p is None or (p.left is not x and p.right is not x):
            return
        x = p


def _split_up(cur: Node, left, right, anchor):
    while True:
        p = cur.parent
        if p is None or (p.left is not cur and p.right is not cur):
            break
        if p.left is cur:
            p.left = right
            if right is not None and right.parent is not p:
                right.parent = p
                if _write_hook is not None:
                    _write_hook(right)
            pull(p)
            right = p
        else:
            p.right = left
            if left is not None and left.parent is not p:
                left.parent = p
                if _write_hook is not None:
                    _write_hook(left)
            pull(p)
            left = p
        cur = p
    for t in (left, right):
        if t is not None and t is not anchor and t.parent is not anchor:
            t.parent = anchor
            if _write_hook is not None:
                _write_hook(t)
    return left, right


def split_before(x: Node, anchor):
    """Split ``x``'s piece into ``(before x, x and after)``.

    Neither half is ever given a null parent: both tops are re-pointed at
    ``anchor`` (the component's surviving root) unless they are the anchor.
    """
    left = x.left
    x.left = None
    pull(x)
    return _split_up(x, left, x, anchor)


def split_after(x: Node, anchor):
    right = x.right
    x.right = None
    pull(x)
    return _split_up(x, x, right, anchor)


def join(a, b, anchor):
    """Concatenate pieces ``a`` then ``b``; the result's top hangs from ``anchor``."""
    if a is None:
        return b
    if b is None:
        return a
    if a.key > b.key:
        root = parent = a
        a = a.right
        right_side = True
    else:
        root = parent = b
        b = b.left
        right_side = False
    path = [parent]
    while a is not None and b is not None:
        if a.key > b.key:
            nxt = a
            a = a.right
            down_right = True
        else:
            nxt = b
            b = b.left
            down_right = False
        if right_side:
            parent.right = nxt
        else:
            parent.left = nxt
        if nxt.parent is not parent:
            nxt.parent = parent
            if _write_hook is not None:
                _write_hook(nxt)
        parent = nxt
        right_side = down_right
        path.append(nxt)
    tail = a if a is not None else b
    if right_side:
        parent.right = tail
    else:
        parent.left = tail
    if tail is not None and tail.parent is not parent:
        tail.parent = parent
        if _write_hook is not None:
            _write_hook(tail)
    for node in reversed(path):
        pull(node)
    if root is not anchor and root.parent is not anchor:
        root.parent = anchor
        if _write_hook is not None:
            _write_hook(root)
    return root


def position(x: Node) -> int:
    """In-order index of ``x`` within its piece."""
    pos = x.left.cnt if x.left is not None else 0
    while True:
        p = x.parent
        if p is None or (p.left is not x and p.right is not x):
            return pos
        if p.right is x:
            pos += 1 + (p.left.cnt if p.left is not None else 0)
        x = p


def select_vertex(root: Node, k: int) -> Node:
    """The ``k``-th vertex-designated node (0-based) in in-order of ``root``'s piece."""
    x = root
    while True:
        l = x.left
        ls = l.size if l is not None else 0
        if k < ls:
            x = l
            continue
        k -= ls
        if x.vertex >= 0:
            if k == 0:
                return x
            k -= 1
        x = x.right


def inorder(root) -> Iterator[Node]:
    stack = []
    x = root
    while stack or x is not None:
        while x is not None:
            stack.append(x)
            x = x.left
        x = stack.pop()
        yield x
        x = x.right


# -- atomic cells ------------------------------------------------------------

class AtomicRef:
    """Reference cell with identity compare-and-swap."""

    __slots__ = ("value",)

    def __init__(self, value=None):
        self.value = value

    def get(self):
        return self.value

    def set(self, value) -> None:
        with _stripe(self):
            self.value = value

    def cas(self, expected, new) -> bool:
        with _stripe(self):
            if self.value is expected:
                self.value = new
                return True
            return False


class StateMap:
    """Concurrent ``Edge -> state`` map; transitions compare states by identity.

    Absence of a key encodes the removed status. ``recorder`` (if set) is
    called as ``recorder(edge, old, new)`` after each successful transition.
    """

    __slots__ = ("_d", "recorder")

    def __init__(self):
        self._d = {}
        self.recorder = None

    def get(self, edge):
        return self._d.get(edge)

    def __len__(self) -> int:
        return len(self._d)

    def items(self):
        return list(self._d.items())

    def put_if_absent(self, edge, state):
        """Install ``state`` if no entry exists; return the previous entry or None."""
        with _STRIPES[hash(edge) & 63]:
            cur = self._d.get(edge)
            if cur is None:
                self._d[edge] = state
        if cur is None and self.recorder is not None:
            self.recorder(edge, None, state)
        return cur

    def cas(self, edge, expected, new) -> bool:
        """Replace ``expected`` by ``new``; ``new=None`` deletes the entry."""
        with _STRIPES[hash(edge) & 63]:
            cur = self._d.get(edge)
            if cur is not expected or cur is None:
                return False
            if new is None:
                del self._d[edge]
            else:
                self._d[edge] = new
        if self.recorder is not None:
            self.recorder(edge, expected, new)
        return True


# -- lock-free bag -----------------------------------------------------------

class _BagNode:
    __slots__ = ("value", "next", "marked")

    def __init__(self, value, nxt):
        self.value = value
        self.next = nxt
        self.marked = False


class ConcurrentMultiset:
    """Unordered lock-free bag: head insertion, mark-then-unlink removal.

    Insertions only ever happen right after the sentinel, so unlinking a
    marked node can never lose a concurrently inserted successor.
    """

    __slots__ = ("_head",)

    def __init__(self):
        self._head = _BagNode(None, None)

    def add(self, value) -> None:
        head = self._head
        lock = _stripe(head)
        while True:
            first = head.next
            node = _BagNode(value, first)
            with lock:
                if head.next is first:
                    head.next = node
                    return

    def _unlink(self, pred: _BagNode, node: _BagNode) -> None:
        with _stripe(pred):
            if pred.next is node:
                pred.next = node.next

    def remove_one(self, value) -> bool:
        pred = self._head
        node = pred.next
        while node is not None:
            if not node.marked and node.value == value:
                with _stripe(node):
                    won = not node.marked
                    node.marked = True
                if won:
                    self._unlink(pred, node)
                    return True
            if node.marked:
                self._unlink(pred, node)
            else:
                pred = node
            node = node.next
        return False

    def nonempty(self) -> bool:
        node = self._head.next
        while node is not None:
            if not node.marked:
                return True
            node = node.next
        return False

    def __iter__(self):
        node = self._head.next
        while node is not None:
            if not node.marked:
                yield node.value
            node = node.next

    def __len__(self) -> int:
        n = 0
        node = self._head.next
        while node is not None:
            if not node.marked:
                n += 1
            node = node.next
        return n

    def count(self, value) -> int:
        return sum(1 for v in self if v == value)
