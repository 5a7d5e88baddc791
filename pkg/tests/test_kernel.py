import random
import threading

import pytest

from dyncon import get_kernel
from dyncon._kernel import _pykernel


def _chain(K, keys):
    """Treap built by joining single nodes in order."""
    nodes = [K.Node(p, i, vertex=i) for i, p in enumerate(keys)]
    top = None
    for x in nodes:
        top = K.join(top, x, None)
    top.parent = None
    return nodes, top


def test_join_keeps_order_and_heap(kernel):
    rng = random.Random(3)
    nodes, top = _chain(kernel, [rng.getrandbits(64) for _ in range(200)])
    assert [x.vertex for x in kernel.inorder(top)] == list(range(200))
    for x in nodes:
        for c in (x.left, x.right):
            if c is not None:
                assert c.parent is x
                assert kernel.higher(x, c)
    assert top.cnt == 200 and top.size == 200


def test_split_before_and_after_partition_sequence(kernel):
    rng = random.Random(4)
    nodes, top = _chain(kernel, [rng.getrandbits(64) for _ in range(50)])
    anchor = kernel.Node(1 << 63, 999, vertex=999)
    left, right = kernel.split_before(nodes[20], anchor)
    assert [x.vertex for x in kernel.inorder(left)] == list(range(20))
    assert [x.vertex for x in kernel.inorder(right)] == list(range(20, 50))
    assert left.parent is anchor and right.parent is anchor
    l2, r2 = kernel.split_after(nodes[30], anchor)
    assert [x.vertex for x in kernel.inorder(l2)] == list(range(20, 31))
    assert [x.vertex for x in kernel.inorder(r2)] == list(range(31, 50))


def test_position_and_select(kernel):
    rng = random.Random(5)
    nodes, top = _chain(kernel, [rng.getrandbits(64) for _ in range(64)])
    for i in (0, 17, 63):
        assert kernel.position(nodes[i]) == i
        assert kernel.select_vertex(top, i) is nodes[i]


def test_vertex_nodes_outrank_arcs(kernel):
    v = kernel.Node(0, 0, vertex=5)
    a = kernel.Node((1 << 64) - 1, 1, -1, (1, 2))
    assert kernel.higher(v, a)


def test_find_root_and_connected_on_raw_nodes(kernel):
    a, b, c = (kernel.Node(i + 1, i, vertex=i) for i in range(3))
    a.parent = c
    c.version = 7
    assert kernel.find_root(a) == (c, 7)
    assert kernel.connected(a, c) == (True, 1)
    assert kernel.connected(a, b)[0] is False


def test_flags_recalculate_and_raise(kernel):
    p = kernel.Node(10, 0, vertex=0)
    c = kernel.Node(5, 1, vertex=1)
    p.left, c.parent = c, p
    c.edges = kernel.ConcurrentMultiset()
    c.edges.add(42)
    kernel.set_flags_up(c)
    assert c.nsp and p.nsp
    c.edges.remove_one(42)
    kernel.recalculate_flags(c)
    kernel.recalculate_flags(p)
    assert not c.nsp and not p.nsp


def test_set_flags_up_second_call_writes_nothing():
    K = _pykernel
    writes = []

    class Spy(K.Node):
        __slots__ = ()

        def __setattr__(self, name, value):
            if name == "nsp":
                writes.append(self.nid)
            super().__setattr__(name, value)

    p = Spy(10, 0, vertex=0)
    c = Spy(5, 1, vertex=1)
    c.parent = p
    writes.clear()
    K.set_flags_up(c)
    assert writes == [1, 0]
    writes.clear()
    K.set_flags_up(c)
    assert writes == []


def test_atomic_ref_cas_by_identity(kernel):
    a, b = object(), object()
    r = kernel.AtomicRef(a)
    assert not r.cas(b, None)
    assert r.cas(a, b)
    assert r.get() is b


def test_state_map_transitions(kernel):
    m = kernel.StateMap()
    seen = []
    m.recorder = lambda e, o, n: seen.append((e, o, n))
    s1, s2 = object(), object()
    assert m.put_if_absent(3, s1) is None
    assert m.put_if_absent(3, s2) is s1
    assert not m.cas(3, s2, None)
    assert m.cas(3, s1, s2)
    assert m.cas(3, s2, None)
    assert m.get(3) is None and len(m) == 0
    assert [x[0] for x in seen] == [3, 3, 3]


def test_cas_is_atomic_under_threads(kernel):
    r = kernel.AtomicRef(0)
    boxes = [object() for _ in range(8)]
    wins = []

    def go(i):
        cur = r.get()
        if r.cas(cur, boxes[i]):
            wins.append(i)

    r.set(None)
    ts = [threading.Thread(target=go, args=(i,)) for i in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert r.get() in boxes
    assert len(wins) >= 1


def test_write_hook_only_in_python_kernel():
    _pykernel.set_write_hook(None)
    try:
        ck = get_kernel("cython")
    except ImportError:
        pytest.skip("compiled kernel not built")
    with pytest.raises(NotImplementedError):
        ck.set_write_hook(lambda x: None)
