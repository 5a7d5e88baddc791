import random
import threading

import pytest

from dyncon import VARIANTS, DynamicConnectivity
from dyncon.states import NON_SPANNING, SPANNING
from dyncon.testkit.invariants import check_all
from dyncon.testkit.oracle import OracleGraph


def test_bad_arguments():
    with pytest.raises(ValueError):
        DynamicConnectivity(0)
    with pytest.raises(ValueError):
        DynamicConnectivity(4, variant="nope")
    dc = DynamicConnectivity(4)
    with pytest.raises(ValueError):
        dc.add_edge(1, 1)
    with pytest.raises(ValueError):
        dc.remove_edge(2, 2)
    with pytest.raises(ValueError):
        dc.add_edge(0, 4)
    with pytest.raises(ValueError):
        dc.connected(-1, 0)


@pytest.mark.parametrize("variant", VARIANTS)
def test_basic_semantics(kernel, variant):
    dc = DynamicConnectivity(5, variant=variant, kernel=kernel)
    assert dc.connected(3, 3)
    assert not dc.connected(0, 1)
    dc.add_edge(0, 1)
    dc.add_edge(1, 0)
    assert dc.edges() == [(0, 1)]
    dc.add_edge(1, 2)
    assert dc.connected(0, 2)
    dc.remove_edge(1, 2)
    dc.remove_edge(1, 2)
    assert not dc.connected(0, 2)
    dc.remove_edge(3, 4)
    assert dc.edges() == [(0, 1)]


@pytest.mark.parametrize("variant", VARIANTS)
def test_random_sequential_against_oracle(kernel, variant):
    rng = random.Random(hash(variant) & 0xFFFF)
    n = 48
    dc = DynamicConnectivity(n, variant=variant, kernel=kernel, seed=3)
    g = OracleGraph(n)
    for i in range(3000):
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b:
            continue
        r = rng.random()
        if r < 0.35:
            dc.add_edge(a, b)
            g.add_edge(a, b)
        elif r < 0.7:
            dc.remove_edge(a, b)
            g.remove_edge(a, b)
        else:
            assert dc.connected(a, b) == g.connected(a, b), i
    assert check_all(dc) == []


def test_non_blocking_add_records_info(kernel):
    dc = DynamicConnectivity(3, kernel=kernel)
    dc.add_edge(0, 1)
    dc.add_edge(1, 2)
    dc.add_edge(0, 2)
    s = dc.edge_state(0, 2)
    assert s.status == NON_SPANNING and s.level == 0
    assert dc.F0.info_count(0 * 3 + 2) == 1
    assert dc.stats()["ns_add"] == 1


def test_same_edge_added_concurrently(kernel):
    for trial in range(30):
        dc = DynamicConnectivity(6, kernel=kernel, seed=trial)
        dc.add_edge(0, 1)
        dc.add_edge(1, 2)
        barrier = threading.Barrier(4)

        def go():
            barrier.wait()
            dc.add_edge(0, 2 if trial % 2 else 3)

        ts = [threading.Thread(target=go) for _ in range(4)]
        for t in ts:
            t.start()
        for t in ts:
            t.join()
        e = (0, 2) if trial % 2 else (0, 3)
        s = dc.edge_state(*e)
        assert s.status in (SPANNING, NON_SPANNING)
        assert dc.edges().count(e) == 1
        assert check_all(dc) == []


def test_remove_non_spanning_racing_promotion(kernel):
    for trial in range(30):
        n = 8
        dc = DynamicConnectivity(n, kernel=kernel, seed=trial, samples=0)
        for v in range(1, n):
            dc.add_edge(v - 1, v)
        dc.add_edge(0, 2)
        barrier = threading.Barrier(2)

        def remover():
            barrier.wait()
            dc.remove_edge(0, 2)

        def splitter():
            barrier.wait()
            dc.remove_edge(0, 1)

        ts = [threading.Thread(target=remover), threading.Thread(target=splitter)]
        for t in ts:
            t.start()
        for t in ts:
            t.join()
        assert (0, 2) not in dc.edges()
        e = 0 * n + 2
        assert all(F.info_count(e) == 0 for F in dc.levels.F)
        assert check_all(dc) == []


def test_lock_order_is_argument_independent(kernel):
    dc = DynamicConnectivity(4, variant="fine", kernel=kernel)
    order = []
    for x in dc.F0.vnode:
        real = x.lock

        class Spy:
            def __init__(self, lk, nid):
                self.lk, self.nid = lk, nid

            def acquire(self):
                order.append(self.nid)
                return self.lk.acquire()

            def release(self):
                return self.lk.release()

        x.lock = Spy(real, x.nid)
    dc._unlock(dc._lock(1, 3))
    first = list(order)
    order.clear()
    dc._unlock(dc._lock(3, 1))
    assert order == first == sorted(first)
    order.clear()
    dc.add_edge(1, 3)
    order.clear()
    locks = dc._lock(1, 3)
    assert len(locks) == 1
    dc._unlock(locks)


def test_reset_stats(kernel):
    dc = DynamicConnectivity(3, kernel=kernel)
    dc.add_edge(0, 1)
    dc.connected(0, 1)
    dc.reset_stats()
    assert all(v == 0 for v in dc.stats().values())
