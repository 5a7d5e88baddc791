import threading
from collections import Counter

from dyncon.multiset import ConcurrentMultiset


def test_multiplicity(kernel):
    m = ConcurrentMultiset(kernel)
    m.add(5)
    m.add(5)
    assert m.remove_one(5)
    assert m.count(5) == 1 and len(m) == 1


def test_remove_from_empty(kernel):
    m = ConcurrentMultiset(kernel)
    assert not m.remove_one(1)
    assert not m.nonempty()


def test_storm_matches_tally(kernel):
    m = ConcurrentMultiset(kernel)
    tallies = [Counter() for _ in range(8)]

    def worker(t):
        import random

        r = random.Random(t)
        mine = []
        for _ in range(3000):
            if mine and r.random() < 0.45:
                v = mine.pop(r.randrange(len(mine)))
                assert m.remove_one(v)
                tallies[t][v] -= 1
            else:
                v = r.randrange(20)
                m.add(v)
                mine.append(v)
                tallies[t][v] += 1

    ts = [threading.Thread(target=worker, args=(t,)) for t in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    expected = Counter()
    for c in tallies:
        expected.update(c)
    expected = +expected
    assert Counter(iter(m)) == expected


def test_iteration_visits_stable_sentinel(kernel):
    m = ConcurrentMultiset(kernel)
    for v in range(50):
        m.add(v)
    m.add("sentinel")
    stop = threading.Event()

    def churn():
        i = 1000
        while not stop.is_set():
            m.add(i)
            m.remove_one(i - 1)
            i += 1

    t = threading.Thread(target=churn)
    t.start()
    try:
        for _ in range(200):
            assert "sentinel" in list(m)
    finally:
        stop.set()
        t.join()


def test_small_histories_linearize(kernel):
    import itertools
    import random
    import sys

    old = sys.getswitchinterval()
    sys.setswitchinterval(1e-6)
    try:
        for trial in range(40):
            r = random.Random(trial)
            m = ConcurrentMultiset(kernel)
            m.add(1)
            plans = [[(r.choice("ar"), r.randrange(2)) for _ in range(3)] for _ in range(3)]
            hist = []
            barrier = threading.Barrier(3)

            def go(t):
                barrier.wait()
                for kind, v in plans[t]:
                    if kind == "a":
                        m.add(v)
                        hist.append((t, kind, v, None))
                    else:
                        hist.append((t, kind, v, m.remove_one(v)))

            ts = [threading.Thread(target=go, args=(t,)) for t in range(3)]
            for t in ts:
                t.start()
            for t in ts:
                t.join()
            # Program order per thread must admit some interleaving.
            per = [[h for h in hist if h[0] == t] for t in range(3)]

            def legal(idx, bag):
                if all(idx[t] == len(per[t]) for t in range(3)):
                    return Counter(iter(m)) == +bag
                for t in range(3):
                    if idx[t] < len(per[t]):
                        _, kind, v, res = per[t][idx[t]]
                        nb = Counter(bag)
                        if kind == "a":
                            nb[v] += 1
                        else:
                            if (nb[v] > 0) != res:
                                continue
                            if res:
                                nb[v] -= 1
                        nidx = list(idx)
                        nidx[t] += 1
                        if legal(nidx, nb):
                            return True
                return False

            assert legal([0, 0, 0], Counter({1: 1})), (trial, hist)
    finally:
        sys.setswitchinterval(old)
