import random

import pytest

from dyncon import EulerTourForest, InvariantError
from dyncon.testkit.invariants import check_acyclic, check_tours, check_treaps


def forest(n, kernel, seed=0):
    return EulerTourForest(n, random.Random(seed), kernel=kernel, with_locks=True)


def test_create_rejects_zero():
    with pytest.raises(ValueError):
        EulerTourForest(0)


def test_create_singletons(kernel):
    f = forest(4, kernel)
    roots = [f.find_root(v) for v in range(4)]
    assert len({id(r) for r, _ in roots}) == 4
    assert all(ver == 0 for _, ver in roots)
    assert not f.connected(0, 1)
    one = forest(1, kernel)
    assert one.find_root(0) == (one.node(0), 0)


def test_link_two_singletons(kernel):
    f = forest(2, kernel)
    a, b = f.node(0), f.node(1)
    expected = a if kernel.higher(a, b) else b
    f.link(0, 1)
    assert f.root(0) is expected and f.root(1) is expected
    assert expected.cnt == 4 and expected.size == 2
    assert f.find_root(0)[1] >= 1


def test_cut_only_edge_bumps_both_versions(kernel):
    f = forest(2, kernel)
    f.link(0, 1)
    r = f.root(0)
    before = r.version
    f.cut(0, 1)
    assert not f.connected(0, 1)
    assert r.version == before + 1
    other = f.root(1) if f.root(0) is r else f.root(0)
    assert other.version >= 1


def test_two_modifications_bump_twice(kernel):
    f = forest(3, kernel)
    f.link(0, 1)
    r = f.root(0)
    v0 = r.version
    f.link(1, 2)
    f.cut(1, 2)
    assert f.root(0).version >= v0 + 1


def test_tour_split_matches_traversal_example(kernel):
    # Tree: 1-2, 1-3, 3-4, 4-5 rooted at 1; cutting 1-3 splits {1,2} from {3,4,5}.
    f = forest(6, kernel, seed=2)
    for a, b in ((1, 2), (1, 3), (3, 4), (4, 5)):
        f.link(a, b)
    labels = f.tour_labels(1)
    assert sorted(x for x in labels if isinstance(x, int)) == [1, 2, 3, 4, 5]
    assert sum(1 for x in labels if isinstance(x, tuple)) == 8
    assert check_tours(f) == []
    f.cut(1, 3)
    assert {x for x in f.tour_labels(1) if isinstance(x, int)} == {1, 2}
    assert {x for x in f.tour_labels(4) if isinstance(x, int)} == {3, 4, 5}
    assert check_tours(f) == [] and check_treaps(f) == [] and check_acyclic(f) == []


def test_link_connected_and_cut_missing_are_errors(kernel):
    f = forest(3, kernel)
    f.link(0, 1)
    with pytest.raises(InvariantError):
        f.link(1, 0)
    with pytest.raises(InvariantError):
        f.cut(1, 2)


def test_random_link_cut_matches_union_of_trees(kernel):
    rng = random.Random(9)
    n = 40
    f = forest(n, kernel, seed=9)
    edges = set()
    for _ in range(600):
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b:
            continue
        e = (min(a, b), max(a, b))
        if e in edges and rng.random() < 0.6:
            f.cut(*e)
            edges.discard(e)
        elif e not in edges and not f.connected(a, b):
            f.link(*e)
            edges.add(e)
    assert check_tours(f) == [] and check_treaps(f) == []


def test_mean_depth_is_logarithmic(kernel):
    import math

    n = 1024
    depths = []
    for seed in range(100):
        f = forest(n, kernel, seed=seed)
        for v in range(1, n):
            f.link(0, v)
        total = 0
        for x in f.nodes():
            d = 0
            while x.parent is not None:
                x = x.parent
                d += 1
            total += d
        depths.append(total / (3 * n - 2))
    assert sum(depths) / len(depths) <= 4 * math.log2(n)


def test_add_and_remove_info(kernel):
    f = forest(4, kernel)
    f.link(0, 1)
    e = 0 * 4 + 2
    f.add_info(e)
    assert f.info_count(e) == 1 and f.node(0).nsp
    f.remove_info(e)
    assert f.info_count(e) == 0
    with pytest.raises(InvariantError):
        f.remove_info(e)


def test_reader_never_sees_three_roots_during_cut():
    from dyncon._kernel import _pykernel as K

    f = EulerTourForest(64, random.Random(1), kernel=K, with_locks=True)
    for v in range(1, 64):
        f.link(v - 1, v)
    u, v = 10, 11
    xu, xv = f.node(u), f.node(v)
    seen = []

    def hook(_node):
        seen.append({id(K.root_of(xu)), id(K.root_of(xv))})

    K.set_write_hook(hook)
    try:
        f.cut(u, v)
    finally:
        K.set_write_hook(None)
    assert seen and all(len(s) <= 2 for s in seen)
    # Before the commit, every intermediate write kept one component.
    assert all(len(s) == 1 for s in seen)


def test_reader_sees_one_component_throughout_link():
    from dyncon._kernel import _pykernel as K

    f = EulerTourForest(64, random.Random(2), kernel=K, with_locks=True)
    for v in range(1, 32):
        f.link(v - 1, v)
    for v in range(33, 64):
        f.link(v - 1, v)
    a, b = f.node(5), f.node(40)
    seen = []
    K.set_write_hook(lambda _n: seen.append(K.root_of(a) is K.root_of(b)))
    try:
        f.link(20, 50)
    finally:
        K.set_write_hook(None)
    assert seen and all(seen)


def test_skip_version_bump_is_detected(kernel):
    f = forest(3, kernel)
    f.check_versions = True
    f.mutations.add("skip_version_bump")
    with pytest.raises(InvariantError):
        f.link(0, 1)
