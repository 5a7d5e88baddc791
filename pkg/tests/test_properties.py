from hypothesis import given, settings
from hypothesis import strategies as st

from dyncon import DynamicConnectivity, get_kernel
from dyncon.testkit.invariants import check_all
from dyncon.testkit.oracle import OracleGraph

N = 10

ops = st.lists(
    st.tuples(st.sampled_from(["add", "remove", "connected"]),
              st.integers(0, N - 1), st.integers(0, N - 1)),
    max_size=80,
)


@settings(max_examples=150, deadline=None)
@given(ops, st.sampled_from(["coarse", "fine", "nb-reads", "full"]), st.integers(0, 3))
def test_any_sequence_matches_oracle(seq, variant, seed):
    dc = DynamicConnectivity(N, variant=variant, seed=seed, samples=seed * 4)
    g = OracleGraph(N)
    for kind, a, b in seq:
        if kind == "connected":
            assert dc.connected(a, b) == g.connected(a, b)
        elif a != b:
            if kind == "add":
                dc.add_edge(a, b)
                g.add_edge(a, b)
            else:
                dc.remove_edge(a, b)
                g.remove_edge(a, b)
    assert dc.edges() == g.edges()
    assert check_all(dc) == []


@settings(max_examples=60, deadline=None)
@given(ops)
def test_kernels_agree(seq):
    from dyncon import available_kernels

    outs = []
    for name in available_kernels():
        dc = DynamicConnectivity(N, seed=1, kernel=get_kernel(name))
        out = []
        for kind, a, b in seq:
            if kind == "connected":
                out.append(dc.connected(a, b))
            elif a != b:
                (dc.add_edge if kind == "add" else dc.remove_edge)(a, b)
                out.append(tuple(sorted((e, s.status, s.level) for e, s in dc.states.items())))
        outs.append(out)
    assert all(o == outs[0] for o in outs)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 4)), max_size=60))
def test_multiset_counts(steps):
    from collections import Counter

    for name in ("python", "cython"):
        try:
            K = get_kernel(name)
        except ImportError:
            continue
        m = K.ConcurrentMultiset()
        ref = Counter()
        for add, v in steps:
            if add:
                m.add(v)
                ref[v] += 1
            else:
                assert m.remove_one(v) == (ref[v] > 0)
                if ref[v]:
                    ref[v] -= 1
        assert Counter(iter(m)) == +ref
