import pytest

from dyncon.testkit.history import HistoryRecord, find_linearization, stale_root_history
from dyncon.testkit.invariants import check_all
from dyncon.testkit.oracle import OracleGraph, same_partition
from dyncon.testkit.scripted import SCHEDULES, TransitionRecorder, run_scripted
from dyncon.testkit.sequential import random_ops, run_sequential_equivalence, shrink
from dyncon.testkit.stress import check_reads, reconcile_edges, run_phase_stress, run_small_histories


def test_oracle_basics():
    g = OracleGraph(5)
    assert g.add_edge(0, 1) and not g.add_edge(1, 0)
    g.add_edge(1, 2)
    assert g.connected(0, 2) and not g.connected(0, 3)
    assert g.components() == [0, 0, 0, 3, 4]
    g.remove_edge(0, 1)
    assert not g.connected(0, 2)
    assert same_partition({0: "a", 1: "b", 2: "b", 3: "c", 4: "d"}, g.components())


def test_sequential_small_seed_passes(kernel):
    rep = run_sequential_equivalence(1, 8, 100, kernel=kernel)
    assert rep.passed and rep.ops_run == 100


def test_sequential_empty_op_list(kernel):
    rep = run_sequential_equivalence(1, 8, 0, kernel=kernel)
    assert rep.passed and rep.ops_run == 0


def test_random_ops_deterministic():
    assert random_ops(3, 32, 500) == random_ops(3, 32, 500)
    assert random_ops(3, 32, 500) != random_ops(4, 32, 500)


def test_mutation_detected_and_shrunk(kernel):
    rep = run_sequential_equivalence(1, 64, 100_000, kernel=kernel,
                                     mutations=("skip_version_bump",))
    assert not rep.passed
    assert rep.failure_index is not None and rep.failure_index < 100_000
    assert len(rep.reproducer) == 1 and rep.reproducer[0][0] == "add"


def test_shrink_finds_minimal_prefix():
    from dyncon import DynamicConnectivity

    # A fake engine that fails once vertex 7 has been touched by an add.
    class Broken(DynamicConnectivity):
        def connected(self, u, v):
            ans = super().connected(u, v)
            return (not ans) if self.has_edge(6, 7) else ans

    ops = [("add", 0, 1)] * 5 + [("add", 6, 7)] + [("add", 2, 3)] * 5 + [("connected", 0, 1)]
    make = lambda: Broken(8)
    out = shrink(8, ops, make)
    assert out == [("add", 6, 7), ("connected", 0, 1)]


@pytest.mark.parametrize("name", SCHEDULES)
def test_scripted_schedules(kernel, name):
    v = run_scripted(name, kernel=kernel)
    assert v.passed, v.summary()
    assert not any("REMOVED ->" in p for p in v.problems)


def test_stale_root_verdicts_exact():
    assert run_scripted("stale-root-full").result is True
    assert run_scripted("stale-root-truncated").result is False


def test_unknown_schedule():
    with pytest.raises(ValueError):
        run_scripted("nope")


def test_wing_gong_accepts_and_rejects():
    R = HistoryRecord
    # Sequential add then read: only True is legal.
    h = [R(0, "add", (0, 1), None, 0, 1), R(1, "connected", (0, 1), True, 2, 3)]
    assert find_linearization(2, h) is not None
    h = [R(0, "add", (0, 1), None, 0, 1), R(1, "connected", (0, 1), False, 2, 3)]
    assert find_linearization(2, h) is None
    # Overlapping: either answer is legal.
    h = [R(0, "add", (0, 1), None, 0, 5), R(1, "connected", (0, 1), False, 1, 2)]
    assert find_linearization(2, h) is not None
    with pytest.raises(ValueError):
        find_linearization(2, [h[0]] * 13)


def test_truncated_check_history_is_not_linearizable():
    h, init = stale_root_history(True)
    assert find_linearization(4, h, init) is not None
    h, init = stale_root_history(False)
    assert find_linearization(4, h, init) is None


def test_reconcile_and_read_bounds():
    R = HistoryRecord
    recs = [R(0, "add", (0, 1), None, 0, 10), R(1, "remove", (0, 1), None, 5, 6)]
    assert reconcile_edges(set(), recs, {(0, 1)}) == []
    assert reconcile_edges(set(), recs, set()) == []
    recs = [R(0, "add", (0, 1), None, 0, 1), R(1, "remove", (0, 1), None, 5, 6)]
    assert reconcile_edges(set(), recs, {(0, 1)}) != []
    assert reconcile_edges({(2, 3)}, [], set()) != []
    reads = [R(0, "connected", (0, 1), True, 0, 1)]
    assert check_reads(3, set(), reads) != []
    reads = [R(0, "connected", (0, 1), False, 0, 1)]
    assert check_reads(3, {(0, 1)}, reads) != []


def test_phase_stress_small(kernel):
    rep = run_phase_stress(2, 64, 50, 200, kernel=kernel, seed=3)
    assert rep.passed, rep.summary()
    assert rep.watchdog_trips == 0


@pytest.mark.parametrize("variant", ["coarse", "fine", "nb-reads", "full"])
def test_phase_stress_variants(kernel, variant):
    rep = run_phase_stress(4, 32, 10, 200, variant=variant, kernel=kernel, seed=5)
    assert rep.passed, rep.summary()


def test_small_histories_linearizable(kernel):
    rep = run_small_histories(30, kernel=kernel, seed=2)
    assert rep.passed, rep.violations[:1]


def test_transition_recorder_flags_illegal_arc():
    from dyncon.states import EdgeState, IN_PROGRESS, NON_SPANNING

    rec = TransitionRecorder(4)
    rec(1, None, EdgeState(NON_SPANNING, 0))
    rec(1, EdgeState(IN_PROGRESS, 0), None)
    assert len(rec.bad) == 2


def test_testkit_cli(capsys):
    from dyncon.testkit.cli import main

    assert main(["sequential", "--n", "8", "--ops", "100"]) == 0
    assert main(["scripted", "--schedule", "stale-root-truncated"]) == 0
    assert main(["stress", "--threads", "2", "--n", "16", "--phases", "3", "--ops", "100"]) == 0
    assert main(["sequential", "--n", "16", "--ops", "100", "--mutation", "skip_version_bump"]) == 1
    out = capsys.readouterr().out
    assert "pass" in out and "FAIL" in out
