from dyncon import CLOSED, get_kernel
from dyncon.states import (
    INITIAL,
    NON_SPANNING,
    SPANNING,
    EdgeState,
    RemovalOp,
    finalize_replacement_search,
    propose_replacement,
)


def _op(kernel):
    return RemovalOp(0, 1, None, None, kernel.AtomicRef(None), None, [], 4)


def test_initial_states_never_alike():
    a, b = EdgeState.initial(), EdgeState.initial()
    assert a is not b and a.status == b.status == INITIAL


def test_propose_into_empty_slot(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    s = EdgeState.initial()
    states.put_if_absent(5, s)
    assert propose_replacement(states, op, 5, s)
    assert op.slot.get() == (5, s)
    assert propose_replacement(states, op, 5, s)


def test_propose_into_closed_slot(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    op.slot.set(CLOSED)
    assert not propose_replacement(states, op, 5, EdgeState.initial())


def test_slot_with_removed_edge_is_cleared(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    gone = EdgeState.initial()
    op.slot.set((7, gone))
    s = EdgeState.initial()
    states.put_if_absent(5, s)
    assert propose_replacement(states, op, 5, s)
    assert op.slot.get() == (5, s)


def test_slot_with_live_edge_helps_it(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    other = EdgeState.initial()
    states.put_if_absent(7, other)
    op.slot.set((7, other))
    assert not propose_replacement(states, op, 5, EdgeState.initial())
    assert states.get(7).status == SPANNING


def test_slot_with_non_spanning_edge_is_cleared(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    init = EdgeState.initial()
    states.put_if_absent(7, init)
    states.cas(7, init, EdgeState(NON_SPANNING, 0))
    op.slot.set((7, init))
    s = EdgeState.initial()
    assert propose_replacement(states, op, 5, s)
    assert op.slot.get() == (5, s)


def test_finalize_empty_then_again(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    assert finalize_replacement_search(states, op) is None
    assert op.slot.get() is CLOSED
    assert finalize_replacement_search(states, op) is None


def test_finalize_returns_raced_proposal(kernel):
    states = kernel.StateMap()
    op = _op(kernel)
    s = EdgeState.initial()
    states.put_if_absent(9, s)
    assert propose_replacement(states, op, 9, s)
    assert finalize_replacement_search(states, op) == 9
    assert states.get(9).status == SPANNING
    assert finalize_replacement_search(states, op) == 9
