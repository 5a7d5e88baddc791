"""Edge states, removal descriptors and the replacement-slot protocol."""

from __future__ import annotations

import random
from typing import Optional

INITIAL = 0
IN_PROGRESS = 1
SPANNING = 2
NON_SPANNING = 3

STATUS_NAMES = {
    INITIAL: "INITIAL",
    IN_PROGRESS: "IN_PROGRESS",
    SPANNING: "SPANNING",
    NON_SPANNING: "NON_SPANNING",
}

_nonce_rng = random.Random()


class EdgeState:
    """Immutable ``(status, level)`` record; map entries are compared by identity.

    INITIAL states carry a random nonce so two insertion attempts of the same
    edge never look alike.
    """

    __slots__ = ("status", "level", "nonce")

    def __init__(self, status: int, level: int = 0, nonce: int = 0):
        self.status = status
        self.level = level
        self.nonce = nonce

    @classmethod
    def initial(cls) -> "EdgeState":
        return cls(INITIAL, 0, _nonce_rng.getrandbits(64))

    def __repr__(self) -> str:
        return f"EdgeState({STATUS_NAMES[self.status]}, {self.level})"


class _Closed:
    __slots__ = ()

    def __repr__(self) -> str:
        return "CLOSED"


CLOSED = _Closed()


class RemovalOp:
    """Descriptor of an in-flight spanning-edge removal.

    ``side_root`` and ``other_root`` are the tops of the two prepared pieces
    of the level-0 tour; ``side_root`` is the smaller one. ``slot`` holds
    ``None``, an ``(edge, state)`` pair, or ``CLOSED``.
    """

    __slots__ = ("u", "v", "side_root", "other_root", "slot", "_piece_root", "_nodes", "n")

    def __init__(self, u, v, side_root, other_root, slot, piece_root, nodes, n):
        self.u = u
        self.v = v
        self.side_root = side_root
        self.other_root = other_root
        self.slot = slot
        self._piece_root = piece_root
        self._nodes = nodes
        self.n = n

    def can_be_replacement(self, e: int) -> bool:
        """True iff ``e`` has exactly one endpoint on each prepared piece."""
        x, y = divmod(e, self.n)
        px = self._piece_root(self._nodes[x])
        py = self._piece_root(self._nodes[y])
        s, o = self.side_root, self.other_root
        return (px is s and py is o) or (px is o and py is s)


def propose_replacement(states, op: RemovalOp, e, state) -> bool:
    """Try to place ``(e, state)`` in the slot; ``e=CLOSED`` closes it.

    Returns True iff ``e`` now owns the slot (or closed it).
    """
    slot = op.slot
    while True:
        cur = slot.get()
        if cur is CLOSED:
            return False
        if cur is None:
            new = CLOSED if e is CLOSED else (e, state)
            if slot.cas(None, new):
                return True
            continue
        r_edge, r_state = cur
        if r_edge == e:
            return True
        if r_state.status == SPANNING:
            # Proposed by the removal itself; nothing to help.
            if states.get(r_edge) is r_state:
                return False
        elif states.cas(r_edge, r_state, EdgeState(SPANNING, 0)):
            return False
        now = states.get(r_edge)
        if now is not None and now.status == SPANNING:
            return False
        # The proposed edge was removed or settled as non-spanning.
        slot.cas(cur, None)


def finalize_replacement_search(states, op: RemovalOp) -> Optional[int]:
    """Close the slot; return the edge that beat the close, if any."""
    if propose_replacement(states, op, CLOSED, None):
        return None
    cur = op.slot.get()
    return None if cur is CLOSED else cur[0]
