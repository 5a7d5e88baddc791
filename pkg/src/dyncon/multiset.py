"""Lock-free multiset of edges used for per-vertex non-spanning edge storage."""

from ._kernel import get_kernel


def ConcurrentMultiset(kernel=None):
    """New empty multiset from the selected kernel."""
    return (kernel if kernel is not None else get_kernel()).ConcurrentMultiset()


__all__ = ["ConcurrentMultiset"]
