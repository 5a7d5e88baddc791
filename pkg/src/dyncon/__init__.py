"""Concurrent dynamic graph connectivity with lock-free queries."""

from ._kernel import BACKEND, available as available_kernels, get_kernel
from .connectivity import VARIANTS, DynamicConnectivity
from .ett import EulerTourForest, InvariantError
from .levels import LevelForest, max_level
from .states import CLOSED, EdgeState, RemovalOp

__all__ = [
    "BACKEND",
    "CLOSED",
    "DynamicConnectivity",
    "EdgeState",
    "EulerTourForest",
    "InvariantError",
    "LevelForest",
    "RemovalOp",
    "VARIANTS",
    "available_kernels",
    "get_kernel",
    "max_level",
]

__version__ = "0.1.0"
