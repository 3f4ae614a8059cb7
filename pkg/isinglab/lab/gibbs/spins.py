"""Bit-packed spin configurations.

A configuration on n sites is the integer ``s`` whose bit ``i`` is set when
σ_i = −1, so state 0 is the all-plus configuration and flipping site x is
``s ^ (1 << x)``.
"""

from typing import Sequence

import numpy as np

from ...errors import CapacityError
from ..constants import ENUMERATION_MAX_SITES


def encode(sigma: Sequence[int]) -> int:
    arr = np.asarray(sigma)
    if arr.ndim != 1 or not np.all(np.abs(arr) == 1):
        raise ValueError("a spin configuration is a 1-d array of +1/-1 values")
    bits = np.flatnonzero(arr < 0)
    return int(sum(1 << int(i) for i in bits))


def decode(state: int, n: int) -> np.ndarray:
    bits = (int(state) >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def spin_table(n: int, max_sites: int = ENUMERATION_MAX_SITES) -> np.ndarray:
    """``(2**n, n)`` int8 table of every configuration in state order."""
    if n > max_sites:
        raise CapacityError("state space", 2**n, 2**max_sites)
    states = np.arange(2**n, dtype=np.int64)[:, None]
    return (1 - 2 * ((states >> np.arange(n, dtype=np.int64)) & 1)).astype(np.int8)


def flip_index(n: int, x: int) -> np.ndarray:
    """State index of σ^x for every state."""
    return np.arange(2**n, dtype=np.int64) ^ (1 << x)


def validate_config(sigma: np.ndarray, n: int) -> np.ndarray:
    arr = np.asarray(sigma)
    if arr.shape != (n,):
        raise ValueError(f"spin configuration has shape {arr.shape}, expected ({n},)")
    if not np.all(np.abs(arr) == 1):
        raise ValueError("spin values must be exactly +1 or -1")
    return arr.astype(np.int8)
