"""Deterministic shell sum S(L) = L^{-d} Σ_{i=1}^{L-1} i^{d-1} (L-i)^{-2δ}."""

import logging
import math
from typing import List, Sequence

import numpy as np

from ..report import InequalityReport, make_report
from .series import ScalingSeries, make_series

logger = logging.getLogger(__name__)

MAX_L = 10**6
PLATEAU_RATIO = 1.5


def _check_delta(delta: float):
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if delta == 0.5:
        raise ValueError("delta = 1/2 carries a logarithmic correction and is excluded")


def shell_sum(d: int, delta: float, L: int) -> float:
    """S(L) with compensated summation of the L−1 terms."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if not 2 <= L <= MAX_L:
        raise ValueError(f"L must lie in [2, {MAX_L}], got {L}")
    i = np.arange(1, L, dtype=np.float64)
    terms = i ** (d - 1) / (L - i) ** (2.0 * delta)
    return math.fsum(terms.tolist()) / float(L) ** d


def shell_sum_series(d: int, delta: float, L_list: Sequence[int]) -> ScalingSeries:
    """S(L)·L^{2δ∧1} for every L."""
    _check_delta(delta)
    sizes = sorted(set(int(L) for L in L_list))
    power = min(2.0 * delta, 1.0)
    values = [shell_sum(d, delta, L) * float(L) ** power for L in sizes]
    return make_series(f"shell_sum_d{d}_delta{delta:g}", sizes, values)


def shell_sum_check(d: int, delta: float, L_list: Sequence[int]) -> List[InequalityReport]:
    """Boundedness of S(L)·L^{2δ∧1}: max/min over the last decade of L is at most 1.5.

    The last decade is every L ≥ max(L_list)/10; with fewer than two such points
    the whole list is used.
    """
    series = shell_sum_series(d, delta, L_list)
    x, v = series.abscissae, series.values
    tail = x >= x[-1] / 10.0
    if tail.sum() < 2:
        tail = np.ones_like(tail)
    ratio = float(v[tail].max() / v[tail].min())
    logger.debug(f"Shell sum d={d} delta={delta}: last-decade spread {ratio:.4f}")
    return [
        make_report(
            "shell_sum_bounded",
            ratio,
            PLATEAU_RATIO,
            inputs=series.to_dict(),
            plateau=float(v[-1]),
            points=int(tail.sum()),
        )
    ]
