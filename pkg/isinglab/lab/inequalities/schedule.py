"""The time-dependent block side ℓ(t) and its boundedness companion."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..report import InequalityReport, make_report

logger = logging.getLogger(__name__)


def validate_partition(partition: Sequence[float]) -> np.ndarray:
    t = np.asarray(partition, dtype=float)
    if len(t) == 0 or t[0] != 1.0:
        raise ValueError("the partition must start at t_0 = 1")
    if np.any(t[1:] <= 2.0 * t[:-1]):
        raise ValueError("the partition must satisfy t_n > 2 t_(n-1)")
    return t


def geometric_partition(count: int, ratio: float = 3.0) -> np.ndarray:
    """t_i = ratio^i for i < count (ratio > 2)."""
    if ratio <= 2.0:
        raise ValueError("ratio must exceed 2")
    return ratio ** np.arange(count, dtype=float)


def block_side_schedule(
    t: float, partition: Sequence[float], eta: float, c1: float, alpha: float
) -> float:
    """ℓ(t) = (t_i / (c₁(α+1)))^{1/(2η)} with t_i the last partition point ≤ t."""
    parts = validate_partition(partition)
    if eta <= 0 or c1 <= 0 or alpha < 0:
        raise ValueError("need eta > 0, c1 > 0 and alpha >= 0")
    if t < parts[0]:
        raise ValueError(f"t = {t} lies before t_0 = 1")
    i = int(np.searchsorted(parts, t, side="right")) - 1
    return float((parts[i] / (c1 * (alpha + 1.0))) ** (1.0 / (2.0 * eta)))


def schedule_boundedness(
    partition: Sequence[float],
    eta: float,
    c1: float,
    delta: float,
    alpha: Optional[float] = None,
    points: int = 400,
) -> InequalityReport:
    """sup_t ℓ(t)^{−(2δ∧1)} t^α on a log-spaced grid of [1, t_last).

    With α = (2δ∧1)/(2η) the supremum is at most (c₁(α+1))^α · (max t_{i+1}/t_i)^α.
    """
    parts = validate_partition(partition)
    if len(parts) < 2:
        raise ValueError("need at least two partition points")
    power = min(2.0 * delta, 1.0)
    alpha = power / (2.0 * eta) if alpha is None else alpha
    grid = np.geomspace(1.0, parts[-1], points, endpoint=False)
    sides = np.array([block_side_schedule(t, parts, eta, c1, alpha) for t in grid])
    values = sides ** (-power) * grid**alpha
    max_ratio = float(np.max(parts[1:] / parts[:-1]))
    bound = (c1 * (alpha + 1.0)) ** alpha * max_ratio**alpha
    return make_report(
        "schedule_boundedness",
        float(values.max()),
        bound,
        rtol=1e-12,
        inputs={"partition": parts.tolist(), "eta": eta, "c1": c1, "delta": delta, "alpha": alpha},
        monotone=bool(np.all(np.diff(sides) >= 0)),
        finite=bool(math.isfinite(values.max())),
    )
