import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...errors import FitError
from ..rng import stream

logger = logging.getLogger(__name__)

BIAS_GUARD = 3.0


@dataclass(frozen=True, eq=False)
class ScalingSeries:
    """Points (abscissa, value, stderr) and an optional power-law fit value ≈ C·x^exponent."""

    label: str
    abscissae: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    stderrs: np.ndarray = field(repr=False)
    window: Optional[Tuple[float, float]] = None
    exponent: Optional[float] = None
    exponent_stderr: Optional[float] = None
    intercept: Optional[float] = None
    chi2_reduced: Optional[float] = None
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        if len(x) != len(self.values) or len(x) != len(self.stderrs):
            raise ValueError("abscissae, values and stderrs must have equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        if np.any(np.asarray(self.stderrs) < 0):
            raise ValueError("standard errors must be nonnegative")

    @property
    def fitted(self) -> bool:
        return self.exponent is not None

    def with_note(self, note: str) -> "ScalingSeries":
        return replace(self, notes=self.notes + (note,))

    def rows(self) -> List[Tuple[float, float, float]]:
        points = zip(self.abscissae, self.values, self.stderrs)
        return [(float(a), float(v), float(s)) for a, v, s in points]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "abscissae": [float(a) for a in self.abscissae],
            "values": [float(v) for v in self.values],
            "stderrs": [float(s) for s in self.stderrs],
            "window": list(self.window) if self.window else None,
            "exponent": self.exponent,
            "exponent_stderr": self.exponent_stderr,
            "intercept": self.intercept,
            "chi2_reduced": self.chi2_reduced,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ScalingSeries":
        window = payload.get("window")
        return cls(
            label=payload["label"],
            abscissae=np.asarray(payload["abscissae"], dtype=float),
            values=np.asarray(payload["values"], dtype=float),
            stderrs=np.asarray(payload["stderrs"], dtype=float),
            window=tuple(window) if window else None,
            exponent=payload.get("exponent"),
            exponent_stderr=payload.get("exponent_stderr"),
            intercept=payload.get("intercept"),
            chi2_reduced=payload.get("chi2_reduced"),
            notes=tuple(payload.get("notes", ())),
        )


def make_series(
    label: str,
    abscissae: Sequence[float],
    values: Sequence[float],
    stderrs: Optional[Sequence[float]] = None,
) -> ScalingSeries:
    values = np.asarray(values, dtype=float)
    stderrs = np.zeros_like(values) if stderrs is None else np.asarray(stderrs, dtype=float)
    return ScalingSeries(
        label=label,
        abscissae=np.asarray(abscissae, dtype=float),
        values=values,
        stderrs=stderrs,
    )


def _select(series: ScalingSeries, window: Optional[Tuple[float, float]]):
    columns = (series.abscissae, series.values, series.stderrs)
    x, y, s = (np.asarray(a, dtype=float) for a in columns)
    keep = x > 0
    if window is not None:
        keep &= (x >= window[0]) & (x <= window[1])
    return x[keep], y[keep], s[keep]


def fit_power_law(
    series: ScalingSeries,
    window: Optional[Tuple[float, float]] = None,
    n_bootstrap: int = 1000,
    seed: int = 0,
) -> ScalingSeries:
    """Least-squares fit of log(value) against log(abscissa).

    Points are weighted by their relative errors when every stderr is
    positive. The exponent stderr comes from a bootstrap: parametric on the
    stated errors when weighted, resampled residuals otherwise.

    Raises:
        FitError: Fewer than 3 points, a nonpositive value, or a value below
            3 standard errors inside the window.
    """
    x, y, s = _select(series, window)
    if len(x) < 3:
        raise FitError(f"{series.label}: {len(x)} points in window, at least 3 needed")
    if np.any(y <= 0):
        raise FitError(f"{series.label}: nonpositive values cannot be fitted in log space")
    if np.any(y < BIAS_GUARD * s):
        raise FitError(f"{series.label}: a value lies within {BIAS_GUARD} standard errors of zero")

    lx, ly = np.log(x), np.log(y)
    weighted = bool(np.all(s > 0))
    sigma = s / y if weighted else None
    w = 1.0 / sigma if weighted else None
    slope, offset = np.polyfit(lx, ly, 1, w=w)
    fit = slope * lx + offset
    resid = ly - fit
    dof = len(x) - 2
    chi2 = float(np.sum((resid / sigma) ** 2) / dof) if weighted else float(np.sum(resid**2) / dof)

    rng = stream(seed, "bootstrap")
    slopes = np.empty(n_bootstrap)
    for k in range(n_bootstrap):
        if weighted:
            sample = fit + sigma * rng.standard_normal(len(x))
        else:
            sample = fit + rng.choice(resid, size=len(resid), replace=True)
        slopes[k] = np.polyfit(lx, sample, 1, w=w)[0]
    stderr = float(slopes.std(ddof=1)) if n_bootstrap > 1 else 0.0

    logger.debug(f"Fit {series.label}: exponent {slope:.6g} +- {stderr:.2g}, chi2/dof {chi2:.3g}")
    return replace(
        series,
        window=(float(x[0]), float(x[-1])) if window is None else tuple(map(float, window)),
        exponent=float(slope),
        exponent_stderr=stderr,
        intercept=float(np.exp(offset)),
        chi2_reduced=chi2,
    )
