"""Temporal autocorrelation ⟨σ₀, P_tσ₀⟩ on a torus.

Each replica draws σ(0) from equilibrium (Wolff + heat-bath), runs the
dynamics by uniformization and records the site average
n⁻¹ Σ_x σ_x(0)σ_x(t) on the time grid; by translation invariance this has the
same mean as σ₀(0)σ₀(t). Replicas are grouped into units that can run on a
worker pool; units are merged in replica order.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..gibbs import BoundaryCondition, EquilibriumSampler, beta_critical
from ..glauber import make_rate_model, simulate_overlap
from ..lattice import Geometry, build_box, build_geometry
from ..report import InequalityReport, make_report
from ..rng import stream
from ..spectral import autocorrelation_exact, build_generator
from .series import ScalingSeries, make_series

logger = logging.getLogger(__name__)

Mapper = Callable[[Callable, Iterable], Iterable]

DEFAULT_BATCHES = 20


@dataclass(frozen=True, eq=False)
class AutocorrEstimate:
    shape: Tuple[int, ...]
    family: str
    beta: float
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    stderrs: np.ndarray = field(repr=False)
    replicas: int
    seed: int
    coupling: str = "uniformized"
    method: str = "mc"

    def to_series(self, label: str = "autocorrelation") -> ScalingSeries:
        return make_series(label, self.times, self.values, self.stderrs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shape": list(self.shape),
            "family": self.family,
            "beta": self.beta,
            "times": [float(t) for t in self.times],
            "values": [float(v) for v in self.values],
            "stderrs": [float(s) for s in self.stderrs],
            "replicas": self.replicas,
            "seed": self.seed,
            "coupling": self.coupling,
            "method": self.method,
        }


@dataclass(frozen=True)
class AutocorrUnit:
    """A contiguous range of replicas, the parallel unit of ``autocorrelation_mc``."""

    shape: Tuple[int, ...]
    family: str
    beta: float
    times: Tuple[float, ...]
    seed: int
    first: int
    count: int
    burn_in: int
    coupling: str


def geometric_time_grid(
    t_max: float, t0: float = 0.1, ratio: float = 1.3, include_zero: bool = True
) -> np.ndarray:
    """t_k = t0·ratio^k up to and including ``t_max``."""
    if t0 <= 0 or ratio <= 1 or t_max < t0:
        raise ValueError("need 0 < t0 <= t_max and ratio > 1")
    count = int(np.floor(np.log(t_max / t0) / np.log(ratio))) + 1
    grid = t0 * ratio ** np.arange(count)
    if grid[-1] < t_max:
        grid = np.append(grid, t_max)
    return np.concatenate([[0.0], grid]) if include_zero else grid


def torus(d: int, L: int, shape: Optional[Sequence[int]] = None) -> Geometry:
    return build_box(shape, "torus") if shape is not None else build_geometry(d, L, "torus")


def run_unit(unit: AutocorrUnit) -> np.ndarray:
    """Overlap curves for the replicas of ``unit``, one row per replica."""
    geom = build_box(unit.shape, "torus")
    bc = BoundaryCondition("periodic")
    model = make_rate_model(unit.family, unit.beta, geom.dimension)
    grid = np.asarray(unit.times)
    out = np.empty((unit.count, len(grid)))
    for k in range(unit.count):
        replica = unit.first + k
        sampler = EquilibriumSampler(
            geom, bc, unit.beta, "wolff", seed=unit.seed, index=replica, burn_in=unit.burn_in
        )
        start = sampler.draw(1)[0]
        rng = stream(unit.seed, "glauber", replica)
        out[k] = simulate_overlap(model, geom, bc, start, grid, rng, unit.coupling)
    return out


def plan_units(
    shape: Tuple[int, ...],
    family: str,
    beta: float,
    times: np.ndarray,
    replicas: int,
    seed: int,
    burn_in: int = 200,
    coupling: str = "uniformized",
    unit_size: int = 50,
) -> List[AutocorrUnit]:
    units = []
    for first in range(0, replicas, unit_size):
        units.append(
            AutocorrUnit(
                shape=tuple(shape),
                family=family,
                beta=float(beta),
                times=tuple(float(t) for t in times),
                seed=seed,
                first=first,
                count=min(unit_size, replicas - first),
                burn_in=burn_in,
                coupling=coupling,
            )
        )
    return units


def replica_stderr(curves: np.ndarray, n_batches: int = DEFAULT_BATCHES) -> np.ndarray:
    """Batch-means stderr across independent replicas (batch size 1 when few)."""
    r = curves.shape[0]
    if r >= 2 * n_batches:
        usable = r - r % n_batches
        means = curves[:usable].reshape(n_batches, -1, curves.shape[1]).mean(axis=1)
        return means.std(axis=0, ddof=1) / np.sqrt(n_batches)
    return curves.std(axis=0, ddof=1) / np.sqrt(r)


def merge_units(units: Sequence[AutocorrUnit], results: Sequence[np.ndarray]) -> AutocorrEstimate:
    curves = np.concatenate(list(results), axis=0)
    head = units[0]
    return AutocorrEstimate(
        shape=head.shape,
        family=head.family,
        beta=head.beta,
        times=np.asarray(head.times),
        values=curves.mean(axis=0),
        stderrs=replica_stderr(curves),
        replicas=curves.shape[0],
        seed=head.seed,
        coupling=head.coupling,
    )


def autocorrelation_mc(
    d: int,
    L: int,
    family: str,
    t_grid: Sequence[float],
    replicas: int,
    seed: int = 0,
    beta: Optional[float] = None,
    shape: Optional[Sequence[int]] = None,
    burn_in: int = 200,
    coupling: str = "uniformized",
    mapper: Mapper = map,
) -> AutocorrEstimate:
    """Monte Carlo estimate of ⟨σ₀, P_tσ₀⟩ on the torus of side 2L (or ``shape``).

    Args:
        d: Dimension.
        L: Torus parameter (side 2L); ignored when ``shape`` is given.
        family: Rate family name.
        t_grid: Sorted nonnegative times.
        replicas: Number of independent replicas, at least 2.
        seed: Master seed.
        beta: Inverse temperature, β_c(d) by default.
        mapper: ``map``-like callable used to run the replica units.
    """
    if replicas < 2:
        raise ValueError("replicas >= 2 required for stderr")
    times = np.asarray(t_grid, dtype=float)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("the time grid must be sorted and nonnegative")
    geom = torus(d, L, shape)
    beta = beta_critical(geom.dimension) if beta is None else beta
    units = plan_units(geom.shape, family, beta, times, replicas, seed, burn_in, coupling)
    est = merge_units(units, list(mapper(run_unit, units)))
    logger.info(f"Autocorrelation {geom.label()} {family}: {replicas} replicas, {len(times)} times")
    return est


def exact_autocorrelation(
    d: int,
    L: int,
    family: str,
    t_grid: Sequence[float],
    beta: Optional[float] = None,
    shape: Optional[Sequence[int]] = None,
) -> AutocorrEstimate:
    """⟨σ₀, P_tσ₀⟩ from the exact semigroup."""
    geom = torus(d, L, shape)
    beta = beta_critical(geom.dimension) if beta is None else beta
    bundle = build_generator(geom, BoundaryCondition("periodic"), beta, family)
    times = np.asarray(t_grid, dtype=float)
    values = autocorrelation_exact(bundle, 0, times)
    return AutocorrEstimate(
        shape=geom.shape,
        family=family,
        beta=beta,
        times=times,
        values=values,
        stderrs=np.zeros_like(values),
        replicas=0,
        seed=0,
        method="exact",
    )


def autocorrelation_checks(est: AutocorrEstimate, z: float = 4.0) -> List[InequalityReport]:
    """Positivity and monotonicity of Ĉ(t) within ``z`` standard errors."""
    v, s = est.values, est.stderrs
    inputs = est.to_dict()
    low = int(np.argmin(v + z * s))
    reports = [
        make_report(
            "autocorrelation_positive",
            -v[low],
            z * s[low],
            atol=1e-12,
            inputs=inputs,
            t=float(est.times[low]),
        )
    ]
    if len(v) > 1:
        rise = v[1:] - v[:-1]
        combined = z * np.sqrt(s[1:] ** 2 + s[:-1] ** 2)
        k = int(np.argmax(rise - combined))
        reports.append(
            make_report(
                "autocorrelation_monotone",
                rise[k],
                combined[k],
                atol=1e-12,
                inputs=inputs,
                t=float(est.times[k + 1]),
            )
        )
    return reports


def oracle_agreement(
    mc: AutocorrEstimate, exact: AutocorrEstimate, z: float = 4.0
) -> InequalityReport:
    """Largest pointwise deviation |Ĉ − C| against z·stderr."""
    if not np.allclose(mc.times, exact.times):
        raise ValueError("estimates use different time grids")
    dev = np.abs(mc.values - exact.values)
    bound = z * mc.stderrs
    k = int(np.argmax(dev - bound))
    return make_report(
        "autocorrelation_oracle",
        dev[k],
        bound[k],
        atol=1e-12,
        inputs={"mc": mc.to_dict(), "exact": exact.to_dict()},
        t=float(mc.times[k]),
    )
