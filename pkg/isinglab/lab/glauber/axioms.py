"""Checks of the four rate axioms: bounds, detailed balance, locality and
translation covariance.

Exhaustive on small systems (every configuration, every site); on larger
systems the checks run on random configurations and detailed balance is read
off the local energy change instead of an enumerated table.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..constants import AXIOM_EXHAUSTIVE_MAX_SITES, DETAILED_BALANCE_TOL
from ..gibbs import BoundaryCondition, enumerate_measure, spin_table
from ..lattice import Geometry
from ..rng import stream
from .rates import RateModel, local_fields, rate_table

logger = logging.getLogger(__name__)


@dataclass
class AxiomCheck:
    axiom: str
    passed: bool
    max_violation: float = 0.0
    detail: str = ""


@dataclass
class AxiomReport:
    family: str
    geometry: str
    bc: str
    beta: float
    exhaustive: bool
    observed_min: float
    observed_max: float
    checks: List[AxiomCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, axiom: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "geometry": self.geometry,
            "bc": self.bc,
            "beta": self.beta,
            "exhaustive": self.exhaustive,
            "observed_min": self.observed_min,
            "observed_max": self.observed_max,
            "passed": self.passed,
            "checks": [c.__dict__ for c in self.checks],
        }


def _configurations(n: int, exhaustive: bool, samples: int, seed: int) -> np.ndarray:
    if exhaustive:
        return spin_table(n, AXIOM_EXHAUSTIVE_MAX_SITES)
    rng = stream(seed, "axioms")
    return (1 - 2 * rng.integers(0, 2, size=(samples, n))).astype(np.int8)


def _bounds(model: RateModel, rates: np.ndarray) -> AxiomCheck:
    low = float(model.c_min - rates.min())
    high = float(rates.max() - model.c_max)
    worst = max(low, high, 0.0)
    return AxiomCheck("bounds", worst == 0.0 and model.c_min > 0, worst)


def _detailed_balance_exact(
    model: RateModel, geom: Geometry, bc: BoundaryCondition, spins: np.ndarray, rates: np.ndarray
) -> AxiomCheck:
    mu = enumerate_measure(geom, bc, model.beta).probs
    states = np.arange(len(spins))
    worst = 0.0
    for x in range(geom.n_sites):
        flipped = states ^ (1 << x)
        lhs = mu * rates[:, x]
        rhs = mu[flipped] * rates[flipped, x]
        rel = np.abs(lhs - rhs) / np.maximum(np.maximum(lhs, rhs), np.finfo(float).tiny)
        worst = max(worst, float(rel.max()))
    return AxiomCheck(
        "detailed_balance", worst <= DETAILED_BALANCE_TOL, worst, "against enumeration"
    )


def _detailed_balance_local(
    model: RateModel, geom: Geometry, bc: BoundaryCondition, spins: np.ndarray, rates: np.ndarray
) -> AxiomCheck:
    h = local_fields(geom, bc, spins)
    p = spins.astype(np.int64) * h
    # μ(σ^x)/μ(σ) = exp(−2β σ_x h_x) and c(x, σ^x) = c at −p
    expected = np.exp(-2.0 * model.beta * p)
    ratio = rates / model(-p)
    worst = float(np.max(np.abs(ratio - expected) / expected))
    return AxiomCheck(
        "detailed_balance", worst <= DETAILED_BALANCE_TOL, worst, "local energy ratio"
    )


def _locality(
    model: RateModel, geom: Geometry, bc: BoundaryCondition, spins: np.ndarray, rates: np.ndarray
) -> AxiomCheck:
    worst = 0.0
    for z in range(geom.n_sites):
        flipped = spins.copy()
        flipped[:, z] = -flipped[:, z]
        moved = rate_table(model, geom, bc, flipped)
        near = set(int(y) for y in geom.neighbors[z] if y >= 0) | {z}
        far = [x for x in range(geom.n_sites) if x not in near]
        if far:
            worst = max(worst, float(np.abs(moved[:, far] - rates[:, far]).max()))
    return AxiomCheck("locality", worst == 0.0, worst)


def _translation(
    model: RateModel, geom: Geometry, bc: BoundaryCondition, spins: np.ndarray, rates: np.ndarray
) -> AxiomCheck:
    if not geom.is_torus:
        return AxiomCheck("translation", True, 0.0, "not applicable off the torus")
    worst = 0.0
    for k in np.ndindex(*geom.shape):
        perm = geom.translation(k)
        shifted = np.empty_like(spins)
        shifted[:, perm] = spins
        moved = rate_table(model, geom, bc, shifted)
        worst = max(worst, float(np.abs(moved[:, perm] - rates).max()))
    return AxiomCheck("translation", worst == 0.0, worst, f"{int(np.prod(geom.shape))} shifts")


def verify_rate_axioms(
    model: RateModel,
    geom: Geometry,
    bc: BoundaryCondition,
    exhaustive: Optional[bool] = None,
    samples: int = 2000,
    seed: int = 0,
) -> AxiomReport:
    """Check the rate axioms for ``model`` on ``geom`` with boundary ``bc``.

    Failures are report entries, never exceptions.
    """
    bc.check(geom)
    if exhaustive is None:
        exhaustive = geom.n_sites <= AXIOM_EXHAUSTIVE_MAX_SITES
    spins = _configurations(geom.n_sites, exhaustive, samples, seed)
    rates = rate_table(model, geom, bc, spins)

    report = AxiomReport(
        family=model.family,
        geometry=geom.label(),
        bc=bc.tag,
        beta=model.beta,
        exhaustive=exhaustive,
        observed_min=float(rates.min()),
        observed_max=float(rates.max()),
    )
    report.checks.append(_bounds(model, rates))
    balance = _detailed_balance_exact if exhaustive else _detailed_balance_local
    report.checks.append(balance(model, geom, bc, spins, rates))
    report.checks.append(_locality(model, geom, bc, spins, rates))
    report.checks.append(_translation(model, geom, bc, spins, rates))

    for c in report.checks:
        if not c.passed:
            logger.warning(
                f"Axiom '{c.axiom}' failed for {model.family} on {geom.label()}: "
                f"{c.max_violation:.3e}"
            )
    return report
