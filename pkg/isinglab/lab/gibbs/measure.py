import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import optimize, special

from ...errors import NegativeFunctionError
from ..constants import BETA_C_XTOL, ENUMERATION_MAX_SITES, LITERATURE_BETA_C
from ..lattice import Geometry
from .boundary import BoundaryCondition
from .spins import spin_table, validate_config

logger = logging.getLogger(__name__)


def beta_critical(d: int = 2) -> float:
    """Critical inverse temperature.

    For d = 2 this is the self-dual point sinh(2β) = 1, found by bisection.
    Higher dimensions return a literature estimate that nothing asserts on.
    """
    if d == 2:
        return float(
            optimize.bisect(lambda b: np.sinh(2.0 * b) - 1.0, 0.1, 1.0, xtol=BETA_C_XTOL)
        )
    if d in LITERATURE_BETA_C:
        logger.info(f"Using literature estimate beta_c({d}) = {LITERATURE_BETA_C[d]}")
        return LITERATURE_BETA_C[d]
    raise ValueError(f"no critical point known for d = {d}; pass beta explicitly")


def interaction_energy(geom: Geometry, sigma: np.ndarray, bc: BoundaryCondition) -> float:
    """Σ_{x∼y} σ_xσ_y + Σ_{a∼b, b∈∂Λ} σ_a ω_b, without the β factor."""
    s = validate_config(sigma, geom.n_sites).astype(np.int64)
    bulk = int(np.sum(s[geom.edges[:, 0]] * s[geom.edges[:, 1]]))
    return float(bulk + int(s @ bc.field(geom)))


def all_energies(geom: Geometry, bc: BoundaryCondition, spins: np.ndarray) -> np.ndarray:
    energy = spins.astype(np.int32) @ bc.field(geom).astype(np.int32)
    for i, j in geom.edges:
        energy += spins[:, i].astype(np.int32) * spins[:, j]
    return energy


@dataclass(frozen=True, eq=False)
class ExactMeasure:
    """μ_Λ^ω tabulated over every configuration in state order."""

    geometry: Geometry
    bc: BoundaryCondition
    beta: float
    probs: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)
    log_z: float

    @property
    def n_sites(self) -> int:
        return self.geometry.n_sites

    @property
    def n_states(self) -> int:
        return len(self.probs)

    @cached_property
    def spins(self) -> np.ndarray:
        return spin_table(self.n_sites)

    def site(self, x: int) -> np.ndarray:
        """σ_x as a float function on states."""
        return self.spins[:, x].astype(float)

    def expect(self, f: np.ndarray) -> float:
        return float(self.probs @ np.asarray(f, dtype=float))

    def magnetization(self, x: int) -> float:
        return self.expect(self.site(x))

    def correlation(self, x: int, y: int) -> float:
        return self.expect(self.spins[:, x].astype(float) * self.spins[:, y])


def enumerate_measure(
    geom: Geometry,
    bc: BoundaryCondition,
    beta: float,
    max_sites: int = ENUMERATION_MAX_SITES,
) -> ExactMeasure:
    """Exact Gibbs table with log-domain normalisation.

    Raises:
        CapacityError: When ``geom`` has more than ``max_sites`` sites.
        BoundaryConditionError: On an invalid bc/geometry pairing.
    """
    bc.check(geom)
    spins = spin_table(geom.n_sites, max_sites)
    energy = all_energies(geom, bc, spins)
    weights = beta * energy.astype(float)
    log_z = float(special.logsumexp(weights))
    probs = np.exp(weights - log_z)
    for arr in (probs, energy):
        arr.setflags(write=False)
    logger.debug(f"Enumerated {geom.label()} bc={bc.tag} beta={beta}: log Z = {log_z:.12g}")
    return ExactMeasure(geometry=geom, bc=bc, beta=beta, probs=probs, energy=energy, log_z=log_z)


def entropy_terms(h: np.ndarray) -> np.ndarray:
    """h log h − h + 1, accurate near h = 1 and equal to 1 at h = 0."""
    u = np.where(h > 0, h - 1.0, 0.0)
    return np.where(h > 0, h * np.log1p(u) - u, 1.0)


def entropy(probs: np.ndarray, f: np.ndarray) -> float:
    """Ent(f) = E[f log f] − E[f] log E[f] for f ≥ 0.

    Evaluated as m·Σπ(h log h − h + 1) with h = f/m, a sum of nonnegative terms.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise NegativeFunctionError("entropy is defined for nonnegative functions only")
    m = float(probs @ f)
    if m <= 0.0:
        return 0.0
    return float(m * (probs @ entropy_terms(f / m)))


@dataclass(frozen=True)
class ObservableStats:
    mean: float
    variance: float
    covariance: float
    entropy: Optional[float]


def observable_stats(
    m: ExactMeasure, f: np.ndarray, g: Optional[np.ndarray] = None
) -> ObservableStats:
    """Exact mean, variance, cov(f, g) and Ent(f) (``None`` when f takes negative values)."""
    f = np.asarray(f, dtype=float)
    g = f if g is None else np.asarray(g, dtype=float)
    if f.shape != (m.n_states,) or g.shape != (m.n_states,):
        raise ValueError(f"functions must have shape ({m.n_states},)")
    mf, mg = m.expect(f), m.expect(g)
    variance = float(m.probs @ (f - mf) ** 2)
    covariance = float(m.probs @ ((f - mf) * (g - mg)))
    ent = entropy(m.probs, f) if np.all(f >= 0) else None
    return ObservableStats(mean=mf, variance=variance, covariance=covariance, entropy=ent)
