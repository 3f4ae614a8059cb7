import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from ...errors import BudgetError, CapacityError
from ..constants import ENUMERATION_MAX_SITES
from ..lattice import Geometry, build_geometry
from .boundary import BoundaryCondition
from .kernels import local_field_all
from .measure import beta_critical, enumerate_measure
from .sampler import EquilibriumSampler

logger = logging.getLogger(__name__)

DEFAULT_BATCHES = 20
METHODS = ("exact", "mc")


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n_samples: int
    method: str

    def to_record(self, observable: str, **meta: Any) -> Dict[str, Any]:
        record = {"observable": observable}
        record.update(meta)
        record.update(asdict(self))
        return record


def batch_means(samples: np.ndarray, n_batches: int = DEFAULT_BATCHES) -> Estimate:
    """Mean and stderr from contiguous batch means."""
    samples = np.asarray(samples, dtype=float)
    if len(samples) < 2 * n_batches:
        raise BudgetError(f"{len(samples)} samples is too few for {n_batches} batches")
    usable = len(samples) - len(samples) % n_batches
    means = samples[:usable].reshape(n_batches, -1).mean(axis=1)
    return Estimate(
        value=float(means.mean()),
        stderr=float(means.std(ddof=1) / np.sqrt(n_batches)),
        n_samples=int(usable),
        method="mc",
    )


def _require_budget(budget: Optional[int]) -> int:
    if budget is None or budget < 2 * DEFAULT_BATCHES:
        raise BudgetError(f"Monte Carlo budget {budget} below minimum {2 * DEFAULT_BATCHES}")
    return int(budget)


def site_means_mc(sampler: EquilibriumSampler, budget: int) -> np.ndarray:
    """``(budget, n)`` per-draw improved estimates tanh(β h_x) of ⟨σ_x⟩."""
    draws = sampler.draw(budget)
    field = sampler.bc.field(sampler.geometry)
    out = np.empty(draws.shape, dtype=float)
    for k, config in enumerate(draws):
        out[k] = np.tanh(sampler.beta * local_field_all(config, sampler.geometry.neighbors, field))
    return out


def magnetization_plus(
    L: int,
    d: int = 2,
    method: str = "exact",
    budget: Optional[int] = None,
    beta: Optional[float] = None,
    seed: int = 0,
) -> Estimate:
    """⟨σ₀⟩⁺ on Λ_L, exactly or by Wolff sampling with frozen plus boundary.

    Args:
        L: Cube side parameter.
        d: Dimension.
        method: ``"exact"`` (needs (2L+1)^d ≤ 20 sites) or ``"mc"``.
        budget: Number of Monte Carlo draws.
        beta: Inverse temperature, β_c(d) by default.
        seed: Master seed.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}'")
    beta = beta_critical(d) if beta is None else beta
    geom = build_geometry(d, L, "cube")
    bc = BoundaryCondition("plus")
    if method == "exact":
        if geom.n_sites > ENUMERATION_MAX_SITES:
            raise CapacityError("sites", geom.n_sites, ENUMERATION_MAX_SITES)
        m = enumerate_measure(geom, bc, beta)
        return Estimate(m.magnetization(geom.origin), 0.0, m.n_states, "exact")
    sampler = EquilibriumSampler(geom, bc, beta, "wolff", seed=seed, index=L)
    per_draw = site_means_mc(sampler, _require_budget(budget))[:, geom.origin]
    est = batch_means(per_draw)
    logger.debug(f"<s0>+ L={L} d={d}: {est.value:.6f} +- {est.stderr:.2e}")
    return est


def two_point(
    geom: Geometry,
    bc: BoundaryCondition,
    x: int,
    y: int,
    method: str = "exact",
    budget: Optional[int] = None,
    beta: Optional[float] = None,
    seed: int = 0,
) -> Estimate:
    """⟨σ_xσ_y⟩ under μ_Λ^ω."""
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}'")
    for site in (x, y):
        if not 0 <= site < geom.n_sites:
            raise ValueError(f"site {site} outside geometry with {geom.n_sites} sites")
    beta = beta_critical(geom.dimension) if beta is None else beta
    if x == y:
        return Estimate(1.0, 0.0, 0, method)
    if method == "exact":
        m = enumerate_measure(geom, bc, beta)
        return Estimate(m.correlation(x, y), 0.0, m.n_states, "exact")
    sampler = EquilibriumSampler(geom, bc, beta, "wolff", seed=seed)
    draws = sampler.draw(_require_budget(budget)).astype(float)
    return batch_means(draws[:, x] * draws[:, y])
