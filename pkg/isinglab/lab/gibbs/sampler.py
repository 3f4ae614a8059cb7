import logging
import math
from typing import Any, Dict, Optional

import numpy as np

from ...errors import BoundaryConditionError
from ..lattice import Geometry
from ..rng import stream
from .boundary import BoundaryCondition
from .kernels import heatbath_sweep, wolff_step

logger = logging.getLogger(__name__)

ALGORITHMS = ("wolff", "heatbath")


class EquilibriumSampler:
    """Stateful Markov chain targeting μ_Λ^ω.

    ``wolff`` alternates one Wolff cluster move (frozen boundary spins stop
    the flip) with one heat-bath sweep; ``heatbath`` does sweeps only. The
    chain for replica ``index`` is driven by the stream
    ``(seed, "equilibrium", index)``.

    Usage:
        sampler = EquilibriumSampler(geom, BoundaryCondition("periodic"), beta, seed=7)
        draws = sampler.draw(1000)
    """

    def __init__(
        self,
        geometry: Geometry,
        bc: BoundaryCondition,
        beta: float,
        algorithm: str = "wolff",
        seed: int = 0,
        index: int = 0,
        burn_in: int = 200,
        thin: int = 1,
        initial: Optional[np.ndarray] = None,
    ):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown sampler algorithm '{algorithm}'")
        if beta < 0:
            raise ValueError(f"beta must be nonnegative, got {beta}")
        try:
            bc.check(geometry)
        except BoundaryConditionError:
            logger.error(f"Sampler refused bc '{bc.tag}' on {geometry.label()}")
            raise
        self.geometry = geometry
        self.bc = bc
        self.beta = float(beta)
        self.algorithm = algorithm
        self.seed = seed
        self.index = index
        self.burn_in = burn_in
        self.thin = max(1, thin)
        self.rng = stream(seed, "equilibrium", index)

        self._field = bc.field(geometry)
        self._omega = bc.boundary_values(geometry)
        self._p_add = 1.0 - math.exp(-2.0 * self.beta)
        if initial is not None:
            self.state = np.asarray(initial, dtype=np.int8).copy()
        elif bc.tag == "plus":
            self.state = np.ones(geometry.n_sites, dtype=np.int8)
        elif bc.tag == "minus":
            self.state = -np.ones(geometry.n_sites, dtype=np.int8)
        else:
            self.state = (1 - 2 * self.rng.integers(0, 2, geometry.n_sites)).astype(np.int8)

        self.sweeps = 0
        self.cluster_moves = 0
        self.cluster_sites = 0
        self.cluster_flips = 0
        self._burned = False

    def step(self):
        if self.algorithm == "wolff":
            size, flipped = wolff_step(
                self.state,
                self.geometry.neighbors,
                self.geometry.boundary_neighbors,
                self._omega,
                self._p_add,
                self.rng,
            )
            self.cluster_moves += 1
            self.cluster_sites += size
            self.cluster_flips += int(flipped)
        heatbath_sweep(self.state, self.geometry.neighbors, self._field, self.beta, self.rng)
        self.sweeps += 1

    def equilibrate(self):
        for _ in range(self.burn_in):
            self.step()
        self._burned = True
        logger.debug(f"Sampler {self.geometry.label()} burned in for {self.burn_in} steps")

    def draw(self, count: int) -> np.ndarray:
        """``(count, n)`` int8 array of configurations, ``thin`` steps apart."""
        if not self._burned:
            self.equilibrate()
        out = np.empty((count, self.geometry.n_sites), dtype=np.int8)
        for k in range(count):
            for _ in range(self.thin):
                self.step()
            out[k] = self.state
        return out

    @property
    def diagnostics(self) -> Dict[str, Any]:
        mean_cluster = self.cluster_sites / self.cluster_moves if self.cluster_moves else 0.0
        return {
            "algorithm": self.algorithm,
            "sweeps": self.sweeps,
            "cluster_moves": self.cluster_moves,
            "mean_cluster_size": mean_cluster,
            "cluster_flip_rate": (
                self.cluster_flips / self.cluster_moves if self.cluster_moves else 0.0
            ),
        }


def sample_equilibrium(sampler: EquilibriumSampler, count: int) -> np.ndarray:
    """Draw ``count`` equilibrium configurations (one per row)."""
    if count < 1:
        raise ValueError("count must be positive")
    return sampler.draw(count)
