"""Conditioning on the grid of a block decomposition.

Functions on the torus are arrays over the 2ⁿ states. Conditional
expectations given the spins on a set of sites group the states by the
masked bit pattern and average with the stationary weights.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from scipy import special

from ...errors import GeometryError
from ..gibbs import ExactMeasure, spin_table
from ..lattice import BlockDecomposition

logger = logging.getLogger(__name__)


def site_mask(sites) -> int:
    mask = 0
    for s in sites:
        mask |= 1 << int(s)
    return mask


def conditional_expectation(probs: np.ndarray, mask: int, f: np.ndarray) -> np.ndarray:
    """E[f | spins on the bits of ``mask``], as a function on states."""
    keys = np.arange(len(probs), dtype=np.int64) & mask
    _, inverse = np.unique(keys, return_inverse=True)
    inverse = inverse.reshape(-1)
    weight = np.bincount(inverse, weights=probs)
    total = np.bincount(inverse, weights=probs * f)
    means = np.divide(total, weight, out=np.zeros_like(total), where=weight > 0)
    return means[inverse]


def conditional_variance(probs: np.ndarray, mask: int, f: np.ndarray) -> np.ndarray:
    """Var[f | spins on the bits of ``mask``] as a function on states."""
    centred = f - conditional_expectation(probs, mask, f)
    return conditional_expectation(probs, mask, centred * centred)


@dataclass(frozen=True)
class BlockTable:
    """Exact law of one block with the grid spins frozen to ω."""

    sites: np.ndarray
    probs: np.ndarray
    log_z: float


@dataclass(frozen=True, eq=False)
class ConditionalStructure:
    """μ(·|ω) on a torus together with its block factorisation.

    ``omega`` lists the grid spins in the order of ``decomposition.grid``.
    """

    measure: ExactMeasure
    decomposition: BlockDecomposition
    omega: np.ndarray = field(repr=False)

    @property
    def grid_mask(self) -> int:
        return site_mask(self.decomposition.grid)

    @property
    def grid_state(self) -> int:
        """Bit pattern of ω on the grid sites."""
        bits = 0
        for site, value in zip(self.decomposition.grid, self.omega):
            if value < 0:
                bits |= 1 << int(site)
        return bits

    @cached_property
    def support(self) -> np.ndarray:
        states = np.arange(self.measure.n_states, dtype=np.int64)
        return (states & self.grid_mask) == self.grid_state

    @cached_property
    def grid_probability(self) -> float:
        return float(self.measure.probs[self.support].sum())

    @cached_property
    def probs(self) -> np.ndarray:
        """The conditional table μ(σ|ω) over all states (zero off the support)."""
        out = np.where(self.support, self.measure.probs, 0.0)
        return out / out.sum()

    def expectation_operator(self, f: np.ndarray) -> np.ndarray:
        """B f = E_μ[f | grid spins]."""
        return conditional_expectation(self.measure.probs, self.grid_mask, f)

    @cached_property
    def block_tables(self) -> List[BlockTable]:
        return [self._block_table(sites) for sites in self.decomposition.blocks]

    def _block_table(self, sites: np.ndarray) -> BlockTable:
        geom = self.measure.geometry
        beta = self.measure.beta
        local = {int(s): k for k, s in enumerate(sites)}
        frozen = dict(zip((int(s) for s in self.decomposition.grid), (int(v) for v in self.omega)))
        field_ = np.zeros(len(sites), dtype=np.int64)
        bonds: List[Tuple[int, int]] = []
        for k, x in enumerate(sites):
            for y in geom.neighbors[x]:
                if y < 0:
                    break
                y = int(y)
                if y in local:
                    if local[y] > k:
                        bonds.append((k, local[y]))
                elif y in frozen:
                    field_[k] += frozen[y]
                else:
                    raise GeometryError(f"block site {x} touches site {y} outside block and grid")
        spins = spin_table(len(sites))
        energy = spins.astype(np.int64) @ field_
        for i, j in bonds:
            energy += spins[:, i].astype(np.int64) * spins[:, j]
        weights = beta * energy.astype(float)
        log_z = float(special.logsumexp(weights))
        return BlockTable(sites=np.asarray(sites), probs=np.exp(weights - log_z), log_z=log_z)

    def product_table(self) -> np.ndarray:
        """⊗_j μ_{Λ^j}^ω spread over the full state space."""
        out = np.zeros(self.measure.n_states)
        states = np.flatnonzero(self.support)
        prob = np.ones(len(states))
        for table in self.block_tables:
            local = np.zeros(len(states), dtype=np.int64)
            for k, site in enumerate(table.sites):
                local |= ((states >> int(site)) & 1) << k
            prob *= table.probs[local]
        out[states] = prob
        return out

    def grid_energy(self) -> float:
        """Σ_{x∼y, both in the grid} ω_x ω_y."""
        grid = set(int(s) for s in self.decomposition.grid)
        values = dict(zip((int(s) for s in self.decomposition.grid), (int(v) for v in self.omega)))
        total = 0
        for i, j in self.measure.geometry.edges:
            if int(i) in grid and int(j) in grid:
                total += values[int(i)] * values[int(j)]
        return float(total)

    def interface_energy(self) -> float:
        """E_{μ(·|ω)}[Σ_{x∈grid, y∉grid, x∼y} (σ_y ω_x − σ_y σ_x)]."""
        grid = set(int(s) for s in self.decomposition.grid)
        values = dict(zip((int(s) for s in self.decomposition.grid), (int(v) for v in self.omega)))
        spins = self.measure.spins
        term = np.zeros(self.measure.n_states)
        for i, j in self.measure.geometry.edges:
            i, j = int(i), int(j)
            if (i in grid) == (j in grid):
                continue
            x, y = (i, j) if i in grid else (j, i)
            term += spins[:, y] * values[x] - spins[:, y].astype(float) * spins[:, x]
        return float(self.probs @ term)


def condition_on_grid(
    measure: ExactMeasure, decomposition: BlockDecomposition, omega: Optional[np.ndarray] = None
) -> ConditionalStructure:
    """Build μ(·|ω); ``omega`` defaults to all plus."""
    if decomposition.geometry is not measure.geometry and (
        decomposition.geometry.shape != measure.geometry.shape
        or decomposition.geometry.kind != measure.geometry.kind
    ):
        raise GeometryError("decomposition and measure live on different geometries")
    grid_size = len(decomposition.grid)
    omega = np.ones(grid_size, dtype=np.int8) if omega is None else np.asarray(omega, dtype=np.int8)
    if omega.shape != (grid_size,) or not np.all(np.abs(omega) == 1):
        raise ValueError(f"omega must be {grid_size} spins of +1/-1")
    return ConditionalStructure(measure=measure, decomposition=decomposition, omega=omega)


def grid_configurations(decomposition: BlockDecomposition) -> np.ndarray:
    """Every ω on the grid, one per row."""
    return spin_table(len(decomposition.grid))
