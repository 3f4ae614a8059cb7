import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Tuple, Union

import numpy as np
from scipy import linalg, sparse

from ...errors import CapacityError
from ..constants import (DENSE_EIG_MAX_SITES, DETAILED_BALANCE_TOL, GENERATOR_MAX_SITES,
                         ROW_SUM_TOL, STATIONARITY_TOL)
from ..gibbs import BoundaryCondition, ExactMeasure, enumerate_measure
from ..glauber import RateModel, make_rate_model
from ..lattice import Geometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DenseGeneratorBundle:
    """Exact generator 𝓛 of the dynamics on all 2ⁿ states.

    ``generator`` is a CSR matrix whose row σ holds c(x, σ) at column σ^x and
    minus the total rate on the diagonal. ``rates[σ, x]`` keeps c(x, σ) for
    the local form of the Dirichlet form.
    """

    measure: ExactMeasure
    model: RateModel
    generator: sparse.csr_matrix = field(repr=False)
    rates: np.ndarray = field(repr=False)

    @property
    def geometry(self) -> Geometry:
        return self.measure.geometry

    @property
    def bc(self) -> BoundaryCondition:
        return self.measure.bc

    @property
    def beta(self) -> float:
        return self.measure.beta

    @property
    def pi(self) -> np.ndarray:
        return self.measure.probs

    @property
    def n_sites(self) -> int:
        return self.measure.n_sites

    @property
    def n_states(self) -> int:
        return self.measure.n_states

    @cached_property
    def sqrt_pi(self) -> np.ndarray:
        return np.sqrt(self.pi)

    @cached_property
    def symmetrized(self) -> sparse.csr_matrix:
        """S = Π^{1/2} 𝓛 Π^{−1/2}, symmetric because the chain is reversible."""
        d = sparse.diags(self.sqrt_pi)
        d_inv = sparse.diags(1.0 / self.sqrt_pi)
        s = (d @ self.generator @ d_inv).tocsr()
        return ((s + s.T) * 0.5).tocsr()

    @cached_property
    def energy_matrix(self) -> sparse.csr_matrix:
        """W = −Π𝓛, so that D(f) = fᵀ W f."""
        w = -(sparse.diags(self.pi) @ self.generator)
        return ((w + w.T) * 0.5).tocsr()

    @cached_property
    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and orthonormal eigenvectors of −S."""
        if self.n_sites > DENSE_EIG_MAX_SITES:
            raise CapacityError("dense eigensolve states", self.n_states, 2**DENSE_EIG_MAX_SITES)
        evals, evecs = linalg.eigh(-self.symmetrized.toarray())
        return np.maximum(evals, 0.0), evecs

    def invariants(self) -> Dict[str, float]:
        """Largest violation of each structural invariant."""
        gen = self.generator
        row_sum = float(np.abs(np.asarray(gen.sum(axis=1)).ravel()).max())
        off = gen - sparse.diags(gen.diagonal())
        min_off = float(off.data.min()) if off.nnz else 0.0
        flux = sparse.diags(self.pi) @ gen
        asym = abs(flux - flux.T)
        reversibility = float(asym.max()) if asym.nnz else 0.0
        stationarity = float(np.abs(self.pi @ gen).max())
        return {
            "row_sum": row_sum,
            "min_off_diagonal": min_off,
            "reversibility": reversibility,
            "stationarity": stationarity,
        }

    def invariants_hold(self) -> bool:
        inv = self.invariants()
        return (
            inv["row_sum"] <= ROW_SUM_TOL * max(1.0, self.model.c_max * self.n_sites)
            and inv["min_off_diagonal"] >= 0.0
            and inv["reversibility"] <= DETAILED_BALANCE_TOL
            and inv["stationarity"] <= STATIONARITY_TOL
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n_sites,
            "geometry": self.geometry.to_dict(),
            "bc": self.bc.to_dict(),
            "beta": self.beta,
            "family": self.model.family,
        }


def state_rates(model: RateModel, measure: ExactMeasure) -> np.ndarray:
    """``(2ⁿ, n)`` table of c(x, σ), built one site at a time."""
    geom, spins = measure.geometry, measure.spins
    field_ = measure.bc.field(geom)
    out = np.empty(spins.shape, dtype=float)
    for x in range(geom.n_sites):
        h = np.full(len(spins), field_[x], dtype=np.int64)
        for y in geom.neighbors[x]:
            if y >= 0:
                h += spins[:, y]
        out[:, x] = model(spins[:, x].astype(np.int64) * h)
    return out


def build_generator(
    geom: Geometry,
    bc: BoundaryCondition,
    beta: float,
    model: Union[str, RateModel],
    max_sites: int = GENERATOR_MAX_SITES,
) -> DenseGeneratorBundle:
    """Assemble 𝓛 for ``model`` at inverse temperature ``beta``.

    Raises:
        CapacityError: When ``geom`` has more than ``max_sites`` sites.
    """
    if geom.n_sites > max_sites:
        raise CapacityError("generator sites", geom.n_sites, max_sites)
    if isinstance(model, str):
        model = make_rate_model(model, beta, geom.dimension)
    elif model.beta != beta:
        raise ValueError(f"rate model built at beta={model.beta}, generator asked for {beta}")
    measure = enumerate_measure(geom, bc, beta, max_sites=max_sites)
    rates = state_rates(model, measure)
    n_states = measure.n_states
    states = np.arange(n_states, dtype=np.int64)
    rows = np.concatenate([states] * geom.n_sites + [states])
    cols = np.concatenate([states ^ (1 << x) for x in range(geom.n_sites)] + [states])
    data = np.concatenate([rates[:, x] for x in range(geom.n_sites)] + [-rates.sum(axis=1)])
    gen = sparse.csr_matrix((data, (rows, cols)), shape=(n_states, n_states))
    rates.setflags(write=False)
    logger.debug(f"Generator {geom.label()} {model.family}: {n_states} states, {gen.nnz} entries")
    return DenseGeneratorBundle(measure=measure, model=model, generator=gen, rates=rates)


def dirichlet_form(b: DenseGeneratorBundle, f: np.ndarray) -> float:
    """D(f) = ½ Σ_x E[c(x, σ)(f(σ^x) − f(σ))²]."""
    f = np.asarray(f, dtype=float)
    if f.shape != (b.n_states,):
        raise ValueError(f"function has shape {f.shape}, expected ({b.n_states},)")
    states = np.arange(b.n_states, dtype=np.int64)
    total = 0.0
    for x in range(b.n_sites):
        grad = f[states ^ (1 << x)] - f
        total += float(b.pi @ (b.rates[:, x] * grad * grad))
    return 0.5 * total


def dirichlet_form_direct(b: DenseGeneratorBundle, f: np.ndarray) -> float:
    """D(f) = −E[f · 𝓛f]."""
    f = np.asarray(f, dtype=float)
    return float(-(b.pi @ (f * (b.generator @ f))))


def dirichlet_forms(b: DenseGeneratorBundle, fs: np.ndarray) -> np.ndarray:
    """D for every column of ``fs`` at once."""
    return np.einsum("ij,ij->j", fs, b.energy_matrix @ fs)
