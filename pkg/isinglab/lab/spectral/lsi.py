"""Upper estimates of the log-Sobolev constant.

γ is the largest constant with Ent(F) ≤ (2/γ) D(√F). Any F with Ent(F) > 0
gives the upper bound 2D(√F)/Ent(F); the search below minimises that ratio
over several candidate families and keeps refining until a round brings no
improvement beyond ``refine_tol``. The result is an estimate, never a
certified bound.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy import optimize

from ...errors import CapacityError, SolverError
from ..constants import LSI_CERTIFICATE_TOL, LSI_MAX_SITES, LSI_REFINE_TOL
from ..gibbs import entropy, entropy_terms
from ..rng import stream
from .gap import low_modes
from .generator import DenseGeneratorBundle, dirichlet_form

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LsiSearchConfig:
    restarts: int = 8
    random_candidates: int = 10_000
    low_modes: int = 4
    linearization_eps: float = 1e-4
    indicator_amplitudes: Tuple[float, ...] = (-0.9, -0.5, 0.5, 1.0, 10.0, 100.0, 1000.0)
    lognormal_scales: Tuple[float, ...] = (0.1, 0.5, 1.0, 2.0, 4.0)
    max_rounds: int = 10
    refine_tol: float = LSI_REFINE_TOL
    maxiter: int = 500
    batch: int = 512
    seed: int = 0


@dataclass(frozen=True, eq=False)
class LsiEstimate:
    gamma_hat: float
    certificate: np.ndarray = field(repr=False)
    entropy: float = 0.0
    dirichlet: float = 0.0
    source: str = ""
    iterations: int = 0
    restarts: int = 0
    rounds: int = 0
    candidates: int = 0

    def check(self, b: DenseGeneratorBundle) -> bool:
        """γ̂ = 2D(√F*)/Ent(F*) recomputed from the certificate."""
        ent = entropy(b.pi, self.certificate)
        dir_ = dirichlet_form(b, np.sqrt(self.certificate))
        return ent > 0 and abs(2.0 * dir_ / ent - self.gamma_hat) <= LSI_CERTIFICATE_TOL * max(
            1.0, self.gamma_hat
        )


class _Search:
    """Book-keeping for the best ratio seen so far."""

    def __init__(self, b: DenseGeneratorBundle, cfg: LsiSearchConfig):
        self.b = b
        self.cfg = cfg
        self.best = np.inf
        self.best_F: np.ndarray = np.ones(b.n_states)
        self.best_source = ""
        self.evaluated = 0
        self.iterations = 0
        self.restarts = 0

    def ratios(self, Fs: np.ndarray) -> np.ndarray:
        """2D(√F)/Ent(F) for every column of ``Fs`` (inf where Ent = 0)."""
        pi = self.b.pi
        g = np.sqrt(Fs)
        dir_ = np.einsum("ij,ij->j", g, self.b.energy_matrix @ g)
        m = pi @ Fs
        safe_m = np.where(m > 0, m, 1.0)
        ent = m * (pi @ entropy_terms(Fs / safe_m))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(ent > 0, 2.0 * dir_ / ent, np.inf)
        return out

    def offer(self, Fs: np.ndarray, source: str) -> float:
        if Fs.ndim == 1:
            Fs = Fs[:, None]
        self.evaluated += Fs.shape[1]
        r = self.ratios(Fs)
        k = int(np.argmin(r))
        if r[k] < self.best:
            self.best = float(r[k])
            self.best_F = Fs[:, k].copy()
            self.best_source = source
        return float(r[k])

    def objective(self, g: np.ndarray) -> Tuple[float, np.ndarray]:
        pi, w = self.b.pi, self.b.energy_matrix
        F = g * g
        m = float(pi @ F)
        wg = w @ g
        dir_ = float(g @ wg)
        ent = m * float(pi @ entropy_terms(F / m)) if m > 0 else 0.0
        if ent <= 1e-300:
            return 1e6, np.zeros_like(g)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_term = np.where(g != 0, np.log(F / m), 0.0)
        d_ent = 2.0 * pi * g * log_term
        d_dir = 2.0 * wg
        value = 2.0 * dir_ / ent
        grad = 2.0 * (d_dir * ent - dir_ * d_ent) / ent**2
        return value, grad

    def optimize_from(self, g0: np.ndarray, source: str):
        res = optimize.minimize(
            self.objective,
            g0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.cfg.maxiter},
        )
        self.iterations += int(res.nit)
        self.restarts += 1
        g = np.abs(res.x)
        self.offer(g * g, source)


def _linearization(b: DenseGeneratorBundle, cfg: LsiSearchConfig) -> np.ndarray:
    _, modes = low_modes(b, cfg.low_modes)
    cols = []
    for phi in modes.T:
        phi = phi / np.abs(phi).max()
        for sign in (1.0, -1.0):
            cols.append(1.0 + sign * cfg.linearization_eps * phi)
    return np.stack(cols, axis=1)


def _indicator_sets(b: DenseGeneratorBundle) -> List[np.ndarray]:
    spins = b.measure.spins
    sets = [spins[:, x] > 0 for x in range(b.n_sites)]
    magnet = spins.sum(axis=1)
    sets.append(magnet > 0)
    sets.append(magnet < 0)
    sets.append(np.arange(b.n_states) == 0)
    sets.append(np.arange(b.n_states) == b.n_states - 1)
    sets.append(np.arange(b.n_states) == int(np.argmax(b.pi)))
    sets.append(np.arange(b.n_states) == int(np.argmin(b.pi)))
    return sets


def _indicators(b: DenseGeneratorBundle, cfg: LsiSearchConfig) -> np.ndarray:
    cols = [
        1.0 + a * mask.astype(float)
        for mask in _indicator_sets(b)
        for a in cfg.indicator_amplitudes
    ]
    return np.stack(cols, axis=1)


def _random_lognormal(rng: np.random.Generator, b: DenseGeneratorBundle, count: int,
                      scales: Tuple[float, ...]) -> np.ndarray:
    scale = rng.choice(np.asarray(scales), size=count)
    return np.exp(rng.standard_normal((b.n_states, count)) * scale)


def lsi_constant(b: DenseGeneratorBundle, cfg: LsiSearchConfig = LsiSearchConfig()) -> LsiEstimate:
    """Estimate γ from above by searching for a nearly extremal F.

    Raises:
        CapacityError: Above 2¹² states.
        SolverError: If no candidate has positive entropy.
    """
    if b.n_sites > LSI_MAX_SITES:
        raise CapacityError("LSI sites", b.n_sites, LSI_MAX_SITES)
    search = _Search(b, cfg)
    if b.n_states > 1:
        search.offer(_linearization(b, cfg), "linearization")
    search.offer(_indicators(b, cfg), "indicator")

    rng = stream(cfg.seed, "lsi", 0)
    for start in range(0, cfg.random_candidates, cfg.batch):
        count = min(cfg.batch, cfg.random_candidates - start)
        search.offer(_random_lognormal(rng, b, count, cfg.lognormal_scales), "random")

    for _ in range(cfg.restarts):
        g0 = np.sqrt(_random_lognormal(rng, b, 1, cfg.lognormal_scales)[:, 0])
        search.optimize_from(g0, "optimizer")
    if np.isfinite(search.best):
        search.optimize_from(np.sqrt(search.best_F), "optimizer")

    rounds = 1
    while rounds < cfg.max_rounds and np.isfinite(search.best):
        before = search.best
        rng = stream(cfg.seed, "lsi", rounds)
        base = np.sqrt(search.best_F)
        for _ in range(cfg.restarts):
            jitter = np.exp(0.1 * rng.standard_normal(b.n_states))
            search.optimize_from(base * jitter, "refinement")
        count = max(1, cfg.random_candidates // 10)
        search.offer(_random_lognormal(rng, b, count, cfg.lognormal_scales), "random")
        rounds += 1
        logger.info(f"LSI refinement round {rounds}: gamma_hat {before:.10g} -> {search.best:.10g}")
        if before - search.best <= cfg.refine_tol:
            break

    if not np.isfinite(search.best):
        raise SolverError("no candidate with positive entropy was found")
    F = search.best_F / float(b.pi @ search.best_F)
    ent = entropy(b.pi, F)
    dir_ = dirichlet_form(b, np.sqrt(F))
    return LsiEstimate(
        gamma_hat=2.0 * dir_ / ent,
        certificate=F,
        entropy=ent,
        dirichlet=dir_,
        source=search.best_source,
        iterations=search.iterations,
        restarts=search.restarts,
        rounds=rounds,
        candidates=search.evaluated,
    )


def lsi_summary(est: LsiEstimate) -> Dict[str, float]:
    return {
        "gamma_hat": est.gamma_hat,
        "entropy": est.entropy,
        "dirichlet": est.dirichlet,
        "rounds": est.rounds,
        "candidates": est.candidates,
    }
