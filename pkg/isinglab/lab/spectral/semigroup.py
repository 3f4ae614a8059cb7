"""The semigroup P_t = exp(t𝓛) and curves along it.

Up to 2¹⁴ states P_t f is read off the eigendecomposition of the symmetrised
generator; beyond that ``scipy.sparse.linalg.expm_multiply`` acts on f.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import linalg as splinalg

from ...errors import CapacityError
from ..constants import SEMIGROUP_DENSE_MAX_SITES, SEMIGROUP_MAX_SITES
from ..gibbs import entropy
from .generator import DenseGeneratorBundle, dirichlet_form

logger = logging.getLogger(__name__)


def _check_size(b: DenseGeneratorBundle):
    if b.n_sites > SEMIGROUP_MAX_SITES:
        raise CapacityError("semigroup sites", b.n_sites, SEMIGROUP_MAX_SITES)


def semigroup_apply(b: DenseGeneratorBundle, f: np.ndarray, t: float) -> np.ndarray:
    """P_t f for t ≥ 0."""
    if t < 0:
        raise ValueError(f"semigroup time must be nonnegative, got {t}")
    _check_size(b)
    f = np.asarray(f, dtype=float)
    if f.shape != (b.n_states,):
        raise ValueError(f"function has shape {f.shape}, expected ({b.n_states},)")
    if t == 0:
        return f.copy()
    if b.n_sites <= SEMIGROUP_DENSE_MAX_SITES:
        evals, evecs = b.eigensystem
        coeffs = evecs.T @ (b.sqrt_pi * f)
        return (evecs @ (np.exp(-evals * t) * coeffs)) / b.sqrt_pi
    return splinalg.expm_multiply(b.generator * t, f)


def spectral_measure(b: DenseGeneratorBundle, f: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues λ_k of −𝓛 and weights w_k with ⟨f, P_t f⟩_π = Σ w_k e^{−λ_k t}."""
    evals, evecs = b.eigensystem
    coeffs = evecs.T @ (b.sqrt_pi * np.asarray(f, dtype=float))
    return evals, coeffs**2


def correlation_curve(
    b: DenseGeneratorBundle,
    f: np.ndarray,
    times: Sequence[float],
    g: Optional[np.ndarray] = None,
) -> np.ndarray:
    """⟨g, P_t f⟩_π on a time grid (``g = f`` by default)."""
    times = np.asarray(times, dtype=float)
    f = np.asarray(f, dtype=float)
    g = f if g is None else np.asarray(g, dtype=float)
    if b.n_sites <= SEMIGROUP_DENSE_MAX_SITES:
        evals, evecs = b.eigensystem
        cf = evecs.T @ (b.sqrt_pi * f)
        cg = evecs.T @ (b.sqrt_pi * g)
        return np.exp(-np.outer(times, evals)) @ (cf * cg)
    return np.array([b.pi @ (g * semigroup_apply(b, f, t)) for t in times])


def autocorrelation_exact(b: DenseGeneratorBundle, x: int, times: Sequence[float]) -> np.ndarray:
    """⟨σ_x, P_t σ_x⟩ under the stationary measure."""
    return correlation_curve(b, b.measure.site(x), times)


def decay_rate(b: DenseGeneratorBundle, f: np.ndarray, threshold: float = 1e-14) -> float:
    """Smallest positive eigenvalue carrying weight in the spectral measure of f.

    This is the asymptotic slope of −log⟨f, P_t f⟩ for a centred f.
    """
    evals, weights = spectral_measure(b, f)
    total = weights.sum()
    live = (weights > threshold * max(total, 1.0)) & (evals > 1e-12)
    if not np.any(live):
        return float("inf")
    return float(evals[live].min())


def entropy_curve(b: DenseGeneratorBundle, F: np.ndarray, times: Sequence[float]) -> np.ndarray:
    return np.array([entropy(b.pi, np.maximum(semigroup_apply(b, F, t), 0.0)) for t in times])


def dirichlet_sqrt_curve(
    b: DenseGeneratorBundle, F: np.ndarray, times: Sequence[float]
) -> np.ndarray:
    """D(√(P_t F)) on a time grid."""
    return np.array(
        [dirichlet_form(b, np.sqrt(np.maximum(semigroup_apply(b, F, t), 0.0))) for t in times]
    )
