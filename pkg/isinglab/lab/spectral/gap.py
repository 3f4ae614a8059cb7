import logging
from typing import Optional, Tuple

import numpy as np
from scipy.sparse import linalg as splinalg

from ...errors import CapacityError, SolverError
from ..constants import DENSE_EIG_MAX_SITES, INEQUALITY_RTOL, SPARSE_GAP_MAX_SITES
from ..report import InequalityReport, make_report
from ..rng import stream
from .generator import DenseGeneratorBundle, dirichlet_forms

logger = logging.getLogger(__name__)

METHODS = ("auto", "dense", "sparse", "power")


def _deflated_operator(b: DenseGeneratorBundle, shift: float) -> splinalg.LinearOperator:
    """−S + shift·vvᵀ with v = √π, which moves the zero mode to ``shift``."""
    s = b.symmetrized
    v = b.sqrt_pi

    def matvec(x):
        x = np.asarray(x).ravel()
        return -(s @ x) + shift * v * (v @ x)

    return splinalg.LinearOperator(s.shape, matvec=matvec, rmatvec=matvec, dtype=float)


def _sparse_gap(b: DenseGeneratorBundle) -> float:
    shift = 2.0 * b.n_sites * b.model.c_max
    op = _deflated_operator(b, shift)
    try:
        evals = splinalg.eigsh(op, k=1, which="SA", tol=1e-13, maxiter=100 * b.n_states,
                               return_eigenvectors=False)
    except splinalg.ArpackNoConvergence as e:
        raise SolverError(f"sparse eigensolver did not converge: {e}") from e
    return float(evals[0])


def _power_gap(b: DenseGeneratorBundle, tol: float = 1e-13, max_iter: int = 500_000,
               seed: int = 0) -> float:
    """Power iteration on cI + S restricted to the complement of √π."""
    s = b.symmetrized
    v = b.sqrt_pi
    c = 2.0 * b.n_sites * b.model.c_max
    x = stream(seed, "power-iteration").standard_normal(b.n_states)
    x -= v * (v @ x)
    x /= np.linalg.norm(x)
    rayleigh = np.inf
    for it in range(max_iter):
        y = c * x + s @ x
        y -= v * (v @ y)
        new = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            raise SolverError("power iteration collapsed to zero")
        x = y / norm
        if abs(new - rayleigh) <= tol * c:
            logger.debug(f"Power iteration converged after {it} steps")
            return c - new
        rayleigh = new
    raise SolverError(f"power iteration did not converge in {max_iter} steps")


def spectral_gap(b: DenseGeneratorBundle, method: str = "auto") -> float:
    """Smallest nonzero eigenvalue of −𝓛 in L²(π).

    Args:
        b: Generator bundle.
        method: ``"dense"`` (full eigendecomposition, ≤ 14 sites), ``"sparse"``
            (ARPACK on the deflated symmetrised generator, ≤ 20 sites),
            ``"power"`` (power iteration, used as a cross-check) or ``"auto"``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown gap method '{method}'")
    if b.n_states == 1:
        raise SolverError("a single-state chain has no spectral gap")
    if method == "auto":
        method = "dense" if b.n_sites <= DENSE_EIG_MAX_SITES else "sparse"
    if method == "dense":
        evals, _ = b.eigensystem
        return float(evals[1])
    if b.n_sites > SPARSE_GAP_MAX_SITES:
        raise CapacityError("gap sites", b.n_sites, SPARSE_GAP_MAX_SITES)
    if method == "sparse":
        if b.n_states <= 4:
            return spectral_gap(b, "dense")
        return _sparse_gap(b)
    return _power_gap(b)


def low_modes(b: DenseGeneratorBundle, k: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """The ``k`` smallest nonzero eigenvalues of −𝓛 and their eigenfunctions.

    Eigenfunctions are returned in the original basis (f = Π^{−1/2}ψ), one per
    column, normalised in L²(π).
    """
    k = min(k, b.n_states - 1)
    if b.n_sites <= DENSE_EIG_MAX_SITES:
        evals, evecs = b.eigensystem
        lam, psi = evals[1 : k + 1], evecs[:, 1 : k + 1]
    else:
        shift = 2.0 * b.n_sites * b.model.c_max
        lam, psi = splinalg.eigsh(_deflated_operator(b, shift), k=k, which="SA", tol=1e-12)
        order = np.argsort(lam)
        lam, psi = lam[order], psi[:, order]
    return np.asarray(lam), psi / b.sqrt_pi[:, None]


def verify_sgi(
    b: DenseGeneratorBundle,
    gap: Optional[float] = None,
    n_functions: int = 1000,
    seed: int = 0,
) -> InequalityReport:
    """Var(f) ≤ gap⁻¹ D(f) on random functions; reports the tightest case."""
    gap = spectral_gap(b) if gap is None else gap
    rng = stream(seed, "sgi")
    fs = rng.standard_normal((b.n_states, n_functions))
    fs *= rng.lognormal(0.0, 1.0, size=n_functions)
    means = b.pi @ fs
    variances = b.pi @ (fs - means) ** 2
    bounds = dirichlet_forms(b, fs) / gap
    worst = int(np.argmax(variances / bounds))
    return make_report(
        "spectral_gap_inequality",
        variances[worst],
        bounds[worst],
        rtol=INEQUALITY_RTOL,
        inputs={"bundle": b.to_dict(), "seed": seed, "n_functions": n_functions},
        gap=gap,
        n_functions=n_functions,
        violations=int(np.sum(variances > bounds * (1 + INEQUALITY_RTOL))),
    )
