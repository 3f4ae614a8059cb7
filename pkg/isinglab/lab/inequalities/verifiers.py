import logging
from typing import List, Optional, Sequence

import numpy as np

from ...errors import GeometryError, NegativeFunctionError
from ..constants import FD_STEP, FD_TOL, IDENTITY_TOL, INEQUALITY_RTOL, NORMALIZATION_TOL
from ..gibbs import ExactMeasure, entropy
from ..lattice import BlockDecomposition
from ..report import InequalityReport, array_digest, make_report
from ..rng import stream
from ..spectral import DenseGeneratorBundle, dirichlet_form, entropy_curve, semigroup_apply
from .conditional import (condition_on_grid, conditional_expectation, conditional_variance,
                          grid_configurations, site_mask)

logger = logging.getLogger(__name__)


def _context(b_or_m, **extra) -> dict:
    geom = b_or_m.geometry
    ctx = {"geometry": geom.to_dict(), "bc": b_or_m.bc.to_dict(), "beta": b_or_m.beta}
    ctx.update(extra)
    return ctx


def verify_bodineau_helffer(
    b: DenseGeneratorBundle, gamma_hat: float, F: np.ndarray
) -> List[InequalityReport]:
    """Σ_x cov(F, σ_x)² against (64 c_M/γ̂²) D(√F) and (32 c_M/γ̂) Ent(F).

    F is normalised to E[F] = 1 first; F ≡ 0 is reported as 0 ≤ 0.
    """
    F = np.asarray(F, dtype=float)
    if np.any(F < 0):
        raise NegativeFunctionError("Bodineau-Helffer needs a nonnegative F")
    if gamma_hat <= 0:
        raise ValueError("gamma_hat must be positive")
    inputs = _context(b, family=b.model.family, F=array_digest(F), gamma_hat=gamma_hat)
    mean = float(b.pi @ F)
    if mean <= 0.0:
        return [
            make_report("bodineau_helffer", 0.0, 0.0, inputs=inputs),
            make_report("bodineau_helffer_entropy", 0.0, 0.0, inputs=inputs),
        ]
    G = F / mean
    spins = b.measure.spins.astype(float)
    m_sigma = b.pi @ spins
    cov = b.pi @ ((G - 1.0)[:, None] * (spins - m_sigma))
    lhs = float(np.sum(cov * cov))
    c_max = b.model.c_max
    dir_ = dirichlet_form(b, np.sqrt(G))
    ent = entropy(b.pi, G)
    return [
        make_report(
            "bodineau_helffer",
            lhs,
            64.0 * c_max / gamma_hat**2 * dir_,
            rtol=INEQUALITY_RTOL,
            inputs=inputs,
            dirichlet=dir_,
        ),
        make_report(
            "bodineau_helffer_entropy",
            lhs,
            32.0 * c_max / gamma_hat * ent,
            rtol=INEQUALITY_RTOL,
            inputs=inputs,
            entropy=ent,
        ),
    ]


def verify_efron_stein(
    measure: ExactMeasure,
    decomposition: BlockDecomposition,
    omega: Optional[np.ndarray],
    F: np.ndarray,
) -> InequalityReport:
    """⟨[(I − B)F]²⟩ ≤ Σ_j ⟨Var_{Λ^j}(F)⟩.

    With ``omega`` given both sides are taken under μ(·|ω); with ``omega=None``
    they are averaged over the grid under μ.
    """
    if not measure.geometry.is_torus:
        raise GeometryError("Efron-Stein is checked on tori")
    F = np.asarray(F, dtype=float)
    grid_mask = site_mask(decomposition.grid)
    full = (1 << measure.n_sites) - 1
    if omega is None:
        weights = measure.probs
    else:
        weights = condition_on_grid(measure, decomposition, omega).probs
    residual = F - conditional_expectation(measure.probs, grid_mask, F)
    lhs = float(weights @ (residual * residual))
    per_block = [
        float(weights @ conditional_variance(measure.probs, full & ~site_mask(sites), F))
        for sites in decomposition.blocks
    ]
    return make_report(
        "efron_stein",
        lhs,
        sum(per_block),
        atol=IDENTITY_TOL,
        rtol=INEQUALITY_RTOL,
        inputs=_context(measure, F=array_digest(F), omega=_omega_list(omega)),
        per_block=per_block,
    )


def _omega_list(omega: Optional[np.ndarray]) -> Optional[List[int]]:
    return None if omega is None else [int(w) for w in omega]


def conditional_entropy_identity(
    measure: ExactMeasure, decomposition: BlockDecomposition, omega: Optional[np.ndarray] = None
) -> List[InequalityReport]:
    """KL(μ(·|ω) ‖ μ) computed directly and from partition functions, plus its envelope.

    The partition-function form is
    E_{μ(·|ω)}[β Σ_interface(σ_yω_x − σ_yσ_x)] − β Σ_{grid bonds} ω_xω_y
    + log Z − Σ_j log Z_j^ω.
    The envelope is |∂Λ_ℓ|·(log 2 + 4dβ).
    """
    if not measure.geometry.is_torus:
        raise GeometryError("the conditional entropy identity is checked on tori")
    cond = condition_on_grid(measure, decomposition, omega)
    p = cond.probs
    q = measure.probs
    live = p > 0
    direct = float(np.sum(p[live] * (np.log(p[live]) - np.log(q[live]))))

    beta = measure.beta
    log_z_omega = sum(t.log_z for t in cond.block_tables)
    via_partition = (
        beta * cond.interface_energy()
        - beta * cond.grid_energy()
        + measure.log_z
        - log_z_omega
    )
    grid_size = len(decomposition.grid)
    envelope = grid_size * (np.log(2.0) + 4 * measure.geometry.dimension * beta)
    inputs = _context(
        measure, omega=_omega_list(cond.omega), decomposition=decomposition.to_dict()
    )
    return [
        make_report(
            "conditional_entropy_identity",
            direct,
            via_partition,
            kind="identity",
            atol=IDENTITY_TOL,
            inputs=inputs,
            log_z=measure.log_z,
            log_z_omega=log_z_omega,
        ),
        make_report(
            "conditional_entropy_envelope", direct, envelope, atol=IDENTITY_TOL, inputs=inputs
        ),
    ]


def averaged_conditional_entropy(
    measure: ExactMeasure, decomposition: BlockDecomposition
) -> InequalityReport:
    """0 ≤ ⟨KL(μ(·|ω) ‖ μ)⟩_ω ≤ envelope, ω drawn from the grid marginal of μ."""
    total = 0.0
    for omega in grid_configurations(decomposition):
        weight = condition_on_grid(measure, decomposition, omega).grid_probability
        if weight > 0.0:
            total -= weight * np.log(weight)
    envelope = len(decomposition.grid) * (
        np.log(2.0) + 4 * measure.geometry.dimension * measure.beta
    )
    return make_report(
        "averaged_conditional_entropy",
        total,
        envelope,
        atol=IDENTITY_TOL,
        inputs=_context(measure, decomposition=decomposition.to_dict()),
        nonnegative=total >= 0.0,
    )


def projection_check(
    measure: ExactMeasure, decomposition: BlockDecomposition, samples: int = 16, seed: int = 0
) -> List[InequalityReport]:
    """B∘B = B and ⟨Bf, g⟩ = ⟨f, Bg⟩ on random f, g."""
    mask = site_mask(decomposition.grid)
    rng = stream(seed, "projection")
    idem, sym = 0.0, 0.0
    for _ in range(samples):
        f = rng.standard_normal(measure.n_states)
        g = rng.standard_normal(measure.n_states)
        bf = conditional_expectation(measure.probs, mask, f)
        bbf = conditional_expectation(measure.probs, mask, bf)
        idem = max(idem, float(np.abs(bbf - bf).max()))
        bg = conditional_expectation(measure.probs, mask, g)
        sym = max(sym, abs(float(measure.probs @ (bf * g)) - float(measure.probs @ (f * bg))))
    inputs = _context(measure, seed=seed, samples=samples)
    return [
        make_report(name, value, 0.0, kind="identity", atol=IDENTITY_TOL, inputs=inputs)
        for name, value in (("projection_idempotent", idem), ("projection_self_adjoint", sym))
    ]


def factorization_check(
    measure: ExactMeasure, decomposition: BlockDecomposition, omega: Optional[np.ndarray] = None
) -> InequalityReport:
    """Total-variation distance between μ(·|ω) and ⊗_j μ_{Λ^j}^ω."""
    cond = condition_on_grid(measure, decomposition, omega)
    tv = 0.5 * float(np.abs(cond.probs - cond.product_table()).sum())
    return make_report(
        "conditional_factorization",
        tv,
        0.0,
        kind="identity",
        atol=NORMALIZATION_TOL,
        inputs=_context(measure, omega=_omega_list(cond.omega)),
    )


def jensen_step(
    b: DenseGeneratorBundle, decomposition: BlockDecomposition, t: float, x: Optional[int] = None
) -> InequalityReport:
    """⟨(E[f_t^ω h])²⟩_ω ≤ ⟨(B[f_t^ω h])²⟩_ω with h = σ_x − Bσ_x.

    f_t^ω = P_t(1_{grid=ω}/μ(grid=ω)) is the density at time t of the
    dynamics started from μ(·|ω); ω is averaged under the grid marginal.
    """
    measure = b.measure
    if x is None:
        x = int(decomposition.blocks[0][0])
    mask = site_mask(decomposition.grid)
    sigma = measure.site(x)
    h = sigma - conditional_expectation(measure.probs, mask, sigma)
    lhs, rhs = 0.0, 0.0
    for omega in grid_configurations(decomposition):
        cond = condition_on_grid(measure, decomposition, omega)
        weight = cond.grid_probability
        if weight == 0.0:
            continue
        density = semigroup_apply(b, cond.support / weight, t)
        y = density * h
        lhs += weight * float(measure.probs @ y) ** 2
        by = conditional_expectation(measure.probs, mask, y)
        rhs += weight * float(measure.probs @ (by * by))
    return make_report(
        "jensen_step",
        lhs,
        rhs,
        atol=IDENTITY_TOL,
        rtol=INEQUALITY_RTOL,
        inputs=_context(b, t=t, x=x, decomposition=decomposition.to_dict()),
    )


def second_moment_identity(
    b: DenseGeneratorBundle, t_grid: Sequence[float], x: int = 0
) -> List[InequalityReport]:
    """⟨σ_x, P_tσ_x⟩ = ⟨(P_{t/2}σ_x)²⟩ on ``t_grid``.

    The second report checks that the curve is the same at every site.
    """
    if not b.geometry.is_torus:
        raise GeometryError("the second-moment identity is checked on torus bundles")
    t_grid = np.asarray(t_grid, dtype=float)
    sigma = b.measure.site(x)
    deviation = 0.0
    curve = np.empty(len(t_grid))
    for k, t in enumerate(t_grid):
        lhs = float(b.pi @ (sigma * semigroup_apply(b, sigma, t)))
        half = semigroup_apply(b, sigma, t / 2.0)
        rhs = float(b.pi @ (half * half))
        curve[k] = lhs
        deviation = max(deviation, abs(lhs - rhs))
    translation = 0.0
    for y in range(b.n_sites):
        other = b.measure.site(y)
        for k, t in enumerate(t_grid):
            value = float(b.pi @ (other * semigroup_apply(b, other, t)))
            translation = max(translation, abs(value - curve[k]))
    inputs = _context(b, family=b.model.family, t_grid=t_grid.tolist(), x=x)
    return [
        make_report("second_moment_identity", deviation, 0.0, kind="identity", atol=IDENTITY_TOL,
                    inputs=inputs, curve=curve.tolist()),
        make_report("translation_invariance", translation, 0.0, kind="identity", atol=IDENTITY_TOL,
                    inputs=inputs),
    ]


def entropy_monotonicity(
    b: DenseGeneratorBundle, F: np.ndarray, t_grid: Sequence[float]
) -> InequalityReport:
    """t ↦ Ent(P_t F) is nonincreasing on the grid."""
    ents = entropy_curve(b, F, t_grid)
    rise = float(np.max(np.diff(ents))) if len(ents) > 1 else 0.0
    return make_report(
        "entropy_monotone",
        max(rise, 0.0),
        0.0,
        atol=NORMALIZATION_TOL,
        inputs=_context(b, F=array_digest(F), t_grid=list(map(float, t_grid))),
        entropies=ents.tolist(),
    )


def de_bruijn_check(
    b: DenseGeneratorBundle, F: np.ndarray, t_grid: Sequence[float], step: float = FD_STEP
) -> InequalityReport:
    """d/dt Ent(P_t F) ≤ −D(√(P_t F)), derivative by central differences.

    Reports the grid time with the smallest margin.
    """
    F = np.asarray(F, dtype=float)
    if np.any(F < 0):
        raise NegativeFunctionError("the de Bruijn check needs F >= 0")
    if len(t_grid) == 0:
        raise ValueError("t_grid is empty")
    worst = (-np.inf, 0.0, 0.0)
    for t in t_grid:
        t = max(float(t), step)
        plus, minus = entropy_curve(b, F, [t + step, t - step])
        derivative = (plus - minus) / (2.0 * step)
        bound = -dirichlet_form(b, np.sqrt(np.maximum(semigroup_apply(b, F, t), 0.0)))
        if derivative - bound > worst[0] - worst[1]:
            worst = (derivative, bound, t)
    return make_report(
        "de_bruijn",
        worst[0],
        worst[1],
        atol=FD_TOL,
        inputs=_context(b, F=array_digest(F), t_grid=list(map(float, t_grid)), step=step),
        t=worst[2],
    )
