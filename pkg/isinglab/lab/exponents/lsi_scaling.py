"""Size dependence of the log-Sobolev and spectral-gap constants on enumerable systems.

Sizes are box shapes; the abscissa is the effective side n^{1/d}. Fitted
exponents over a handful of tiny systems are indicative only.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...errors import FitError, GeometryError
from ..constants import DENSE_EIG_MAX_SITES, GAP_LSI_TOL, LSI_MAX_SITES, SOLVER_AGREEMENT_TOL
from ..gibbs import BoundaryCondition, beta_critical
from ..lattice import Geometry, build_box
from ..report import InequalityReport, make_report
from ..spectral import (DenseGeneratorBundle, LsiSearchConfig, build_generator, lsi_constant,
                        spectral_gap)
from .series import ScalingSeries, fit_power_law, make_series

logger = logging.getLogger(__name__)

BundleFactory = Callable[[Geometry, BoundaryCondition], DenseGeneratorBundle]

INDICATIVE_NOTE = "indicative only: fitted over few tiny systems"
MONOTONE_RTOL = 1e-6
TENSORIZATION_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class LsiScaling:
    bc: str
    family: str
    beta: float
    gamma_inverse: ScalingSeries
    gap_inverse: ScalingSeries
    reports: List[InequalityReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bc": self.bc,
            "family": self.family,
            "beta": self.beta,
            "gamma_inverse": self.gamma_inverse.to_dict(),
            "gap_inverse": self.gap_inverse.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
        }


def geometry_for(shape: Sequence[int], bc: BoundaryCondition) -> Geometry:
    return build_box(shape, "torus" if bc.tag == "periodic" else "cube")


def _points(label: str, points: List[Tuple[float, float]]) -> ScalingSeries:
    return make_series(label, [p[0] for p in points], [p[1] for p in points])


def _fit(series: ScalingSeries) -> ScalingSeries:
    try:
        return fit_power_law(series).with_note(INDICATIVE_NOTE)
    except FitError as exc:
        return series.with_note(f"no fit: {exc}")


def _nested(inner: Tuple[int, ...], outer: Tuple[int, ...]) -> bool:
    return all(a <= b for a, b in zip(sorted(inner), sorted(outer)))


def _monotone_report(
    shapes: List[Tuple[int, ...]], inverses: List[float], tag: str
) -> Optional[InequalityReport]:
    """Largest relative drop of γ̂⁻¹ between consecutive nested boxes."""
    pairs = [
        (k, k + 1) for k in range(len(inverses) - 1) if _nested(shapes[k], shapes[k + 1])
    ]
    if not pairs:
        return None
    drops = [(inverses[i] - inverses[j]) / inverses[i] for i, j in pairs]
    return make_report(
        "gamma_inverse_monotone",
        max(drops),
        0.0,
        atol=MONOTONE_RTOL,
        inputs={"shapes": [list(s) for s in shapes], "bc": tag},
        pairs=[[list(shapes[i]), list(shapes[j])] for i, j in pairs],
    )


def _tensorization_report(
    shapes: List[Tuple[int, ...]], inverses: List[float], tag: str
) -> InequalityReport:
    """At β = 0 the product chain has the single-spin constant at every size."""
    return make_report(
        "lsi_tensorization",
        max(inverses),
        min(inverses),
        kind="identity",
        atol=TENSORIZATION_TOL,
        inputs={"shapes": [list(s) for s in shapes], "bc": tag},
    )


def lsi_scaling(
    d: int,
    sizes: Sequence[Sequence[int]],
    bc_list: Sequence[str] = ("free",),
    beta: Optional[float] = None,
    family: str = "heatbath",
    cfg: LsiSearchConfig = LsiSearchConfig(),
    bundle_for: Optional[BundleFactory] = None,
) -> List[LsiScaling]:
    """γ̂⁻¹ and gap⁻¹ against effective side, one result per boundary condition.

    γ̂ is computed up to 12 sites and the gap up to 20. Where both the dense and
    the sparse eigensolver apply their gaps are cross-checked. ``bundle_for(geom, bc)``
    supplies cached generator bundles built at the same β and family.
    On free boxes γ̂⁻¹ is checked to grow between consecutive nested shapes, and
    at β = 0 it must be the same at every size.

    Raises:
        CapacityError: When a size exceeds 20 sites.
        GeometryError: When two shapes have the same number of sites.
    """
    beta = beta_critical(d) if beta is None else beta
    shapes = sorted((tuple(int(s) for s in shape) for shape in sizes), key=lambda s: np.prod(s))
    for shape in shapes:
        if len(shape) != d:
            raise ValueError(f"shape {shape} does not have dimension {d}")
    counts = [int(np.prod(s)) for s in shapes]
    for k in range(1, len(shapes)):
        if counts[k] == counts[k - 1]:
            raise GeometryError(
                f"shapes {shapes[k - 1]} and {shapes[k]} both have {counts[k]} sites"
                " and would share one abscissa"
            )
    results = []
    for tag in bc_list:
        bc = BoundaryCondition.parse(tag)
        gamma_pts: List[Tuple[float, float]] = []
        gamma_shapes: List[Tuple[int, ...]] = []
        gap_pts: List[Tuple[float, float]] = []
        reports = []
        for shape in shapes:
            geom = geometry_for(shape, bc)
            if bundle_for is None:
                bundle = build_generator(geom, bc, beta, family)
            else:
                bundle = bundle_for(geom, bc)
            side = geom.n_sites ** (1.0 / d)
            gap = spectral_gap(bundle, "auto")
            if geom.n_sites <= DENSE_EIG_MAX_SITES and bundle.n_states > 4:
                sparse_gap = spectral_gap(bundle, "sparse")
                reports.append(
                    make_report(
                        "gap_solver_agreement", abs(gap - sparse_gap), 0.0, kind="identity",
                        atol=SOLVER_AGREEMENT_TOL, inputs=bundle.to_dict(), shape=list(shape),
                    )
                )
            gap_pts.append((side, 1.0 / gap))
            if geom.n_sites <= LSI_MAX_SITES:
                est = lsi_constant(bundle, cfg)
                gamma_pts.append((side, 1.0 / est.gamma_hat))
                gamma_shapes.append(shape)
                reports.append(
                    make_report(
                        "gap_dominates_lsi", est.gamma_hat, gap, atol=GAP_LSI_TOL,
                        inputs=bundle.to_dict(), shape=list(shape),
                    )
                )
            logger.info(f"{geom.label()} bc={tag}: gap {gap:.8g}")
        inverses = [p[1] for p in gamma_pts]
        if bc.tag == "free":
            monotone = _monotone_report(gamma_shapes, inverses, tag)
            if monotone is not None:
                reports.append(monotone)
        if beta == 0.0 and len(inverses) > 1:
            reports.append(_tensorization_report(gamma_shapes, inverses, tag))
        gamma = _fit(_points(f"lsi_inverse_{tag}", gamma_pts))
        gaps = _fit(_points(f"gap_inverse_{tag}", gap_pts))
        results.append(LsiScaling(tag, family, beta, gamma, gaps, reports))
    return results


def alpha_from_assumptions(delta: float, eta: float) -> float:
    """Autocorrelation decay exponent (2δ ∧ 1)/(2η)."""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    return min(2.0 * delta, 1.0) / (2.0 * eta)
