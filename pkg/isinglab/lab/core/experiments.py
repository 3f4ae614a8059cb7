"""Experiment kinds and their registry.

Each experiment is a class registered under its lowercased name. ``run``
receives the ``ExperimentRunner`` and returns an ``Outcome``; parallel units go
through ``runner.map`` so that the merge order is fixed by submission order.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Tuple, Type

import numpy as np

from ...errors import FitError, GeometryError
from ..constants import (DETAILED_BALANCE_TOL, GAP_LSI_TOL, LSI_MAX_SITES, ROW_SUM_TOL,
                         STATIONARITY_TOL)
from ..exponents import (ScalingSeries, arm_checks, arm_point, assemble_arm, autocorrelation_checks,
                         averaged_arm, averaged_arm_ratio, exact_autocorrelation, fit_power_law,
                         geometric_time_grid, lsi_scaling, merge_units, oracle_agreement, plan_arm,
                         plan_units, run_unit, shell_sum_check, shell_sum_series)
from ..gibbs import BoundaryCondition, beta_critical
from ..glauber import RateRegistry, make_rate_model, verify_rate_axioms
from ..inequalities import (InequalityReport, conditional_entropy_identity, de_bruijn_check,
                            entropy_monotonicity, factorization_check, geometric_partition,
                            jensen_step, make_report, projection_check, schedule_boundedness,
                            second_moment_identity, verify_bodineau_helffer, verify_efron_stein)
from ..lattice import Geometry, build_block_grid, build_box, build_geometry
from ..rng import stream
from ..spectral import DenseGeneratorBundle, LsiSearchConfig, lsi_constant, spectral_gap, verify_sgi
from .records import read_records, records_in

logger = logging.getLogger(__name__)

ORACLE_MAX_SITES = 12
GENERIC_COLUMNS = ("abscissa", "value", "stderr")


@dataclass
class Outcome:
    """Everything an experiment hands back to the runner."""

    records: List[Tuple[str, Dict[str, Any], Optional[bool]]] = field(default_factory=list)
    series: List[ScalingSeries] = field(default_factory=list)
    reports: List[InequalityReport] = field(default_factory=list)

    def add(
        self,
        label: str,
        payload: Dict[str, Any],
        series: Optional[List[ScalingSeries]] = None,
        reports: Optional[List[InequalityReport]] = None,
        columns: Tuple[str, ...] = GENERIC_COLUMNS,
    ):
        series = series or []
        reports = reports or []
        payload = dict(payload)
        payload["series"] = [s.to_dict() for s in series]
        payload["columns"] = list(columns)
        payload["reports"] = [r.to_dict() for r in reports]
        passed = all(r.passed for r in reports) if reports else None
        self.records.append((label, payload, passed))
        self.series.extend(series)
        self.reports.extend(reports)

    def add_checks(self, label: str, reports: List[InequalityReport], **context: Any):
        """One record per report, tagged with ``label`` and the shared ``context``."""
        for report in reports:
            payload = report.to_dict()
            payload.update(context, geometry=label)
            self.records.append((f"{label}:{report.inequality}", payload, report.passed))
        self.reports.extend(reports)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


class Experiment:
    """Base class for experiment kinds.

    Usage:
        @register_experiment
        class Autocorr(Experiment):
            columns = ("t", "C", "C_err")

            async def run(self, runner):
                ...
    """

    columns: Tuple[str, ...] = GENERIC_COLUMNS

    async def run(self, runner) -> Outcome:
        raise NotImplementedError("Each experiment must implement run.")


class ExperimentRegistry:
    """Registry of experiment kinds, keyed by lowercased class name."""

    _experiments: dict = {}

    @classmethod
    def register(cls, name: str, experiment: Type[Experiment]):
        existing = cls._experiments.get(name)
        if existing is not None and existing is not experiment:
            logger.warning(f"Experiment '{name}' re-registered; previous definition shadowed")
        cls._experiments[name] = experiment

    @classmethod
    def get(cls, name: str) -> Optional[Type[Experiment]]:
        return cls._experiments.get(name)

    @classmethod
    def all(cls) -> dict:
        return dict(cls._experiments)


def register_experiment(cls):
    if not (isinstance(cls, type) and issubclass(cls, Experiment)):
        raise TypeError(f"{cls!r} must subclass Experiment")
    ExperimentRegistry.register(cls.__name__.lower(), cls)
    return cls


# ----------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------


def resolve_beta(config) -> float:
    return beta_critical(config.dimension) if config.beta is None else float(config.beta)


def resolve_geometries(config) -> List[Tuple[Geometry, BoundaryCondition]]:
    """Cubes (or tori for 'periodic') for every L in ``sizes``, boxes for every shape."""
    bc = BoundaryCondition.parse(config.resolved_boundary())
    kind = "torus" if bc.tag == "periodic" else "cube"
    if config.shapes:
        return [(build_box(shape, kind), bc) for shape in config.shapes]
    return [(build_geometry(config.dimension, L, kind), bc) for L in config.sizes]


def random_densities(n_states: int, count: int, seed: int) -> np.ndarray:
    """``count`` lognormal functions, one per column."""
    rng = stream(seed, "verify")
    scale = rng.choice([0.1, 0.5, 1.0, 2.0], size=count)
    return np.exp(rng.standard_normal((n_states, count)) * scale)


def invariant_reports(b: DenseGeneratorBundle) -> List[InequalityReport]:
    inv = b.invariants()
    ctx = b.to_dict()
    scale = max(1.0, b.model.c_max * b.n_sites)
    return [
        make_report("generator_row_sum", inv["row_sum"], 0.0, "identity",
                    atol=ROW_SUM_TOL * scale, inputs=ctx),
        make_report("generator_off_diagonal", -inv["min_off_diagonal"], 0.0, inputs=ctx),
        make_report("generator_reversibility", inv["reversibility"], 0.0, "identity",
                    atol=DETAILED_BALANCE_TOL, inputs=ctx),
        make_report("generator_stationarity", inv["stationarity"], 0.0, "identity",
                    atol=STATIONARITY_TOL, inputs=ctx),
    ]


def axiom_reports(
    geom: Geometry, bc: BoundaryCondition, beta: float, seed: int
) -> List[InequalityReport]:
    out = []
    for family in sorted(RateRegistry.all()):
        model = make_rate_model(family, beta, geom.dimension)
        report = verify_rate_axioms(model, geom, bc, seed=seed)
        for check in report.checks:
            out.append(
                make_report(
                    f"axiom_{check.axiom}_{family}",
                    0.0 if check.passed else 1.0,
                    0.0,
                    "identity",
                    inputs=report.to_dict(),
                    max_violation=check.max_violation,
                    detail=check.detail,
                )
            )
    return out


def try_fit(series: ScalingSeries, window, seed: int) -> ScalingSeries:
    try:
        return fit_power_law(series, window=tuple(window) if window else None, seed=seed)
    except FitError as exc:
        logger.info(f"No fit for {series.label}: {exc}")
        return series.with_note(f"no fit: {exc}")


# ----------------------------------------------------------------------
# Experiments
# ----------------------------------------------------------------------


@register_experiment
class Autocorr(Experiment):
    columns = ("t", "C", "C_err")

    async def run(self, runner) -> Outcome:
        cfg = runner.config
        beta = resolve_beta(cfg)
        times = geometric_time_grid(cfg.t_max, cfg.t0, cfg.ratio)
        outcome = Outcome()
        for geom, _ in resolve_geometries(cfg):
            units = plan_units(
                geom.shape, cfg.family, beta, times, cfg.replicas, cfg.seed, coupling=cfg.coupling
            )
            est = merge_units(units, await runner.map(run_unit, units))
            reports = autocorrelation_checks(est)
            payload: Dict[str, Any] = {"estimate": est.to_dict()}
            if geom.n_sites <= ORACLE_MAX_SITES:
                exact = exact_autocorrelation(
                    geom.dimension, 0, cfg.family, times, beta, shape=geom.shape
                )
                reports.append(oracle_agreement(est, exact))
                payload["exact"] = exact.values.tolist()
            series = est.to_series(f"autocorr_{geom.label()}")
            if cfg.window:
                series = try_fit(series, cfg.window, cfg.seed)
            outcome.add(geom.label(), payload, [series], reports, self.columns)
        return outcome


@register_experiment
class Arm(Experiment):
    columns = ("L", "m", "m_err")

    async def run(self, runner) -> Outcome:
        cfg = runner.config
        points = plan_arm(cfg.dimension, cfg.sizes, cfg.samples, cfg.seed, cfg.beta)
        estimates = await runner.map(arm_point, points)
        series = assemble_arm(points, estimates, tuple(cfg.window) if cfg.window else None)
        reports = arm_checks(series)
        sizes = [p.L for p in points]
        average = partial(
            averaged_arm, cfg.dimension, budget=cfg.samples, seed=cfg.seed, beta=points[0].beta
        )
        averages = await runner.map(average, sizes)
        payload: Dict[str, Any] = {
            "estimates": [e.to_record("magnetization_plus", L=L) for L, e in zip(sizes, estimates)],
            "averaged": [{"L": L, "value": v, "stderr": e} for L, (v, e) in zip(sizes, averages)],
        }
        collected = [series]
        if series.fitted and 0.0 < -series.exponent <= 1.0:
            collected.append(averaged_arm_ratio(sizes, averages, -series.exponent))
        outcome = Outcome()
        outcome.add(f"arm_d{cfg.dimension}", payload, collected, reports, self.columns)
        return outcome


@register_experiment
class ShellSum(Experiment):
    columns = ("L", "S_scaled", "err")

    async def run(self, runner) -> Outcome:
        cfg = runner.config
        series = shell_sum_series(cfg.dimension, cfg.delta, cfg.sizes)
        reports = shell_sum_check(cfg.dimension, cfg.delta, cfg.sizes)
        outcome = Outcome()
        payload = {"dimension": cfg.dimension, "delta": cfg.delta}
        outcome.add(series.label, payload, [series], reports, self.columns)
        return outcome


@register_experiment
class Spectral(Experiment):
    columns = ("side", "inverse_constant", "err")

    async def run(self, runner) -> Outcome:
        cfg = runner.config
        beta = resolve_beta(cfg)
        outcome = Outcome()
        geometries = resolve_geometries(cfg)
        for geom, bc in geometries:
            b = runner.bundle(geom, bc, beta, cfg.family)
            gap = spectral_gap(b)
            reports = invariant_reports(b)
            reports.append(verify_sgi(b, gap, n_functions=max(cfg.functions, 1000), seed=cfg.seed))
            outcome.add(geom.label(), {"bundle": b.to_dict(), "gap": gap}, [], reports)
        bc = geometries[0][1]
        scaling = lsi_scaling(
            cfg.dimension,
            [g.shape for g, _ in geometries],
            [bc.tag],
            beta,
            cfg.family,
            LsiSearchConfig(seed=cfg.seed),
            bundle_for=lambda g, c: runner.bundle(g, c, beta, cfg.family),
        )
        for result in scaling:
            outcome.add(
                f"scaling_{result.bc}",
                {"bc": result.bc, "family": result.family, "beta": result.beta},
                [result.gamma_inverse, result.gap_inverse],
                result.reports,
                self.columns,
            )
        return outcome


@register_experiment
class Verify(Experiment):
    async def run(self, runner) -> Outcome:
        cfg = runner.config
        beta = resolve_beta(cfg)
        times = geometric_time_grid(cfg.t_max, cfg.t0, cfg.ratio)
        outcome = Outcome()
        for geom, bc in resolve_geometries(cfg):
            reports = axiom_reports(geom, bc, beta, cfg.seed)
            b = runner.bundle(geom, bc, beta, cfg.family)
            gap = spectral_gap(b)
            reports += invariant_reports(b)
            reports.append(verify_sgi(b, gap, n_functions=max(cfg.functions, 1000), seed=cfg.seed))
            Fs = random_densities(b.n_states, cfg.functions, cfg.seed)
            F0 = Fs[:, 0]
            if geom.n_sites <= LSI_MAX_SITES:
                est = lsi_constant(b, LsiSearchConfig(seed=cfg.seed))
                reports.append(
                    make_report("gap_dominates_lsi", est.gamma_hat, gap, atol=GAP_LSI_TOL,
                                inputs=b.to_dict())
                )
                for k in range(Fs.shape[1]):
                    reports += verify_bodineau_helffer(b, est.gamma_hat, Fs[:, k])
            reports.append(entropy_monotonicity(b, F0, times))
            reports.append(de_bruijn_check(b, F0, times))
            if geom.is_torus:
                reports += second_moment_identity(b, times)
                reports += self._block_reports(b, cfg, F0)
            reports.append(
                schedule_boundedness(
                    geometric_partition(6), eta=cfg.eta or 1.0, c1=1.0, delta=cfg.delta
                )
            )
            failed = sum(not r.passed for r in reports)
            logger.info(f"Verified {geom.label()}: {len(reports) - failed}/{len(reports)} passed")
            outcome.add_checks(geom.label(), reports, bundle=b.to_dict(), gap=gap)
        return outcome

    @staticmethod
    def _block_reports(b: DenseGeneratorBundle, cfg, F: np.ndarray) -> List[InequalityReport]:
        try:
            decomposition = build_block_grid(b.geometry, cfg.ell)
        except GeometryError as exc:
            logger.info(f"No block grid on {b.geometry.label()}: {exc}")
            return []
        measure = b.measure
        reports = [verify_efron_stein(measure, decomposition, None, F)]
        reports += conditional_entropy_identity(measure, decomposition)
        reports += projection_check(measure, decomposition, seed=cfg.seed)
        reports.append(factorization_check(measure, decomposition))
        reports.append(jensen_step(b, decomposition, t=1.0))
        return reports


@register_experiment
class Fit(Experiment):
    async def run(self, runner) -> Outcome:
        cfg = runner.config
        outcome = Outcome()
        records = [r for path in records_in(cfg.input) for r in read_records(path)]
        for record in records:
            for raw in record.payload.get("series", []):
                series = ScalingSeries.from_dict(raw)
                fitted = try_fit(series, cfg.window, cfg.seed)
                columns = tuple(record.payload.get("columns", GENERIC_COLUMNS))
                outcome.add(
                    f"fit_{series.label}", {"source": record.config_digest}, [fitted], [], columns
                )
        return outcome
