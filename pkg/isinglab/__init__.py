"""
isinglab — laboratoire de dynamique de Glauber pour le modèle d'Ising critique

Usage:
    from isinglab import build_geometry, BoundaryCondition, build_generator, spectral_gap

    geom = build_geometry(2, 1, "torus")
    bundle = build_generator(geom, BoundaryCondition("periodic"), beta_critical(2), "heatbath")
    gap = spectral_gap(bundle)
"""

from isinglab.errors import LabError
from isinglab.lab.core import ExperimentConfig, ExperimentRunner, load_config
from isinglab.lab.exponents import autocorrelation_mc, fit_power_law
from isinglab.lab.gibbs import BoundaryCondition, beta_critical, enumerate_measure
from isinglab.lab.glauber import make_rate_model, simulate_ct
from isinglab.lab.lattice import build_box, build_geometry
from isinglab.lab.spectral import build_generator, spectral_gap
from isinglab.version import __version__

__all__ = [
    "__version__",
    "LabError",
    "ExperimentConfig",
    "ExperimentRunner",
    "load_config",
    "autocorrelation_mc",
    "fit_power_law",
    "BoundaryCondition",
    "beta_critical",
    "enumerate_measure",
    "make_rate_model",
    "simulate_ct",
    "build_box",
    "build_geometry",
    "build_generator",
    "spectral_gap",
]
