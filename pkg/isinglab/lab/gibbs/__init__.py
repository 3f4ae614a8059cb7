from .boundary import BoundaryCondition, default_boundary
from .measure import (ExactMeasure, ObservableStats, all_energies, beta_critical, entropy_terms,
                      entropy, enumerate_measure, interaction_energy, observable_stats)
from .observables import (Estimate, batch_means, magnetization_plus, site_means_mc,
                          two_point)
from .sampler import EquilibriumSampler, sample_equilibrium
from .spins import decode, encode, flip_index, spin_table

__all__ = [
    "BoundaryCondition",
    "default_boundary",
    "ExactMeasure",
    "ObservableStats",
    "all_energies",
    "beta_critical",
    "entropy",
    "entropy_terms",
    "enumerate_measure",
    "interaction_energy",
    "observable_stats",
    "Estimate",
    "batch_means",
    "magnetization_plus",
    "site_means_mc",
    "two_point",
    "EquilibriumSampler",
    "sample_equilibrium",
    "decode",
    "encode",
    "flip_index",
    "spin_table",
]
