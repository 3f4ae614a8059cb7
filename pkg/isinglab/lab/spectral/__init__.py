from .gap import low_modes, spectral_gap, verify_sgi
from .generator import (DenseGeneratorBundle, build_generator, dirichlet_form,
                        dirichlet_form_direct, dirichlet_forms, state_rates)
from .lsi import LsiEstimate, LsiSearchConfig, lsi_constant, lsi_summary
from .semigroup import (autocorrelation_exact, correlation_curve, decay_rate,
                        dirichlet_sqrt_curve, entropy_curve, semigroup_apply, spectral_measure)

__all__ = [
    "DenseGeneratorBundle",
    "build_generator",
    "dirichlet_form",
    "dirichlet_form_direct",
    "dirichlet_forms",
    "state_rates",
    "spectral_gap",
    "low_modes",
    "verify_sgi",
    "LsiEstimate",
    "LsiSearchConfig",
    "lsi_constant",
    "lsi_summary",
    "semigroup_apply",
    "correlation_curve",
    "autocorrelation_exact",
    "spectral_measure",
    "decay_rate",
    "entropy_curve",
    "dirichlet_sqrt_curve",
]
