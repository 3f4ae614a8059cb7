from .axioms import AxiomCheck, AxiomReport, verify_rate_axioms
from .dynamics import (Trajectory, coupled_pair, energy_flux, read_event_log, replay,
                       simulate_ct, simulate_overlap, write_event_log)
from .rates import (HeatBath, Metropolis, RateFamily, RateModel, RateRegistry, local_fields,
                    make_rate_model, rate, rate_table, register)

__all__ = [
    "AxiomCheck",
    "AxiomReport",
    "verify_rate_axioms",
    "Trajectory",
    "simulate_ct",
    "simulate_overlap",
    "coupled_pair",
    "replay",
    "energy_flux",
    "write_event_log",
    "read_event_log",
    "RateFamily",
    "RateRegistry",
    "register",
    "Metropolis",
    "HeatBath",
    "RateModel",
    "make_rate_model",
    "local_fields",
    "rate",
    "rate_table",
]
