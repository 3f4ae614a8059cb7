from .arm import (ArmPoint, arm_checks, arm_point, arm_scaling, assemble_arm, averaged_arm,
                  averaged_arm_ratio, plan_arm)
from .autocorr import (AutocorrEstimate, AutocorrUnit, autocorrelation_checks, autocorrelation_mc,
                       exact_autocorrelation, geometric_time_grid, merge_units, oracle_agreement,
                       plan_units, run_unit)
from .lsi_scaling import LsiScaling, alpha_from_assumptions, lsi_scaling
from .series import ScalingSeries, fit_power_law, make_series
from .shellsum import shell_sum, shell_sum_check, shell_sum_series

__all__ = [
    "ScalingSeries",
    "make_series",
    "fit_power_law",
    "AutocorrEstimate",
    "AutocorrUnit",
    "geometric_time_grid",
    "plan_units",
    "run_unit",
    "merge_units",
    "autocorrelation_mc",
    "exact_autocorrelation",
    "autocorrelation_checks",
    "oracle_agreement",
    "ArmPoint",
    "arm_point",
    "plan_arm",
    "assemble_arm",
    "arm_scaling",
    "arm_checks",
    "averaged_arm",
    "averaged_arm_ratio",
    "shell_sum",
    "shell_sum_series",
    "shell_sum_check",
    "LsiScaling",
    "lsi_scaling",
    "alpha_from_assumptions",
]
