from ..report import InequalityReport, array_digest, make_report
from .conditional import (BlockTable, ConditionalStructure, condition_on_grid,
                          conditional_expectation, conditional_variance, grid_configurations,
                          site_mask)
from .schedule import (block_side_schedule, geometric_partition, schedule_boundedness,
                       validate_partition)
from .verifiers import (averaged_conditional_entropy, conditional_entropy_identity,
                        de_bruijn_check, entropy_monotonicity, factorization_check,
                        jensen_step, projection_check, second_moment_identity,
                        verify_bodineau_helffer, verify_efron_stein)

__all__ = [
    "InequalityReport",
    "array_digest",
    "make_report",
    "BlockTable",
    "ConditionalStructure",
    "condition_on_grid",
    "conditional_expectation",
    "conditional_variance",
    "grid_configurations",
    "site_mask",
    "block_side_schedule",
    "geometric_partition",
    "schedule_boundedness",
    "validate_partition",
    "averaged_conditional_entropy",
    "conditional_entropy_identity",
    "de_bruijn_check",
    "entropy_monotonicity",
    "factorization_check",
    "jensen_step",
    "projection_check",
    "second_moment_identity",
    "verify_bodineau_helffer",
    "verify_efron_stein",
]
