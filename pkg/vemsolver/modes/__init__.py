from vemsolver.modes.forcing import TimeFunction
from vemsolver.modes.grid import TimeGrid, default_grading
from vemsolver.modes.norms import (
    forcing_h1_norm,
    h1_norm,
    l2_norm,
    mode_regularity_ratio,
    second_derivative,
    stability_ratio,
    weighted_norm,
    weighted_second_norm,
)
from vemsolver.modes.probes import (
    CONTRACTION_TARGET,
    SIGMA_LADDER,
    ContractionReport,
    ConvergenceRow,
    SingularityReport,
    contraction_probe,
    convergence_study,
    homogeneous_reference,
    select_sigma,
    singularity_probe,
    weight_integral,
)
from vemsolver.modes.solver import (
    ModeProblem,
    ModeSolution,
    apply_picard_map,
    picard_solve,
    solve_mode,
    volterra_oracle_solve,
)

__all__ = [
    "CONTRACTION_TARGET",
    "SIGMA_LADDER",
    "ContractionReport",
    "ConvergenceRow",
    "ModeProblem",
    "ModeSolution",
    "SingularityReport",
    "TimeFunction",
    "TimeGrid",
    "apply_picard_map",
    "contraction_probe",
    "convergence_study",
    "default_grading",
    "forcing_h1_norm",
    "h1_norm",
    "homogeneous_reference",
    "l2_norm",
    "mode_regularity_ratio",
    "picard_solve",
    "second_derivative",
    "select_sigma",
    "singularity_probe",
    "solve_mode",
    "stability_ratio",
    "volterra_oracle_solve",
    "weight_integral",
    "weighted_norm",
    "weighted_second_norm",
]
