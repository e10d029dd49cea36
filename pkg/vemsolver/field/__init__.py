from vemsolver.field.domain import (
    Eigenpair,
    SpectralDomain,
    check_orthonormality,
    eigenpairs,
    eigenvalues,
    project,
    sobolev_norm,
)
from vemsolver.field.family import random_field_family, random_mode_family
from vemsolver.field.solve import (
    FieldProblem,
    FieldSolution,
    NormReport,
    SeparableTarget,
    manufactured_forcing,
    manufactured_problem,
    solve_field,
)

__all__ = [
    "Eigenpair",
    "FieldProblem",
    "FieldSolution",
    "NormReport",
    "SeparableTarget",
    "SpectralDomain",
    "check_orthonormality",
    "eigenpairs",
    "eigenvalues",
    "manufactured_forcing",
    "manufactured_problem",
    "project",
    "random_field_family",
    "random_mode_family",
    "solve_field",
    "sobolev_norm",
]
