"""Transformation-designed control of diffusion-governed communication fields."""

from .kernels import BACKEND as KERNEL_BACKEND
from .materials import (
    ParameterField,
    ParameterSample,
    homogeneous_params,
    piecewise_params,
    sample_params,
)
from .meshing import Mesh, build_annular_sector_mesh, build_cartesian_mesh, locate_point
from .solver import (
    AssembledSystem,
    Dirichlet,
    FieldSolution,
    Neumann,
    assemble_system,
    run_transient,
    sample_solution,
    solve_steady,
)
from .transforms import (
    BenderSpec,
    CloakSpec,
    Mapping,
    bender_mapping,
    bender_params_paper,
    cloak_mapping,
    cloak_params,
    compose,
    jacobian_at,
    principal_to_cartesian,
    push_forward,
)

__version__ = "0.1.0"

__all__ = [
    "AssembledSystem",
    "BenderSpec",
    "CloakSpec",
    "Dirichlet",
    "FieldSolution",
    "KERNEL_BACKEND",
    "Mapping",
    "Mesh",
    "Neumann",
    "ParameterField",
    "ParameterSample",
    "assemble_system",
    "bender_mapping",
    "bender_params_paper",
    "build_annular_sector_mesh",
    "build_cartesian_mesh",
    "cloak_mapping",
    "cloak_params",
    "compose",
    "homogeneous_params",
    "jacobian_at",
    "locate_point",
    "piecewise_params",
    "principal_to_cartesian",
    "push_forward",
    "run_transient",
    "sample_params",
    "sample_solution",
    "solve_steady",
]
