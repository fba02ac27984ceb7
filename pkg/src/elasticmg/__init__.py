"""Geometric multigrid with Braess-Sarazin smoothers for MAC-discretized elasticity."""

from .discretization import (
    PhysicalParams,
    SaddleOperator,
    SaddleState,
    apply_saddle,
    assemble_rhs,
    assemble_saddle,
    error_norms,
    manufactured_solution,
)
from .estimator import BraessSarazinMultigrid
from .grid import DofFamily, StaggeredField, StaggeredGrid, dof_count, linear_index
from .multigrid import (
    CycleConfig,
    CycleKind,
    Hierarchy,
    SolveResult,
    build_hierarchy,
    build_transfer,
    cycle,
    prolong,
    restrict,
    solve,
)
from .smoother import (
    BraessSarazinSmoother,
    Scheme,
    SchurMode,
    SmootherConfig,
    bsr_step,
    build_d_inverse,
    build_schur,
    schur_solve,
    vanka_assemble,
)

__version__ = "0.1.0"

__all__ = [
    "BraessSarazinMultigrid",
    "BraessSarazinSmoother",
    "CycleConfig",
    "CycleKind",
    "DofFamily",
    "Hierarchy",
    "PhysicalParams",
    "SaddleOperator",
    "SaddleState",
    "Scheme",
    "SchurMode",
    "SmootherConfig",
    "SolveResult",
    "StaggeredField",
    "StaggeredGrid",
    "apply_saddle",
    "assemble_rhs",
    "assemble_saddle",
    "bsr_step",
    "build_d_inverse",
    "build_hierarchy",
    "build_schur",
    "build_transfer",
    "cycle",
    "dof_count",
    "error_norms",
    "linear_index",
    "manufactured_solution",
    "prolong",
    "restrict",
    "schur_solve",
    "solve",
    "vanka_assemble",
]
