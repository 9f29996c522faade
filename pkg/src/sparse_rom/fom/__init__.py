"""Q2/Q1 finite-element solver for steady channel flows on parametrized
geometries: mesh construction, operator assembly, and the Oseen iteration."""

from .geometry import (
    CHANNEL_HEIGHT,
    CURVED_WALLS,
    MODELS,
    GeometryError,
    GeometrySpec,
    Mesh,
    NARROWING_WIDTH,
    STRAIGHT,
    Segment,
    allocate_cells,
    bottom_segments,
    build_mesh,
    mesh_to_csv,
    reference_spec,
)
from .fem import Operators, cell_jacobians, q1_shapes, q2_shapes, velocity_norm
from .solver import (
    DivergenceError,
    Field,
    FlowConfig,
    SolveResult,
    SolverError,
    dirichlet_data,
    divergence_residual,
    field_to_csv,
    oseen_solve,
    oseen_step,
    parabolic_inflow,
    poiseuille_field,
    pullback,
    reynolds,
    zero_field,
)

__all__ = [
    "CHANNEL_HEIGHT",
    "CURVED_WALLS",
    "DivergenceError",
    "Field",
    "FlowConfig",
    "GeometryError",
    "GeometrySpec",
    "MODELS",
    "Mesh",
    "NARROWING_WIDTH",
    "Operators",
    "STRAIGHT",
    "Segment",
    "SolveResult",
    "SolverError",
    "allocate_cells",
    "bottom_segments",
    "build_mesh",
    "cell_jacobians",
    "dirichlet_data",
    "divergence_residual",
    "field_to_csv",
    "mesh_to_csv",
    "oseen_solve",
    "oseen_step",
    "parabolic_inflow",
    "poiseuille_field",
    "pullback",
    "q1_shapes",
    "q2_shapes",
    "reference_spec",
    "reynolds",
    "velocity_norm",
    "zero_field",
]
