"""Sparse polynomial interpolation of parametrized steady channel flows.

The package builds hierarchical sparse interpolants over downward-closed
multi-index sets (multiindex, points, interp), wraps a Q2/Q1 finite element
Navier-Stokes solver as a snapshot map (fom, providers), and drives
convergence studies with cached snapshots (harness, cli).
"""

from .multiindex import (
    DimensionMismatchError,
    DownwardClosedSet,
    NotDownwardClosedError,
    as_multiindex,
    canonical_sequence,
    format_indices,
    immediate_predecessors,
    is_downward_closed,
    parse_indices,
    total_degree,
)
from .points import (
    DEFAULT_GRID_RESOLUTION,
    EQUIDISTANT_LEJA_ORDERED,
    EQUIDISTANT_NATURAL,
    LEJA,
    RULE_KINDS,
    SYMMETRIZED_LEJA,
    TensorGrid,
    UnivariatePointRule,
    equidistant,
    leja_order,
    leja_rule,
    leja_sequence,
    make_rule,
    rule_from_descriptor,
    symmetrized_leja,
    symmetrized_leja_rule,
    tensor_point,
)
from .interp import (
    SparseInterpolant,
    build,
    enrich,
    evaluate,
    evaluate_basis,
    hierarchical_poly,
    load_interpolant,
    save_interpolant,
    tensor_hierarchical,
)
from .providers import (
    AffineParameterMap,
    SnapshotCache,
    SnapshotError,
    StaleCacheError,
    analytic_map,
    analytic_snapshot,
    cache_get,
    cache_put,
    fom_snapshot,
    fom_solve_count,
    map_to_physical,
    map_to_reference,
    parameter_map,
    reset_fom_solve_count,
)
from .harness import (
    ConfigError,
    ErrorRow,
    StudyConfig,
    compare_point_rules,
    parse_config,
    relative_l2_error,
    resolved_test_grid,
    run_study,
)
from . import fom

__version__ = "0.1.0"
