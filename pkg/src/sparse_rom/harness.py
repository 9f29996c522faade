"""Convergence-study driver.

A study grows a sparse interpolant of a snapshot map one index at a time
along the canonical sequence and, after every enrichment, measures mean and
max relative L2 errors against reference solutions on a fixed test grid.
Flow-model snapshots and test references go through the on-disk cache, so
reruns with an identical configuration perform no new solves and reproduce
the CSV bitwise.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fom import CURVED_WALLS, NARROWING_WIDTH, GeometrySpec, Operators, build_mesh
from .interp import SparseInterpolant, build, enrich, tensor_hierarchical
from .multiindex import canonical_sequence
from .points import DEFAULT_GRID_RESOLUTION, RULE_KINDS, TensorGrid, make_rule, tensor_point
from .providers import (
    ANALYTIC_KINDS,
    SnapshotCache,
    analytic_map,
    fom_snapshot,
)

ANALYTIC = "analytic"
STUDY_MODELS = (NARROWING_WIDTH, CURVED_WALLS, ANALYTIC)

CSV_HEADER = "N,mean_rel_l2,max_rel_l2"


class ConfigError(ValueError):
    """Raised for malformed or inconsistent study configurations."""


def _cell_centers(m: int) -> tuple[float, ...]:
    return tuple(-1.0 + (2 * k + 1) / m for k in range(m))


@dataclass(frozen=True)
class StudyConfig:
    """Everything a convergence study depends on.

    model selects the snapshot source: one of the two flow models or
    "analytic" with analytic_kind naming the closed-form map.  point_rules
    gives one univariate rule kind per parameter direction and fixes the
    study dimensionality.  test_grid defaults to a model-specific
    cell-centered grid (40 points for the narrowing model, 12 x 6 for the
    curved-walls model), which never touches the interpolation points.
    """

    model: str
    analytic_kind: str | None = None
    point_rules: tuple[str, ...] = ("leja",)
    max_dimension: int = 25
    test_grid: tuple[tuple[float, ...], ...] | None = None
    nx: int = 36
    ny: int = 12
    nu_visc: float | None = None
    oseen_tol: float = 1e-10
    oseen_max_iter: int = 200
    relaxation: float = 1.0
    cache_root: str | None = None
    output_path: str | None = None
    grid_resolution: int = DEFAULT_GRID_RESOLUTION
    analytic_output_dim: int = 32
    include_interpolation_points: bool = False

    def __post_init__(self):
        if self.model not in STUDY_MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {STUDY_MODELS}")
        if self.model == ANALYTIC:
            if self.analytic_kind not in ANALYTIC_KINDS:
                raise ConfigError(
                    f"analytic model needs analytic_kind from {ANALYTIC_KINDS}, "
                    f"got {self.analytic_kind!r}"
                )
        elif self.analytic_kind is not None:
            raise ConfigError("analytic_kind is only valid for the analytic model")
        rules = tuple(self.point_rules)
        object.__setattr__(self, "point_rules", rules)
        if not rules:
            raise ConfigError("point_rules must name at least one direction")
        for kind in rules:
            if kind not in RULE_KINDS:
                raise ConfigError(f"unknown point rule kind {kind!r}; expected one of {RULE_KINDS}")
        expected = {NARROWING_WIDTH: 1, CURVED_WALLS: 2}.get(self.model)
        if expected is not None and len(rules) != expected:
            raise ConfigError(
                f"model {self.model!r} has {expected} parameter direction(s), "
                f"got {len(rules)} point rules"
            )
        if self.model == ANALYTIC and self.analytic_kind == "runge" and len(rules) != 1:
            raise ConfigError("the runge map is univariate")
        if self.max_dimension < 1:
            raise ConfigError(f"max_dimension must be >= 1, got {self.max_dimension}")
        if self.model != ANALYTIC and (self.nx < 4 or self.ny < 4):
            raise ConfigError(f"mesh needs nx, ny >= 4, got {self.nx}x{self.ny}")
        if self.test_grid is not None:
            grid = tuple(tuple(float(c) for c in p) for p in self.test_grid)
            if not grid:
                raise ConfigError("test_grid must not be empty")
            for p in grid:
                if len(p) != len(rules):
                    raise ConfigError(
                        f"test point {p} has dimension {len(p)}, study has {len(rules)}"
                    )
                if any(abs(c) > 1.0 for c in p):
                    raise ConfigError(f"test point {p} leaves the box [-1, 1]^d")
            if len(set(grid)) != len(grid):
                raise ConfigError("test_grid contains duplicate points")
            object.__setattr__(self, "test_grid", grid)

    @property
    def dim(self) -> int:
        return len(self.point_rules)


def resolved_test_grid(cfg: StudyConfig) -> tuple[tuple[float, ...], ...]:
    """The explicit test grid, or the model's default cell-centered grid."""
    if cfg.test_grid is not None:
        return cfg.test_grid
    if cfg.dim == 1:
        return tuple((c,) for c in _cell_centers(40))
    sizes = (12, 6, 4, 3)[: cfg.dim]
    axes = [_cell_centers(m) for m in sizes]
    mesh = np.meshgrid(*axes, indexing="ij")
    return tuple(tuple(float(c) for c in p) for p in zip(*(m.ravel() for m in mesh)))


@dataclass(frozen=True)
class ErrorRow:
    """Errors over the test grid after the interpolant reached dimension N."""

    N: int
    mean_rel_l2: float
    max_rel_l2: float

    def __post_init__(self):
        if not 0.0 <= self.mean_rel_l2 <= self.max_rel_l2:
            raise ValueError(
                f"need 0 <= mean <= max, got {self.mean_rel_l2}, {self.max_rel_l2}"
            )


def relative_l2_error(approx, reference, mass_weights) -> float:
    """Weighted relative L2 distance between two DOF vectors."""
    approx = np.asarray(approx, dtype=float)
    reference = np.asarray(reference, dtype=float)
    mass_weights = np.asarray(mass_weights, dtype=float)
    if approx.shape != reference.shape or approx.shape != mass_weights.shape:
        raise ValueError(
            f"shape mismatch: {approx.shape}, {reference.shape}, {mass_weights.shape}"
        )
    ref_norm = np.sqrt(mass_weights @ reference**2)
    if ref_norm == 0.0:
        raise ValueError("reference has zero norm; relative error is undefined")
    return float(np.sqrt(mass_weights @ (approx - reference) ** 2) / ref_norm)


def _rules_for(cfg: StudyConfig, sequence) -> TensorGrid:
    needed = np.max(np.array(sequence), axis=0) + 1
    rules = tuple(
        make_rule(kind, int(n), grid_resolution=cfg.grid_resolution)
        for kind, n in zip(cfg.point_rules, needed)
    )
    return TensorGrid(rules)


def _fingerprint_fields(cfg: StudyConfig) -> str:
    fields = (
        f"model={cfg.model} kind={cfg.analytic_kind} dim={cfg.dim} "
        f"nx={cfg.nx} ny={cfg.ny} nu={cfg.nu_visc} tol={cfg.oseen_tol!r} "
        f"maxiter={cfg.oseen_max_iter} relax={cfg.relaxation!r}"
    )
    return fields


def _snapshot_description(cfg: StudyConfig, grid: TensorGrid) -> str:
    rules = "; ".join(rule.describe() for rule in grid.rules)
    return f"snapshots {_fingerprint_fields(cfg)} rules=[{rules}]"


def _reference_description(cfg: StudyConfig, points) -> str:
    text = "; ".join(" ".join(repr(c) for c in p) for p in points)
    token = hashlib.sha256(text.encode()).hexdigest()[:12]
    return f"references {_fingerprint_fields(cfg)} grid={token} n={len(points)}"


def _reference_weights(cfg: StudyConfig, output_dim: int) -> np.ndarray:
    """Lumped velocity mass weights on the mesh at the center parameter, or
    unit weights for analytic studies."""
    if cfg.model == ANALYTIC:
        return np.ones(output_dim)
    if cfg.model == NARROWING_WIDTH:
        spec = GeometrySpec(model=cfg.model, mu=1.5)
    else:
        spec = GeometrySpec(model=cfg.model, curvature=0.5)
    ops = Operators(build_mesh(spec, cfg.nx, cfg.ny))
    return np.concatenate([ops.lumped, ops.lumped])


def run_study(cfg: StudyConfig) -> list[ErrorRow]:
    """Grow the interpolant to cfg.max_dimension and measure errors.

    Emits one CSV row per dimension to cfg.output_path (if set), flushing
    after every row so aborted runs keep their partial results.  With a
    warm cache no FOM solves happen at all and the output is reproduced
    bitwise.
    """
    sequence = canonical_sequence(cfg.dim, cfg.max_dimension)
    grid = _rules_for(cfg, sequence)
    interp_points = [tensor_point(nu, grid) for nu in sequence]
    test_points = resolved_test_grid(cfg)

    overlap = {tuple(p) for p in interp_points} & set(test_points)
    if overlap and not cfg.include_interpolation_points:
        raise ConfigError(
            f"test grid touches {len(overlap)} interpolation point(s); set "
            f"include_interpolation_points to allow this"
        )

    if cfg.model == ANALYTIC:
        snap = analytic_map(cfg.analytic_kind, output_dim=cfg.analytic_output_dim)
        snap_cache = ref_cache = None
    else:
        snap = lambda y: fom_snapshot(cfg, y)
        snap_cache = ref_cache = None
        if cfg.cache_root is not None:
            snap_cache = SnapshotCache(cfg.cache_root, _snapshot_description(cfg, grid), cfg.dim)
            ref_cache = SnapshotCache(
                cfg.cache_root, _reference_description(cfg, test_points), 1
            )

    def snapshot_at(nu, point):
        if snap_cache is not None:
            hit = snap_cache.get(nu)
            if hit is not None:
                return hit
        vec = np.asarray(snap(np.array(point)), dtype=float)
        if snap_cache is not None:
            snap_cache.put(nu, vec, y=point)
        return vec

    def reference_at(k, point):
        if ref_cache is not None:
            hit = ref_cache.get((k,))
            if hit is not None:
                return hit
        vec = np.asarray(snap(np.array(point)), dtype=float)
        if ref_cache is not None:
            ref_cache.put((k,), vec, y=point)
        return vec

    references = [reference_at(k, p) for k, p in enumerate(test_points)]
    weights = _reference_weights(cfg, references[0].size)

    out = None
    if cfg.output_path is not None:
        Path(cfg.output_path).parent.mkdir(parents=True, exist_ok=True)
        out = open(cfg.output_path, "w")
        out.write(CSV_HEADER + "\n")
        out.flush()

    rows: list[ErrorRow] = []
    known: dict[tuple, np.ndarray] = {}
    approx = [np.zeros_like(references[0]) for _ in test_points]
    interp: SparseInterpolant | None = None
    try:
        for step, nu in enumerate(sequence):
            point = interp_points[step]
            known[tuple(point)] = snapshot_at(nu, point)
            lookup = lambda y: known[tuple(np.atleast_1d(y))]
            if interp is None:
                interp = build([nu], grid, lookup)
            else:
                interp = enrich(interp, [nu], lookup)
            surplus = interp.coefficients[step]
            for k, t in enumerate(test_points):
                approx[k] = approx[k] + tensor_hierarchical(nu, np.array(t), grid) * surplus
            errors = [
                relative_l2_error(approx[k], references[k], weights)
                for k in range(len(test_points))
            ]
            row = ErrorRow(step + 1, float(np.mean(errors)), float(np.max(errors)))
            rows.append(row)
            if out is not None:
                out.write(f"{row.N},{row.mean_rel_l2!r},{row.max_rel_l2!r}\n")
                out.flush()
    finally:
        if out is not None:
            out.close()
    return rows


def _rule_suffix(kinds: tuple[str, ...]) -> str:
    return "-".join(kinds) if len(set(kinds)) > 1 else kinds[0]


def compare_point_rules(cfg: StudyConfig, rules) -> list[list[ErrorRow]]:
    """Run one study per point-rule choice on a shared test grid and cache.

    Each entry of rules is a kind name applied to every direction, or a
    tuple with one kind per direction.  Snapshot caches are per rule; the
    reference solutions are rule-independent and shared, so the flow solver
    runs for the test grid only once across all rules.
    """
    results = []
    for entry in rules:
        kinds = (entry,) * cfg.dim if isinstance(entry, str) else tuple(entry)
        out = cfg.output_path
        if out is not None:
            p = Path(out)
            out = str(p.with_name(f"{p.stem}_{_rule_suffix(kinds)}{p.suffix}"))
        sub = dataclasses.replace(cfg, point_rules=kinds, output_path=out)
        results.append(run_study(sub))
    return results


_INT_KEYS = {"max_dimension", "nx", "ny", "oseen_max_iter", "grid_resolution", "analytic_output_dim"}
_FLOAT_KEYS = {"nu_visc", "oseen_tol", "relaxation"}
_STR_KEYS = {"model", "analytic_kind", "cache_root", "output_path"}
_BOOL_KEYS = {"include_interpolation_points"}


def parse_config(path) -> StudyConfig:
    """Read a flat key = value study file (# starts a comment line)."""
    values: dict[str, object] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _STR_KEYS:
                values[key] = value
            elif key in _BOOL_KEYS:
                if value.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(value)
                values[key] = value.lower() in ("true", "1")
            elif key == "point_rules":
                values[key] = tuple(v.strip() for v in value.split(","))
            elif key == "test_grid":
                values[key] = tuple(
                    tuple(float(c) for c in p.split(",")) for p in value.split(";")
                )
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    try:
        return StudyConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
