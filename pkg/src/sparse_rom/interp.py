"""Hierarchical sparse polynomial interpolation of vector-valued maps.

The interpolation operator over a downward-closed multi-index set is stored
in surplus form: one coefficient vector per index, multiplying the
tensorized hierarchical polynomial of that index.  Coefficients follow by
forward substitution because the collocation matrix over any linear
extension of the index set is unit lower-triangular.

A snapshot map is any callable y -> vector taking a point of [-1, 1]^d to a
real vector of fixed length D; it must be deterministic (repeated calls at
the same point return the identical vector).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .multiindex import (
    DownwardClosedSet,
    MultiIndex,
    as_multiindex,
    format_indices,
    parse_indices,
)
from .points import TensorGrid, UnivariatePointRule, rule_from_descriptor, tensor_point

SnapshotMap = Callable[[np.ndarray], np.ndarray]

MANIFEST_NAME = "manifest.txt"


def hierarchical_poly(k: int, y: float, rule: UnivariatePointRule) -> float:
    """Evaluate the degree-k hierarchical polynomial of ``rule`` at ``y``.

    h_k(y) is the product over j < k of (y - z_j)/(z_k - z_j); h_0 = 1.  It
    vanishes at the first k points of the rule and equals one at the k-th.
    """
    pts = rule.points
    if k >= len(pts):
        raise IndexError(f"degree {k} needs {k + 1} points, rule has {len(pts)}")
    num = 1.0
    den = 1.0
    for j in range(k):
        num *= y - pts[j]
        den *= pts[k] - pts[j]
    return num / den


def _univariate_values(y: float, rule: UnivariatePointRule, kmax: int) -> np.ndarray:
    """h_0(y) .. h_kmax(y) in one pass with a running numerator product."""
    pts = rule.points
    if kmax >= len(pts):
        raise IndexError(f"degree {kmax} needs {kmax + 1} points, rule has {len(pts)}")
    vals = np.empty(kmax + 1)
    vals[0] = 1.0
    num = 1.0
    for k in range(1, kmax + 1):
        num *= y - pts[k - 1]
        den = 1.0
        for j in range(k):
            den *= pts[k] - pts[j]
        vals[k] = num / den
    return vals


def tensor_hierarchical(nu: MultiIndex, y, grid: TensorGrid) -> float:
    """Product over directions j of h_{nu_j}(y_j)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (grid.dim,):
        raise ValueError(f"point shape {y.shape} does not match dimension {grid.dim}")
    if len(nu) != grid.dim:
        raise ValueError(f"index dimension {len(nu)} != grid dimension {grid.dim}")
    out = 1.0
    for j, e in enumerate(nu):
        out *= hierarchical_poly(e, y[j], grid.rules[j])
    return out


def evaluate_basis(
    indices: Sequence[MultiIndex], grid: TensorGrid, y
) -> np.ndarray:
    """Values H_nu(y) for every index, sharing per-direction tables."""
    y = np.asarray(y, dtype=float)
    if y.shape != (grid.dim,):
        raise ValueError(f"point shape {y.shape} does not match dimension {grid.dim}")
    kmax = [0] * grid.dim
    for nu in indices:
        for j, e in enumerate(nu):
            if e > kmax[j]:
                kmax[j] = e
    tables = [
        _univariate_values(y[j], grid.rules[j], kmax[j]) for j in range(grid.dim)
    ]
    out = np.empty(len(indices))
    for i, nu in enumerate(indices):
        v = 1.0
        for j, e in enumerate(nu):
            v *= tables[j][e]
        out[i] = v
    return out


@dataclass
class SparseInterpolant:
    """Sparse interpolation operator in hierarchical surplus form.

    coefficients[i] is the surplus vector of index_set[i]; row count matches
    the index set and all rows share the snapshot length D.  snapshot_count
    records how many snapshot-map evaluations construction has used.
    """

    index_set: DownwardClosedSet
    grid: TensorGrid
    coefficients: np.ndarray
    snapshot_count: int

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.ndim != 2:
            raise ValueError("coefficients must be a 2-D array (indices x DOFs)")
        if self.coefficients.shape[0] != len(self.index_set):
            raise ValueError(
                f"coefficient rows {self.coefficients.shape[0]} != index count "
                f"{len(self.index_set)}"
            )
        if self.index_set.dim != self.grid.dim:
            raise ValueError("index set and grid dimensions differ")

    @property
    def output_dim(self) -> int:
        return self.coefficients.shape[1]


def _snapshot_at(snapshot_map: SnapshotMap, z: np.ndarray, expect: int | None) -> np.ndarray:
    g = np.atleast_1d(np.asarray(snapshot_map(z), dtype=float))
    if g.ndim != 1:
        raise ValueError(f"snapshot map returned array of shape {g.shape}")
    if expect is not None and g.size != expect:
        raise ValueError(f"snapshot length {g.size} != expected {expect}")
    return g


def build(indices, grid: TensorGrid, snapshot_map: SnapshotMap) -> SparseInterpolant:
    """Construct the interpolant over ``indices`` by forward substitution.

    Indices are processed in their stored order; each surplus is the snapshot
    at the index's tensor point minus the partial interpolant there.  Exactly
    one snapshot evaluation happens per index.
    """
    if not isinstance(indices, DownwardClosedSet):
        indices = DownwardClosedSet(indices)
    coeffs = None
    for i, nu in enumerate(indices):
        z = tensor_point(nu, grid)
        g = _snapshot_at(snapshot_map, z, None if coeffs is None else coeffs.shape[1])
        if coeffs is None:
            coeffs = np.empty((len(indices), g.size))
        if i:
            basis = evaluate_basis(indices.indices[:i], grid, z)
            g = g - basis @ coeffs[:i]
        coeffs[i] = g
    return SparseInterpolant(indices, grid, coeffs, snapshot_count=len(indices))


def evaluate(interp: SparseInterpolant, y) -> np.ndarray:
    """Evaluate the interpolant at a point of [-1, 1]^d."""
    basis = evaluate_basis(interp.index_set.indices, interp.grid, y)
    return basis @ interp.coefficients


def enrich(
    interp: SparseInterpolant, extra: Iterable[MultiIndex], snapshot_map: SnapshotMap
) -> SparseInterpolant:
    """Extend the interpolant with further indices, reusing all coefficients.

    The union must stay downward closed in the extended order.  Existing
    surplus vectors are copied unchanged; exactly one snapshot evaluation
    happens per new index.
    """
    extra = [as_multiindex(nu) for nu in extra]
    grown = interp.index_set.extended(extra)
    if not extra:
        return SparseInterpolant(
            interp.index_set,
            interp.grid,
            interp.coefficients.copy(),
            interp.snapshot_count,
        )
    n_old = len(interp.index_set)
    coeffs = np.empty((len(grown), interp.output_dim))
    coeffs[:n_old] = interp.coefficients
    for i in range(n_old, len(grown)):
        nu = grown[i]
        z = tensor_point(nu, interp.grid)
        g = _snapshot_at(snapshot_map, z, interp.output_dim)
        basis = evaluate_basis(grown.indices[:i], interp.grid, z)
        coeffs[i] = g - basis @ coeffs[:i]
    return SparseInterpolant(
        grown, interp.grid, coeffs, interp.snapshot_count + len(extra)
    )


def save_interpolant(interp: SparseInterpolant, directory: str | os.PathLike) -> None:
    """Write an interpolant to a directory.

    Layout: a text manifest (dimension, output length, snapshot count, one
    point-rule descriptor per direction, the ordered index list) plus one
    little-endian float64 binary file per index, named by its exponents.
    """
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)
    lines = [
        f"dim={interp.grid.dim}",
        f"output_dim={interp.output_dim}",
        f"snapshot_count={interp.snapshot_count}",
    ]
    for rule in interp.grid.rules:
        lines.append(f"rule: {rule.describe()}")
    lines.append("indices:")
    lines.append(format_indices(interp.index_set.indices))
    with open(os.path.join(directory, MANIFEST_NAME), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for nu, row in zip(interp.index_set, interp.coefficients):
        name = "alpha_" + "_".join(str(e) for e in nu) + ".bin"
        with open(os.path.join(directory, name), "wb") as fh:
            fh.write(np.ascontiguousarray(row, dtype="<f8").tobytes())


def load_interpolant(directory: str | os.PathLike) -> SparseInterpolant:
    """Read an interpolant written by :func:`save_interpolant`."""
    directory = os.fspath(directory)
    with open(os.path.join(directory, MANIFEST_NAME)) as fh:
        text = fh.read()
    head, _, tail = text.partition("indices:\n")
    params = {}
    rules = []
    for line in head.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("rule:"):
            rules.append(rule_from_descriptor(line.split(":", 1)[1].strip()))
        else:
            key, _, value = line.partition("=")
            params[key] = value
    indices = parse_indices(tail)
    output_dim = int(params["output_dim"])
    coeffs = np.empty((len(indices), output_dim))
    for i, nu in enumerate(indices):
        name = "alpha_" + "_".join(str(e) for e in nu) + ".bin"
        with open(os.path.join(directory, name), "rb") as fh:
            row = np.frombuffer(fh.read(), dtype="<f8")
        if row.size != output_dim:
            raise ValueError(f"coefficient file {name} has length {row.size}")
        coeffs[i] = row
    return SparseInterpolant(
        DownwardClosedSet(indices),
        TensorGrid(tuple(rules)),
        coeffs,
        snapshot_count=int(params["snapshot_count"]),
    )
