"""Univariate interpolation point sequences and tensorized grids.

Provides Leja sequences (greedy maximizers of the distance product over a
fine candidate grid), their symmetrized variant, equidistant point sets and
Leja ordering of arbitrary sets.  Multivariate interpolation points are
formed by picking the entry of each direction's sequence selected by a
multi-index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multiindex import MultiIndex

DEFAULT_GRID_RESOLUTION = 100001

LEJA = "leja"
SYMMETRIZED_LEJA = "symmetrized_leja"
EQUIDISTANT_LEJA_ORDERED = "equidistant_leja_ordered"
EQUIDISTANT_NATURAL = "equidistant_natural"

RULE_KINDS = (LEJA, SYMMETRIZED_LEJA, EQUIDISTANT_LEJA_ORDERED, EQUIDISTANT_NATURAL)


def _argmax_prefer_larger(values: np.ndarray) -> int:
    """Index of the maximum, breaking exact ties toward the larger position."""
    return len(values) - 1 - int(np.argmax(values[::-1]))


def leja_sequence(
    n: int, x1: float = 0.0, grid_resolution: int = DEFAULT_GRID_RESOLUTION
) -> np.ndarray:
    """First ``n`` Leja points on [-1, 1] starting from ``x1``.

    Each new point maximizes the product of distances to the points chosen so
    far.  The maximization runs over a uniform candidate grid; exact ties are
    broken toward the larger candidate.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not -1.0 <= x1 <= 1.0:
        raise ValueError(f"x1 must lie in [-1, 1], got {x1}")
    if grid_resolution < 1000:
        raise ValueError(f"grid_resolution must be >= 1000, got {grid_resolution}")
    grid = np.linspace(-1.0, 1.0, grid_resolution)
    points = np.empty(n)
    points[0] = x1
    # running distance product F^N over the candidate grid
    objective = np.ones_like(grid)
    for k in range(1, n):
        objective *= np.abs(grid - points[k - 1])
        points[k] = grid[_argmax_prefer_larger(objective)]
    return points


def symmetrized_leja(
    n: int, grid_resolution: int = DEFAULT_GRID_RESOLUTION
) -> np.ndarray:
    """First ``n`` symmetrized Leja points: 0, 1, -1, then mirrored pairs.

    Even-numbered points (1-based) beyond the prescribed start maximize the
    distance product; each odd-numbered point is the negative of its
    predecessor, which keeps the sequence symmetric and the points distinct.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if grid_resolution < 1000:
        raise ValueError(f"grid_resolution must be >= 1000, got {grid_resolution}")
    start = np.array([0.0, 1.0, -1.0])
    if n <= 3:
        return start[:n].copy()
    grid = np.linspace(-1.0, 1.0, grid_resolution)
    points = np.empty(n)
    points[:3] = start
    objective = np.abs(grid) * np.abs(grid - 1.0) * np.abs(grid + 1.0)
    for k in range(3, n):
        if (k + 1) % 2 == 0:
            points[k] = grid[_argmax_prefer_larger(objective)]
        else:
            points[k] = -points[k - 1]
        objective *= np.abs(grid - points[k])
    return points


def leja_order(points) -> np.ndarray:
    """Reorder a set of distinct points in [-1, 1] by restricted Leja greed.

    The first point has maximal absolute value (ties favor the positive one);
    each following point maximizes the distance product over the remainder of
    the set.  The output is a permutation of the input.
    """
    pts = np.sort(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("point set must be non-empty")
    if np.unique(pts).size != pts.size:
        raise ValueError("input points must be distinct")
    if pts[0] < -1.0 or pts[-1] > 1.0:
        raise ValueError("points must lie in [-1, 1]")
    remaining = pts.copy()
    first = _argmax_prefer_larger(np.abs(remaining))
    ordered = [remaining[first]]
    remaining = np.delete(remaining, first)
    objective = np.ones_like(remaining)
    while remaining.size:
        objective *= np.abs(remaining - ordered[-1])
        pick = _argmax_prefer_larger(objective)
        ordered.append(remaining[pick])
        remaining = np.delete(remaining, pick)
        objective = np.delete(objective, pick)
    return np.array(ordered)


def equidistant(m: int) -> np.ndarray:
    """``m`` uniformly spaced points from -1 to 1 inclusive, left to right."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    return np.linspace(-1.0, 1.0, m)


@dataclass(frozen=True, eq=False)
class UnivariatePointRule:
    """An ordered sequence of mutually distinct interpolation points in [-1, 1]."""

    kind: str
    points: np.ndarray
    grid_resolution: int = DEFAULT_GRID_RESOLUTION

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if np.unique(pts).size != pts.size:
            raise ValueError("point rule entries must be mutually distinct")
        if pts.size and (pts.min() < -1.0 or pts.max() > 1.0):
            raise ValueError("point rule entries must lie in [-1, 1]")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def describe(self) -> str:
        """One-line textual descriptor, sufficient to rebuild the rule."""
        extra = ""
        if self.kind == LEJA:
            extra = f" x1={float(self.points[0])!r}"
        return f"{self.kind} n={len(self)}{extra} grid_resolution={self.grid_resolution}"


def rule_from_descriptor(text: str) -> UnivariatePointRule:
    """Rebuild a point rule from its :meth:`UnivariatePointRule.describe` line."""
    fields = text.split()
    kind = fields[0]
    params = dict(f.split("=", 1) for f in fields[1:])
    n = int(params["n"])
    res = int(params.get("grid_resolution", DEFAULT_GRID_RESOLUTION))
    if kind == LEJA:
        return leja_rule(n, x1=float(params["x1"]), grid_resolution=res)
    if kind == SYMMETRIZED_LEJA:
        return symmetrized_leja_rule(n, grid_resolution=res)
    if kind == EQUIDISTANT_LEJA_ORDERED:
        return equidistant_leja_ordered_rule(n)
    if kind == EQUIDISTANT_NATURAL:
        return equidistant_natural_rule(n)
    raise ValueError(f"unknown point rule kind {kind!r}")


def leja_rule(
    n: int, x1: float = 0.0, grid_resolution: int = DEFAULT_GRID_RESOLUTION
) -> UnivariatePointRule:
    """Plain Leja rule.  The default start x1 = 0 makes its first three points
    coincide with the symmetrized rule's prescribed 0, 1, -1."""
    return UnivariatePointRule(LEJA, leja_sequence(n, x1, grid_resolution), grid_resolution)


def symmetrized_leja_rule(
    n: int, grid_resolution: int = DEFAULT_GRID_RESOLUTION
) -> UnivariatePointRule:
    return UnivariatePointRule(SYMMETRIZED_LEJA, symmetrized_leja(n, grid_resolution), grid_resolution)


def equidistant_leja_ordered_rule(m: int) -> UnivariatePointRule:
    """Leja ordering of a frozen equidistant master set of size ``m``.

    Equidistant sets are not nested under refinement, so the master set is
    fixed per study and only its ordering follows the Leja greed.
    """
    return UnivariatePointRule(EQUIDISTANT_LEJA_ORDERED, leja_order(equidistant(m)))


def equidistant_natural_rule(m: int) -> UnivariatePointRule:
    """Equidistant points in natural left-to-right order (the negative control:
    prefixes cluster at the left end and give ill-conditioned interpolants)."""
    return UnivariatePointRule(EQUIDISTANT_NATURAL, equidistant(m))


def make_rule(
    kind: str,
    n: int,
    x1: float = 0.0,
    grid_resolution: int = DEFAULT_GRID_RESOLUTION,
) -> UnivariatePointRule:
    """Construct a rule of the given kind with ``n`` points."""
    if kind == LEJA:
        return leja_rule(n, x1, grid_resolution)
    if kind == SYMMETRIZED_LEJA:
        return symmetrized_leja_rule(n, grid_resolution)
    if kind == EQUIDISTANT_LEJA_ORDERED:
        return equidistant_leja_ordered_rule(n)
    if kind == EQUIDISTANT_NATURAL:
        return equidistant_natural_rule(n)
    raise ValueError(f"unknown point rule kind {kind!r}; expected one of {RULE_KINDS}")


@dataclass(frozen=True, eq=False)
class TensorGrid:
    """One univariate point rule per parameter direction."""

    rules: tuple[UnivariatePointRule, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ValueError("tensor grid needs at least one rule")

    @property
    def dim(self) -> int:
        return len(self.rules)


def tensor_point(nu: MultiIndex, grid: TensorGrid) -> np.ndarray:
    """Multivariate point selected by ``nu``: entry j of rule j, 0-based."""
    if len(nu) != grid.dim:
        raise ValueError(f"multi-index dimension {len(nu)} != grid dimension {grid.dim}")
    for j, (e, rule) in enumerate(zip(nu, grid.rules)):
        if e >= len(rule):
            raise IndexError(
                f"exponent {e} in direction {j} exceeds rule length {len(rule)}"
            )
    return np.array([grid.rules[j].points[e] for j, e in enumerate(nu)])
