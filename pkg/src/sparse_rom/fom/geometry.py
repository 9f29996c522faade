"""Parametrized channel geometries and structured quadrilateral meshes.

Channels are [0, L] x [0, 3] with a symmetric narrowing around mid-length.
The bottom boundary is a chain of quadratic parametric segments (straight
segments are quadratics with the control point on the chord); the top
boundary is its mirror about the centerline y = 1.5.  Meshes come from a
transfinite map of a fixed reference grid, so connectivity and DOF counts
never depend on the geometry parameters: vertical grid lines sit at the
bottom-boundary sample stations and nodes are blended linearly between the
two boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

CHANNEL_HEIGHT = 3.0

NARROWING_WIDTH = "narrowing_width"
CURVED_WALLS = "curved_walls"
STRAIGHT = "straight"

MODELS = (NARROWING_WIDTH, CURVED_WALLS, STRAIGHT)

# narrowing-width model: straight-edged wedges centered at x = 4.5 with
# streamwise extent 1.5 in a length-9 channel
WEDGE_CENTER = 4.5
WEDGE_EXTENT = 1.5
NARROWING_LENGTH = 9.0

# curved-walls model: fixed tips leave a gap of 1.0 at x = 4.5; the wall
# junctions sit 2.5 upstream/downstream of the tip so the quadratic edges
# keep a positive streamwise speed at maximal curvature
CURVED_LENGTH = 18.0
TIP_X = 4.5
TIP_GAP = 1.0
JUNCTION_OFFSET = 2.5
CURVATURE_SHIFT = 0.6


class GeometryError(ValueError):
    """Raised for degenerate geometry (closed gap, folded cells)."""


@dataclass(frozen=True)
class GeometrySpec:
    """Parametrized channel description.

    mu is the open-gap width of the narrowing-width model; curvature in
    [0, 1] morphs the curved-walls model from straight edges (0) to maximal
    curvature (1).  Geometries are symmetric about y = 1.5.
    """

    model: str
    mu: float | None = None
    curvature: float | None = None
    channel_height: float = CHANNEL_HEIGHT
    channel_length: float | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise GeometryError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.channel_height != CHANNEL_HEIGHT:
            raise GeometryError("channel height is fixed at 3")
        if self.model == NARROWING_WIDTH:
            if self.mu is None or not 0.1 <= self.mu <= 2.9:
                raise GeometryError(f"mu must lie in [0.1, 2.9], got {self.mu}")
            length = NARROWING_LENGTH if self.channel_length is None else self.channel_length
        elif self.model == CURVED_WALLS:
            if self.curvature is None or not 0.0 <= self.curvature <= 1.0:
                raise GeometryError(f"curvature must lie in [0, 1], got {self.curvature}")
            length = CURVED_LENGTH if self.channel_length is None else self.channel_length
        else:
            length = NARROWING_LENGTH if self.channel_length is None else self.channel_length
        if length <= 0:
            raise GeometryError(f"channel length must be positive, got {length}")
        object.__setattr__(self, "channel_length", float(length))


@dataclass(frozen=True)
class Segment:
    """Quadratic parametric curve through start, control (t=0.5), end."""

    start: tuple[float, float]
    control: tuple[float, float]
    end: tuple[float, float]

    @staticmethod
    def line(start, end) -> "Segment":
        mid = (0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1]))
        return Segment(tuple(start), mid, tuple(end))

    def at(self, t: np.ndarray) -> np.ndarray:
        """Points of shape (len(t), 2) via quadratic Lagrange interpolation."""
        t = np.asarray(t, dtype=float)
        l0 = 2.0 * (t - 0.5) * (t - 1.0)
        lc = -4.0 * t * (t - 1.0)
        l1 = 2.0 * t * (t - 0.5)
        p = np.array([self.start, self.control, self.end])
        return np.outer(l0, p[0]) + np.outer(lc, p[1]) + np.outer(l1, p[2])

    def chord(self) -> float:
        return float(np.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1]))


def bottom_segments(spec: GeometrySpec) -> list[Segment]:
    """The bottom boundary as an ordered chain of quadratic segments."""
    L = spec.channel_length
    if spec.model == STRAIGHT:
        return [Segment.line((0.0, 0.0), (L, 0.0))]
    if spec.model == NARROWING_WIDTH:
        x0 = WEDGE_CENTER - WEDGE_EXTENT / 2.0
        x1 = WEDGE_CENTER + WEDGE_EXTENT / 2.0
        tip = (WEDGE_CENTER, 1.5 - spec.mu / 2.0)
        return [
            Segment.line((0.0, 0.0), (x0, 0.0)),
            Segment.line((x0, 0.0), tip),
            Segment.line(tip, (x1, 0.0)),
            Segment.line((x1, 0.0), (L, 0.0)),
        ]
    x0 = TIP_X - JUNCTION_OFFSET
    x1 = TIP_X + JUNCTION_OFFSET
    tip = (TIP_X, 1.5 - TIP_GAP / 2.0)
    shift = CURVATURE_SHIFT * spec.curvature
    up = Segment.line((x0, 0.0), tip)
    down = Segment.line(tip, (x1, 0.0))
    up = Segment(up.start, (up.control[0] - shift, up.control[1]), up.end)
    down = Segment(down.start, (down.control[0] - shift, down.control[1]), down.end)
    return [
        Segment.line((0.0, 0.0), (x0, 0.0)),
        up,
        down,
        Segment.line((x1, 0.0), (L, 0.0)),
    ]


def allocate_cells(segments: list[Segment], nx: int) -> list[int]:
    """Split nx cells over the segments, proportionally to chord length.

    Largest-remainder rounding with a minimum of one cell per segment keeps
    segment ends on cell boundaries for any nx >= the segment count.
    """
    if nx < len(segments):
        raise GeometryError(f"nx={nx} is fewer than {len(segments)} boundary segments")
    chords = np.array([seg.chord() for seg in segments])
    quota = chords / chords.sum() * nx
    counts = np.maximum(np.floor(quota).astype(int), 1)
    while counts.sum() > nx:
        over = np.where(counts > 1, counts - quota, -np.inf)
        counts[np.argmax(over)] -= 1
    remainder = quota - counts
    while counts.sum() < nx:
        i = int(np.argmax(remainder))
        counts[i] += 1
        remainder[i] = -np.inf
    return counts.tolist()


@dataclass(frozen=True)
class Mesh:
    """Structured Taylor-Hood style mesh: biquadratic velocity nodes on a
    (2nx+1) x (2ny+1) grid, bilinear pressure nodes on (nx+1) x (ny+1).

    Velocity DOFs are ordered [all u_x, all u_y]; node k has u_x DOF k and
    u_y DOF n_nodes + k.  Connectivity is that of the reference grid and is
    identical for every parameter value of a model.
    """

    nx: int
    ny: int
    coords_v: np.ndarray
    coords_p: np.ndarray
    cells_v: np.ndarray
    cells_p: np.ndarray
    inlet_nodes: np.ndarray
    outlet_nodes: np.ndarray
    wall_nodes: np.ndarray
    spec: GeometrySpec = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.coords_v.shape[0]

    @property
    def n_pressure(self) -> int:
        return self.coords_p.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells_v.shape[0]

    @property
    def n_velocity_dofs(self) -> int:
        return 2 * self.n_nodes


def reference_spec(spec: GeometrySpec) -> GeometrySpec:
    """The same model at its center parameter value.

    Cell allocation is computed on this fixed geometry so that node
    placement, like connectivity, varies smoothly with the parameter
    (chord-based allocation on the actual geometry would jump at rounding
    thresholds and break the smoothness of the parameter-to-solution map).
    """
    if spec.model == NARROWING_WIDTH:
        return replace(spec, mu=1.5)
    if spec.model == CURVED_WALLS:
        return replace(spec, curvature=0.5)
    return spec


def _boundary_nodes(spec: GeometrySpec, nx: int) -> np.ndarray:
    """Sample the bottom boundary at the 2*nx+1 velocity stations."""
    segments = bottom_segments(spec)
    counts = allocate_cells(bottom_segments(reference_spec(spec)), nx)
    pieces = []
    for seg, n in zip(segments, counts):
        t = np.arange(2 * n + 1) / (2 * n)
        pts = seg.at(t)
        pieces.append(pts if not pieces else pts[1:])
    return np.vstack(pieces)


def _grid_connectivity(nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    nvy = 2 * ny + 1
    cells_v = np.empty((nx * ny, 9), dtype=int)
    cells_p = np.empty((nx * ny, 4), dtype=int)
    c = 0
    for cx in range(nx):
        for cy in range(ny):
            vn = [(2 * cx + li) * nvy + (2 * cy + lj) for li in range(3) for lj in range(3)]
            pn = [(cx + li) * (ny + 1) + (cy + lj) for li in range(2) for lj in range(2)]
            cells_v[c] = vn
            cells_p[c] = pn
            c += 1
    return cells_v, cells_p


def build_mesh(spec: GeometrySpec, nx: int, ny: int) -> Mesh:
    """Mesh the channel with nx x ny cells; raises GeometryError when the
    narrowing closes the gap or any cell Jacobian is non-positive."""
    if nx < 4 or ny < 4:
        raise GeometryError(f"need nx, ny >= 4, got {nx}x{ny}")
    bottom = _boundary_nodes(spec, nx)
    gap = spec.channel_height - 2.0 * bottom[:, 1]
    if gap.min() <= 0.0:
        raise GeometryError(f"narrowing closes the channel (min gap {gap.min():.3g})")
    nvx, nvy = 2 * nx + 1, 2 * ny + 1
    eta = np.arange(nvy) / (2 * ny)
    x = np.repeat(bottom[:, 0], nvy)
    y = (bottom[:, 1][:, None] + np.outer(gap, eta)).ravel()
    coords_v = np.column_stack([x, y])
    node = np.arange(nvx * nvy).reshape(nvx, nvy)
    coords_p = coords_v[node[::2, ::2].ravel()]
    cells_v, cells_p = _grid_connectivity(nx, ny)
    mesh = Mesh(
        nx=nx,
        ny=ny,
        coords_v=coords_v,
        coords_p=coords_p,
        cells_v=cells_v,
        cells_p=cells_p,
        inlet_nodes=node[0, :].copy(),
        outlet_nodes=node[-1, :].copy(),
        wall_nodes=np.concatenate([node[:, 0], node[:, -1]]),
        spec=spec,
    )
    from .fem import cell_jacobians

    detj = cell_jacobians(mesh)[1]
    if detj.min() <= 0.0:
        raise GeometryError(f"mesh folds over (min Jacobian {detj.min():.3g})")
    return mesh


def mesh_to_csv(mesh: Mesh, nodes_path, cells_path) -> None:
    """Write velocity node coordinates and cell connectivity as CSV tables."""
    with open(nodes_path, "w") as fh:
        fh.write("node,x,y\n")
        for k, (x, y) in enumerate(mesh.coords_v):
            fh.write(f"{k},{x!r},{y!r}\n")
    with open(cells_path, "w") as fh:
        fh.write("cell," + ",".join(f"v{a}" for a in range(9)) + "\n")
        for c, row in enumerate(mesh.cells_v):
            fh.write(f"{c}," + ",".join(str(v) for v in row) + "\n")
