"""Steady incompressible Navier-Stokes via the Oseen fixed-point iteration.

Each iteration freezes the advecting velocity at the previous iterate and
solves one linear saddle-point system.  Boundary conditions: Dirichlet
inflow profile at x = 0, no-slip on the walls (including the narrowing),
and a stress-free (do-nothing) outlet, which is the natural condition of
the gradient-form weak formulation.  Iterates are damped by an optional
under-relaxation factor; with the default factor 1 a non-decreasing
difference triggers a one-time fallback to 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .fem import Operators, velocity_norm
from .geometry import Mesh


class SolverError(RuntimeError):
    """Raised when a linear solve produces an unusable solution."""


class DivergenceError(SolverError):
    """Raised when the Oseen iteration exhausts its budget; carries the
    per-iteration relative-difference trace."""

    def __init__(self, message: str, trace: Sequence[float]):
        super().__init__(message)
        self.trace = list(trace)


def parabolic_inflow(y: np.ndarray) -> np.ndarray:
    """Inlet profile u_x(0, y) = y (3 - y); zero at both walls."""
    return y * (3.0 - y)


@dataclass(frozen=True)
class FlowConfig:
    """Physical and iteration parameters of one flow problem."""

    nu_visc: float = 1.0
    body_force: Callable[[np.ndarray], np.ndarray] | None = None
    inflow: Callable[[np.ndarray], np.ndarray] = parabolic_inflow
    characteristic_velocity: float = 2.25
    characteristic_length: float = 3.0
    oseen_tol: float = 1e-10
    oseen_max_iter: int = 200
    relaxation: float = 1.0
    dirichlet_outlet: bool = False

    def __post_init__(self):
        if self.nu_visc <= 0:
            raise ValueError(f"nu_visc must be positive, got {self.nu_visc}")
        if self.oseen_tol <= 0:
            raise ValueError(f"oseen_tol must be positive, got {self.oseen_tol}")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError(f"relaxation must lie in (0, 1], got {self.relaxation}")
        if self.oseen_max_iter < 1:
            raise ValueError("oseen_max_iter must be >= 1")


@dataclass
class Field:
    """One flow state: velocity DOFs [u_x; u_y] and pressure DOFs."""

    u: np.ndarray
    p: np.ndarray
    mesh: Mesh = dataclass_field(repr=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.u.shape != (self.mesh.n_velocity_dofs,):
            raise ValueError(
                f"velocity length {self.u.shape} != {self.mesh.n_velocity_dofs}"
            )
        if self.p.shape != (self.mesh.n_pressure,):
            raise ValueError(f"pressure length {self.p.shape} != {self.mesh.n_pressure}")


def zero_field(mesh: Mesh) -> Field:
    return Field(np.zeros(mesh.n_velocity_dofs), np.zeros(mesh.n_pressure), mesh)


def poiseuille_field(mesh: Mesh, nu_visc: float) -> Field:
    """Analytic straight-channel solution: u_x = y(3-y), u_y = 0, and the
    linear pressure 2 nu (L - x) vanishing at the outlet."""
    y = mesh.coords_v[:, 1]
    u = np.concatenate([parabolic_inflow(y), np.zeros(mesh.n_nodes)])
    length = mesh.spec.channel_length
    p = 2.0 * nu_visc * (length - mesh.coords_p[:, 0])
    return Field(u, p, mesh)


def dirichlet_data(mesh: Mesh, cfg: FlowConfig) -> tuple[np.ndarray, np.ndarray]:
    """Constrained velocity DOF indices and their values.

    Inlet carries the inflow profile, walls are no-slip; the outlet is only
    constrained (homogeneously) when cfg.dirichlet_outlet is set.
    """
    n = mesh.n_nodes
    bc = np.full(2 * n, np.nan)
    bc[mesh.inlet_nodes] = cfg.inflow(mesh.coords_v[mesh.inlet_nodes, 1])
    bc[n + mesh.inlet_nodes] = 0.0
    if cfg.dirichlet_outlet:
        bc[mesh.outlet_nodes] = 0.0
        bc[n + mesh.outlet_nodes] = 0.0
    bc[mesh.wall_nodes] = 0.0
    bc[n + mesh.wall_nodes] = 0.0
    idx = np.flatnonzero(~np.isnan(bc))
    return idx, bc[idx]


def _linear_step(ops: Operators, cfg: FlowConfig, u_k: np.ndarray) -> Field:
    """One Oseen solve with advection frozen at u_k."""
    mesh = ops.mesh
    n, m = mesh.n_nodes, mesh.n_pressure
    a_block = cfg.nu_visc * ops.laplace + ops.convection(u_k)
    K = sp.bmat(
        [
            [a_block, None, -ops.div_x.T],
            [None, a_block, -ops.div_y.T],
            [ops.div_x, ops.div_y, None],
        ],
        format="csr",
    )
    rhs = np.concatenate([ops.load(cfg.body_force), np.zeros(m)])
    idx, vals = dirichlet_data(mesh, cfg)
    if cfg.dirichlet_outlet:
        # no natural boundary left; pin one pressure DOF to fix the constant
        idx = np.append(idx, 2 * n)
        vals = np.append(vals, 0.0)
    keep = np.ones(K.shape[0])
    keep[idx] = 0.0
    K = sp.diags(keep) @ K + sp.diags(1.0 - keep)
    rhs[idx] = vals
    x = spsolve(K.tocsr(), rhs)
    if not np.all(np.isfinite(x)):
        raise SolverError("linear Oseen solve returned non-finite values")
    resid = np.linalg.norm(K @ x - rhs) / (np.linalg.norm(rhs) + 1.0)
    if resid > 1e-8:
        raise SolverError(f"linear Oseen solve residual {resid:.3e} too large")
    return Field(x[: 2 * n], x[2 * n :], mesh)


def oseen_step(mesh: Mesh, cfg: FlowConfig, u_k: Field, ops: Operators | None = None) -> Field:
    """Solve the linear Oseen system with advecting velocity u_k."""
    if ops is None:
        ops = Operators(mesh)
    return _linear_step(ops, cfg, u_k.u)


@dataclass
class SolveResult:
    """Converged field plus the relative-difference trace of the iteration."""

    field: Field
    trace: list[float]
    iterations: int


def oseen_solve(
    mesh: Mesh,
    cfg: FlowConfig,
    u_init: Field | None = None,
    ops: Operators | None = None,
) -> SolveResult:
    """Iterate Oseen steps until the relative L2 velocity difference between
    successive (relaxed) iterates falls below cfg.oseen_tol."""
    if ops is None:
        ops = Operators(mesh)
    idx, vals = dirichlet_data(mesh, cfg)
    u_prev = (zero_field(mesh) if u_init is None else u_init).u.copy()
    omega = cfg.relaxation
    fell_back = False
    trace: list[float] = []
    for it in range(1, cfg.oseen_max_iter + 1):
        sol = _linear_step(ops, cfg, u_prev)
        u_next = (1.0 - omega) * u_prev + omega * sol.u
        u_next[idx] = vals
        denom = velocity_norm(ops.lumped, u_next)
        diff = velocity_norm(ops.lumped, u_next - u_prev) / max(denom, 1e-300)
        trace.append(diff)
        u_prev = u_next
        if diff < cfg.oseen_tol:
            return SolveResult(Field(u_next, sol.p, mesh), trace, it)
        if (
            not fell_back
            and omega == 1.0
            and len(trace) >= 2
            and trace[-1] >= trace[-2]
        ):
            omega = 0.5
            fell_back = True
    raise DivergenceError(
        f"Oseen iteration did not reach tol {cfg.oseen_tol:.1e} within "
        f"{cfg.oseen_max_iter} iterations (last diff {trace[-1]:.3e})",
        trace,
    )


def pullback(field: Field, expected_length: int | None = None) -> np.ndarray:
    """Velocity DOF vector in the shared reference numbering (a copy).

    Plain pullback: meshes of one model are topologically identical, so DOF
    k refers to the same reference location for every parameter value and
    no geometric re-interpolation happens.
    """
    if expected_length is not None and field.u.size != expected_length:
        raise ValueError(
            f"velocity DOF count {field.u.size} != expected {expected_length}"
        )
    return field.u.copy()


def reynolds(U: float, L: float, nu: float) -> float:
    """Reynolds number U L / nu."""
    if U <= 0 or L <= 0 or nu <= 0:
        raise ValueError("U, L, nu must all be positive")
    return U * L / nu


def divergence_residual(field: Field, ops: Operators | None = None) -> float:
    """Norm of the discrete divergence of the velocity, relative to the
    lumped-mass norm of the velocity itself."""
    if ops is None:
        ops = Operators(field.mesh)
    n = field.mesh.n_nodes
    r = ops.div_x @ field.u[:n] + ops.div_y @ field.u[n:]
    return float(np.linalg.norm(r) / max(velocity_norm(ops.lumped, field.u), 1e-300))


def field_to_csv(field: Field, path, ops: Operators | None = None) -> None:
    """Write x, y, u_x, u_y, p at every velocity node as CSV."""
    if ops is None:
        ops = Operators(field.mesh)
    n = field.mesh.n_nodes
    pv = ops.interpolate_pressure(field.p)
    with open(path, "w") as fh:
        fh.write("x,y,u_x,u_y,p\n")
        for k in range(n):
            x, y = field.mesh.coords_v[k]
            row = (x, y, field.u[k], field.u[n + k], pv[k])
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
