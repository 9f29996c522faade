"""Vectorized finite element assembly on mapped quadrilateral meshes.

Velocity uses biquadratic (9-node) elements, pressure bilinear (4-node);
the pair is inf-sup stable.  Geometry is isoparametric with the velocity
basis.  All element integrals use a 3x3 Gauss rule and are assembled over
every cell at once with einsum, then scattered into scipy sparse COO.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .geometry import Mesh

_G = np.sqrt(3.0 / 5.0)
_P1 = np.array([-_G, 0.0, _G])
_W1 = np.array([5.0, 8.0, 5.0]) / 9.0

# tensorized 3x3 rule on [-1,1]^2, x-major to match local node ordering
QUAD_POINTS = np.array([(xi, eta) for xi in _P1 for eta in _P1])
QUAD_WEIGHTS = np.array([wx * we for wx in _W1 for we in _W1])


def _q2_1d(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic Lagrange values and derivatives at nodes -1, 0, 1."""
    vals = np.stack([0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)], axis=-1)
    ders = np.stack([t - 0.5, -2.0 * t, t + 0.5], axis=-1)
    return vals, ders


def _q1_1d(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals = np.stack([0.5 * (1.0 - t), 0.5 * (1.0 + t)], axis=-1)
    ders = np.broadcast_to(np.array([-0.5, 0.5]), vals.shape).copy()
    return vals, ders


def q2_shapes(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Biquadratic values (n, 9) and reference gradients (n, 9, 2).

    Local node a = 3*li + lj with li the xi-index and lj the eta-index.
    """
    vx, dx = _q2_1d(points[:, 0])
    ve, de = _q2_1d(points[:, 1])
    vals = np.einsum("ni,nj->nij", vx, ve).reshape(len(points), 9)
    gxi = np.einsum("ni,nj->nij", dx, ve).reshape(len(points), 9)
    geta = np.einsum("ni,nj->nij", vx, de).reshape(len(points), 9)
    return vals, np.stack([gxi, geta], axis=-1)


def q1_shapes(points: np.ndarray) -> np.ndarray:
    """Bilinear values (n, 4); local node b = 2*li + lj."""
    vx, _ = _q1_1d(points[:, 0])
    ve, _ = _q1_1d(points[:, 1])
    return np.einsum("ni,nj->nij", vx, ve).reshape(len(points), 4)


def cell_jacobians(mesh: Mesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature geometry for every cell.

    Returns (points, det, grad): physical quadrature points (ncell, nq, 2),
    Jacobian determinants (ncell, nq), and physical velocity-basis gradients
    (ncell, nq, 9, 2).
    """
    vals, grads = q2_shapes(QUAD_POINTS)
    xc = mesh.coords_v[mesh.cells_v]
    pts = np.einsum("qa,cad->cqd", vals, xc)
    # J[d, e] = d x_e / d xi_d, the transpose of the deformation gradient
    J = np.einsum("qad,cae->cqde", grads, xc)
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    inv = np.empty_like(J)
    inv[..., 0, 0] = J[..., 1, 1]
    inv[..., 0, 1] = -J[..., 0, 1]
    inv[..., 1, 0] = -J[..., 1, 0]
    inv[..., 1, 1] = J[..., 0, 0]
    inv /= det[..., None, None]
    # physical gradient: (grad_x phi)_e = sum_d inv[e, d] (grad_xi phi)_d
    grad = np.einsum("qad,cqed->cqae", grads, inv)
    return pts, det, grad


def _scatter(mesh, rows_local, cols_local, vals, row_cells, col_cells, shape):
    rows = row_cells[:, rows_local].ravel()
    cols = col_cells[:, cols_local].ravel()
    return sp.coo_matrix((vals.ravel(), (rows, cols)), shape=shape).tocsr()


class Operators:
    """Mesh-constant matrices and quadrature data shared by all solves.

    laplace and mass act on one scalar velocity component; div_x/div_y map a
    velocity component to pressure test functions.  lumped is the row-sum
    (lumped) velocity mass diagonal for one component.
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.points, self.det, self.grad = cell_jacobians(mesh)
        self.vals, _ = q2_shapes(QUAD_POINTS)
        self.pvals = q1_shapes(QUAD_POINTS)
        wdet = QUAD_WEIGHTS[None, :] * self.det
        self.wdet = wdet
        n, m = mesh.n_nodes, mesh.n_pressure
        aa, bb = np.meshgrid(np.arange(9), np.arange(9), indexing="ij")
        k = np.einsum("cq,cqad,cqbd->cab", wdet, self.grad, self.grad)
        self.laplace = _scatter(
            mesh, aa.ravel(), bb.ravel(), k, mesh.cells_v, mesh.cells_v, (n, n)
        )
        mloc = np.einsum("cq,qa,qb->cab", wdet, self.vals, self.vals)
        self.mass = _scatter(
            mesh, aa.ravel(), bb.ravel(), mloc, mesh.cells_v, mesh.cells_v, (n, n)
        )
        self.lumped = np.asarray(self.mass.sum(axis=1)).ravel()
        pa, vb = np.meshgrid(np.arange(4), np.arange(9), indexing="ij")
        dx = np.einsum("cq,qa,cqbe->cab", wdet, self.pvals, self.grad[..., :1])
        dy = np.einsum("cq,qa,cqbe->cab", wdet, self.pvals, self.grad[..., 1:])
        self.div_x = _scatter(
            mesh, pa.ravel(), vb.ravel(), dx, mesh.cells_p, mesh.cells_v, (m, n)
        )
        self.div_y = _scatter(
            mesh, pa.ravel(), vb.ravel(), dy, mesh.cells_p, mesh.cells_v, (m, n)
        )

    def convection(self, u: np.ndarray) -> sp.csr_matrix:
        """Advection matrix (w . grad phi_b, phi_a) with w the velocity field
        whose DOF vector is u ([u_x; u_y] layout)."""
        mesh = self.mesh
        n = mesh.n_nodes
        uxc = u[: n][mesh.cells_v]
        uyc = u[n :][mesh.cells_v]
        wq = np.stack(
            [np.einsum("qa,ca->cq", self.vals, uxc), np.einsum("qa,ca->cq", self.vals, uyc)],
            axis=-1,
        )
        adv = np.einsum("cq,qa,cqbd,cqd->cab", self.wdet, self.vals, self.grad, wq)
        aa, bb = np.meshgrid(np.arange(9), np.arange(9), indexing="ij")
        return _scatter(
            self.mesh, aa.ravel(), bb.ravel(), adv, mesh.cells_v, mesh.cells_v, (n, n)
        )

    def load(self, force) -> np.ndarray:
        """Body-force vector (f, phi_a) over both velocity components.

        force maps quadrature points (m, 2) to force values (m, 2); None
        gives the zero vector.
        """
        mesh = self.mesh
        out = np.zeros(mesh.n_velocity_dofs)
        if force is None:
            return out
        flat = self.points.reshape(-1, 2)
        fq = np.asarray(force(flat), dtype=float).reshape(self.det.shape + (2,))
        comp = np.einsum("cq,qa,cqd->cad", self.wdet, self.vals, fq)
        for d in range(2):
            np.add.at(out, d * mesh.n_nodes + mesh.cells_v, comp[..., d])
        return out

    def interpolate_pressure(self, p: np.ndarray) -> np.ndarray:
        """Pressure values at the velocity nodes (bilinear evaluation)."""
        local = np.array([(xi, eta) for xi in (-1.0, 0.0, 1.0) for eta in (-1.0, 0.0, 1.0)])
        table = q1_shapes(local)
        vals = np.einsum("ab,cb->ca", table, p[self.mesh.cells_p])
        out = np.zeros(self.mesh.n_nodes)
        out[self.mesh.cells_v] = vals
        return out


def velocity_norm(lumped: np.ndarray, u: np.ndarray) -> float:
    """Discrete L2 norm of a velocity DOF vector with lumped mass weights."""
    n = lumped.size
    return float(np.sqrt(lumped @ (u[:n] ** 2) + lumped @ (u[n:] ** 2)))
