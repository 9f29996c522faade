"""Solve one steady channel flow and narrate the fixed-point iteration.

Builds the requested geometry, runs the Oseen iteration from a zero field,
and reports the convergence trace, the discrete divergence residual, and a
few physical readings (inlet/outlet flux, peak speed, pressure drop).
Optionally writes the nodal field to CSV.
"""

import argparse

import numpy as np

from sparse_rom.fom import (
    CURVED_WALLS,
    MODELS,
    NARROWING_WIDTH,
    FlowConfig,
    GeometrySpec,
    Operators,
    build_mesh,
    divergence_residual,
    field_to_csv,
    oseen_solve,
)


def flux_through(mesh, field, nodes):
    """Lumped x-flux through a vertical boundary line of velocity nodes."""
    ys = np.sort(mesh.coords_v[nodes, 1])
    ux = field.u[: mesh.n_nodes][nodes][np.argsort(mesh.coords_v[nodes, 1])]
    return float(np.trapezoid(ux, ys))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", default=NARROWING_WIDTH, choices=MODELS)
    parser.add_argument("--mu", type=float, default=0.8, help="open-gap width, model narrowing_width")
    parser.add_argument("--curvature", type=float, default=0.7, help="wall curvature, model curved_walls")
    parser.add_argument("--nu-visc", type=float, default=None, help="viscosity (default 1.0, or 0.18 for curved walls)")
    parser.add_argument("--nx", type=int, default=36)
    parser.add_argument("--ny", type=int, default=12)
    parser.add_argument("--out", default=None, help="write the nodal field to this CSV")
    args = parser.parse_args()

    spec = GeometrySpec(
        model=args.model,
        mu=args.mu if args.model == NARROWING_WIDTH else None,
        curvature=args.curvature if args.model == CURVED_WALLS else None,
    )
    nu = args.nu_visc if args.nu_visc is not None else (0.18 if args.model == CURVED_WALLS else 1.0)
    mesh = build_mesh(spec, args.nx, args.ny)
    print(f"model {args.model}: {mesh.n_cells} cells, {mesh.n_velocity_dofs} velocity DOFs, "
          f"{mesh.n_pressure} pressure DOFs, nu_visc = {nu}")

    ops = Operators(mesh)
    result = oseen_solve(mesh, FlowConfig(nu_visc=nu), ops=ops)
    print("relative velocity change per iteration:")
    for it, diff in enumerate(result.trace, start=1):
        print(f"  {it:3d}  {diff:.3e}")
    print(f"converged in {result.iterations} iterations")
    print(f"divergence residual: {divergence_residual(result.field, ops):.3e}")

    field = result.field
    ux = field.u[: mesh.n_nodes]
    speed = np.hypot(ux, field.u[mesh.n_nodes :])
    peak = int(np.argmax(speed))
    print(f"inlet flux  {flux_through(mesh, field, mesh.inlet_nodes):+.6f}")
    print(f"outlet flux {flux_through(mesh, field, mesh.outlet_nodes):+.6f}")
    print(f"peak speed {speed[peak]:.4f} at (x, y) = "
          f"({mesh.coords_v[peak, 0]:.3f}, {mesh.coords_v[peak, 1]:.3f})")
    print(f"pressure drop inlet -> outlet: {np.max(field.p) - np.min(field.p):.4f}")

    if args.out:
        field_to_csv(field, args.out, ops)
        print(f"field written to {args.out}")


if __name__ == "__main__":
    main()
