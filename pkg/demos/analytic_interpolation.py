"""Sparse interpolation of closed-form targets, at library level.

Two short experiments:

1. The classic 1/(1 + 25 y^2) target: interpolants on Leja points converge
   steadily while the same polynomial spaces on naturally ordered
   equidistant points blow up (Runge's phenomenon).
2. A two-dimensional exp(sum y / 2) target interpolated along the canonical
   index sequence, showing the error as the set grows one index at a time.

Pass --plot out.png to save a semilog picture of experiment 1.
"""

import argparse

import numpy as np

from sparse_rom import (
    TensorGrid,
    analytic_map,
    build,
    canonical_sequence,
    enrich,
    evaluate,
    make_rule,
)


def runge_vs_natural(plot_path=None):
    target = analytic_map("runge")
    probes = np.linspace(-1.0, 1.0, 201)[1:-1]
    exact = np.array([target([y])[0] for y in probes])
    sizes = [5, 10, 15, 20, 25, 30]
    table = {}
    for kind in ("leja", "equidistant_natural"):
        errors = []
        for n in sizes:
            grid = TensorGrid([make_rule(kind, n)])
            interp = build(canonical_sequence(1, n), grid, target)
            vals = np.array([evaluate(interp, [y])[0] for y in probes])
            errors.append(np.max(np.abs(vals - exact)))
        table[kind] = errors
    print("max error on 199 interior probes, 1/(1 + 25 y^2)")
    print("     N      leja    natural-order equidistant")
    for i, n in enumerate(sizes):
        print(f"  {n:4d}  {table['leja'][i]:9.2e}  {table['equidistant_natural'][i]:9.2e}")
    print("same polynomial degree, same function; only the points differ.")

    if plot_path:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        for kind, marker in (("leja", "o"), ("equidistant_natural", "s")):
            ax.semilogy(sizes, table[kind], marker=marker, label=kind)
        ax.set_xlabel("points N")
        ax.set_ylabel("max error")
        ax.legend()
        fig.tight_layout()
        fig.savefig(plot_path, dpi=150)
        print(f"plot written to {plot_path}")


def growing_tensor_target():
    target = analytic_map("tensor_exp")
    rng = np.random.default_rng(3)
    probes = rng.uniform(-1.0, 1.0, size=(200, 2))
    exact = np.array([target(y)[0] for y in probes])
    sequence = canonical_sequence(2, 25)
    grid = TensorGrid([make_rule("leja", 7), make_rule("leja", 7)])
    interp = build(sequence[:1], grid, target)
    print("\nexp((y1 + y2) / 2), canonical index sequence, one index per step")
    print("     N  newest index   max error")
    for k, nu in enumerate(sequence[1:], start=2):
        interp = enrich(interp, [nu], target)
        vals = np.array([evaluate(interp, y)[0] for y in probes])
        err = np.max(np.abs(vals - exact))
        if k in (2, 4, 6, 10, 15, 20, 25):
            print(f"  {k:4d}  {str(nu):12s}  {err:9.2e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--plot", default=None, help="write a semilog error plot here")
    args = parser.parse_args()
    runge_vs_natural(args.plot)
    growing_tensor_target()


if __name__ == "__main__":
    main()
