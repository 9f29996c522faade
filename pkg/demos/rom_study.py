"""End-to-end reduced-order study on the narrowing-width channel.

Runs the study driver twice with a shared snapshot cache: the cold pass
solves the flow problem once per interpolation point plus once per test
point, the warm pass reuses every snapshot from disk and solves nothing.
Prints the error table and the solver-call accounting, and optionally a
semilog convergence plot.
"""

import argparse
import tempfile

from sparse_rom import StudyConfig, fom_solve_count, reset_fom_solve_count, run_study


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-dimension", type=int, default=12, help="largest interpolant size N")
    parser.add_argument("--nx", type=int, default=16)
    parser.add_argument("--ny", type=int, default=6)
    parser.add_argument("--cache", default=None, help="snapshot cache directory (default: fresh temp dir)")
    parser.add_argument("--plot", default=None, help="write a semilog error plot here")
    args = parser.parse_args()

    cache = args.cache or tempfile.mkdtemp(prefix="rom_cache_")
    cfg = StudyConfig(
        model="narrowing_width",
        point_rules=("leja",),
        max_dimension=args.max_dimension,
        nx=args.nx,
        ny=args.ny,
        cache_root=cache,
    )

    reset_fom_solve_count()
    rows = run_study(cfg)
    cold = fom_solve_count()
    print("interpolant size vs relative L2 error over the test grid")
    print("     N   mean error   max error")
    for row in rows:
        print(f"  {row.N:4d}  {row.mean_rel_l2:11.3e}  {row.max_rel_l2:11.3e}")
    print(f"cold pass: {cold} flow solves "
          f"({cfg.max_dimension} interpolation points + {cold - cfg.max_dimension} test points)")

    reset_fom_solve_count()
    warm_rows = run_study(cfg)
    print(f"warm pass: {fom_solve_count()} flow solves, "
          f"identical rows: {warm_rows == rows} (cache at {cache})")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.semilogy([r.N for r in rows], [r.mean_rel_l2 for r in rows], "o-", label="mean")
        ax.semilogy([r.N for r in rows], [r.max_rel_l2 for r in rows], "s--", label="max")
        ax.set_xlabel("interpolant size N")
        ax.set_ylabel("relative L2 error")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"plot written to {args.plot}")


if __name__ == "__main__":
    main()
