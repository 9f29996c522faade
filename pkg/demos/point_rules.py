"""Tour of the univariate interpolation-point families on [-1, 1].

Prints the first points of each rule, verifies the defining properties of
the Leja constructions (greedy distance-product growth, the 0/1/-1 prefix
and mirror symmetry of the symmetrized variant), and shows how Leja
ordering rearranges a fixed equidistant set.
"""

import numpy as np

from sparse_rom import RULE_KINDS, leja_order, make_rule, symmetrized_leja


def distance_product(points, y):
    return float(np.prod(np.abs(y - np.asarray(points))))


def main() -> None:
    n = 9
    print(f"first {n} points of each rule")
    for kind in RULE_KINDS:
        pts = make_rule(kind, n).points
        print(f"  {kind:26s} " + " ".join(f"{x:+.4f}" for x in pts))

    print("\nleja greed: each new point maximizes the distance product")
    pts = make_rule("leja", 6).points
    for k in range(1, 6):
        val = distance_product(pts[:k], pts[k])
        print(f"  point {k + 1}: {pts[k]:+.5f}, product over previous {k}: {val:.4f}")

    print("\nsymmetrized variant: fixed 0, 1, -1 prefix, then mirrored pairs")
    sym = symmetrized_leja(9)
    print("  prefix:", sym[:3])
    for k in range(3, 9, 2):
        print(f"  pair: {sym[k]:+.5f} / {sym[k + 1]:+.5f} (exact mirror: {sym[k + 1] == -sym[k]})")

    print("\nleja ordering of 7 equidistant points (left-to-right input)")
    natural = make_rule("equidistant_natural", 7).points
    print("  natural:", " ".join(f"{x:+.3f}" for x in natural))
    print("  ordered:", " ".join(f"{x:+.3f}" for x in leja_order(natural)))
    print("  same set, but every prefix of the ordered version is well spread;")
    print("  prefixes of the natural order cluster at the left end.")


if __name__ == "__main__":
    main()
