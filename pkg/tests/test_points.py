"""Tests for Leja point sequences, orderings, and tensorized grid points."""

import numpy as np
import pytest

from sparse_rom.points import (
    DEFAULT_GRID_RESOLUTION,
    EQUIDISTANT_LEJA_ORDERED,
    EQUIDISTANT_NATURAL,
    LEJA,
    SYMMETRIZED_LEJA,
    TensorGrid,
    UnivariatePointRule,
    equidistant,
    equidistant_leja_ordered_rule,
    equidistant_natural_rule,
    leja_order,
    leja_rule,
    leja_sequence,
    make_rule,
    rule_from_descriptor,
    symmetrized_leja,
    symmetrized_leja_rule,
    tensor_point,
)

FAST_RES = 20001


def brute_force_next_point(prefix, grid_resolution):
    """Oracle: scan the full candidate grid for the distance-product maximizer.

    Ties go to the larger candidate via the >= comparison in the scan.
    """
    grid = np.linspace(-1.0, 1.0, grid_resolution)
    F = np.prod(np.abs(grid[:, None] - np.asarray(prefix)[None, :]), axis=1)
    best = 0
    for i in range(len(grid)):
        if F[i] >= F[best]:
            best = i
    return grid[best]


def brute_force_leja_order(values):
    """Oracle: restricted greedy ordering with explicit product loops."""
    vals = list(map(float, values))
    ordered = [max(vals, key=lambda v: (abs(v), v))]
    vals.remove(ordered[0])
    while vals:
        scored = []
        for v in vals:
            prod = 1.0
            for u in ordered:
                prod *= abs(v - u)
            scored.append((prod, v))
        _, pick = max(scored)
        ordered.append(pick)
        vals.remove(pick)
    return ordered


def test_leja_prefix_zero_one_minus_one():
    assert leja_sequence(3, 0.0).tolist() == [0.0, 1.0, -1.0]


def test_leja_singleton_start():
    assert leja_sequence(1, 0.5).tolist() == [0.5]


def test_leja_fourth_point_near_positive_inflection():
    seq = leja_sequence(4, 0.0)
    # maximizer of |y||y-1||y+1| sits near 1/sqrt(3); tie-break takes the
    # positive side
    assert seq[3] > 0
    assert abs(seq[3] - 1.0 / np.sqrt(3.0)) < 2e-4
    assert abs(seq[3] - 0.57736) < 1e-10


def test_leja_matches_brute_force_default_grid():
    seq = leja_sequence(8, 0.0, DEFAULT_GRID_RESOLUTION)
    for k in range(1, 8):
        expected = brute_force_next_point(seq[:k], DEFAULT_GRID_RESOLUTION)
        assert seq[k] == expected


def test_leja_matches_brute_force_other_starts():
    rng = np.random.default_rng(3)
    for x1 in (-1.0, 0.25, float(rng.uniform(-1, 1))):
        seq = leja_sequence(10, x1, FAST_RES)
        for k in range(1, 10):
            assert seq[k] == brute_force_next_point(seq[:k], FAST_RES)


def test_leja_nested():
    long = leja_sequence(14, 0.0, FAST_RES)
    short = leja_sequence(6, 0.0, FAST_RES)
    assert np.array_equal(long[:6], short)


def test_leja_points_distinct_in_range():
    seq = leja_sequence(30, 0.0, FAST_RES)
    assert np.unique(seq).size == 30
    assert seq.min() >= -1.0 and seq.max() <= 1.0


def test_leja_preconditions():
    with pytest.raises(ValueError):
        leja_sequence(0, 0.0)
    with pytest.raises(ValueError):
        leja_sequence(3, 1.5)
    with pytest.raises(ValueError):
        leja_sequence(3, 0.0, grid_resolution=10)


def test_symmetrized_prefix_exact():
    assert symmetrized_leja(3).tolist() == [0.0, 1.0, -1.0]
    assert symmetrized_leja(1).tolist() == [0.0]


def test_symmetrized_five_mirrored_pair():
    sym = symmetrized_leja(5)
    m = brute_force_next_point([0.0, 1.0, -1.0], DEFAULT_GRID_RESOLUTION)
    assert sym.tolist() == [0.0, 1.0, -1.0, m, -m]
    assert abs(m - 0.57736) < 1e-10


def test_symmetrized_mirror_property_exact():
    sym = symmetrized_leja(21, FAST_RES)
    # 1-based odd N >= 3: x_N = -x_{N-1}, exactly
    for k in range(2, 21, 2):
        assert sym[k] == -sym[k - 1]


def test_symmetrized_even_steps_match_brute_force():
    sym = symmetrized_leja(13, FAST_RES)
    for k in range(3, 13, 2):
        assert sym[k] == brute_force_next_point(sym[:k], FAST_RES)


def test_symmetrized_nested_and_distinct():
    long = symmetrized_leja(19, FAST_RES)
    assert np.array_equal(long[:8], symmetrized_leja(8, FAST_RES))
    assert np.unique(long).size == 19


def test_leja_order_singleton():
    assert leja_order([0.3]).tolist() == [0.3]


def test_leja_order_three_points():
    assert leja_order([-1.0, 0.0, 1.0]).tolist() == [1.0, -1.0, 0.0]


def test_leja_order_five_equidistant():
    out = leja_order([-1.0, -0.5, 0.0, 0.5, 1.0])
    assert out.tolist() == [1.0, -1.0, 0.0, 0.5, -0.5]
    assert out[0] == 1.0 and out[1] == -1.0


def test_leja_order_is_permutation_and_matches_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        m = int(rng.integers(1, 12))
        vals = rng.uniform(-1, 1, size=m)
        while np.unique(vals).size != m:
            vals = rng.uniform(-1, 1, size=m)
        out = leja_order(vals)
        assert sorted(out.tolist()) == sorted(vals.tolist())
        assert out.tolist() == brute_force_leja_order(vals)


def test_leja_order_rejects_duplicates():
    with pytest.raises(ValueError):
        leja_order([0.1, 0.1, 0.5])


def test_equidistant_examples():
    assert equidistant(2).tolist() == [-1.0, 1.0]
    assert equidistant(3).tolist() == [-1.0, 0.0, 1.0]
    assert equidistant(5).tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        equidistant(1)


def test_rule_constructors_and_kinds():
    assert leja_rule(5).kind == LEJA
    assert symmetrized_leja_rule(5).kind == SYMMETRIZED_LEJA
    assert equidistant_leja_ordered_rule(5).kind == EQUIDISTANT_LEJA_ORDERED
    assert equidistant_natural_rule(5).kind == EQUIDISTANT_NATURAL
    for kind in (LEJA, SYMMETRIZED_LEJA, EQUIDISTANT_LEJA_ORDERED, EQUIDISTANT_NATURAL):
        assert len(make_rule(kind, 7, grid_resolution=FAST_RES)) == 7
    with pytest.raises(ValueError):
        make_rule("chebyshev", 5)


def test_rule_rejects_duplicates_and_out_of_range():
    with pytest.raises(ValueError):
        UnivariatePointRule(LEJA, np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        UnivariatePointRule(LEJA, np.array([0.0, 1.5]))


def test_rule_descriptor_roundtrip():
    for rule in (
        leja_rule(6, x1=0.25, grid_resolution=FAST_RES),
        symmetrized_leja_rule(6, grid_resolution=FAST_RES),
        equidistant_leja_ordered_rule(6),
        equidistant_natural_rule(6),
    ):
        rebuilt = rule_from_descriptor(rule.describe())
        assert rebuilt.kind == rule.kind
        assert np.array_equal(rebuilt.points, rule.points)


def test_tensor_point_selection():
    grid = TensorGrid((leja_rule(3, grid_resolution=FAST_RES),) * 2)
    assert grid.dim == 2
    assert tensor_point((0, 0), grid).tolist() == [0.0, 0.0]
    assert tensor_point((1, 0), grid).tolist() == [1.0, 0.0]
    assert tensor_point((2, 1), grid).tolist() == [-1.0, 1.0]


def test_tensor_point_out_of_range():
    grid = TensorGrid((leja_rule(3, grid_resolution=FAST_RES),) * 2)
    with pytest.raises(IndexError):
        tensor_point((3, 0), grid)
    with pytest.raises(ValueError):
        tensor_point((0, 0, 0), grid)
