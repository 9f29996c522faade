"""Study-driver tests: error metric, config handling, incremental error
rows cross-checked against freshly built interpolants, snapshot economy,
and cache-backed reproducibility."""

import numpy as np
import pytest

import sparse_rom.harness as harness
from sparse_rom.harness import (
    ConfigError,
    ErrorRow,
    StudyConfig,
    compare_point_rules,
    parse_config,
    relative_l2_error,
    resolved_test_grid,
    run_study,
)
from sparse_rom.interp import build, evaluate
from sparse_rom.multiindex import canonical_sequence
from sparse_rom.points import TensorGrid, make_rule
from sparse_rom.providers import analytic_map, fom_solve_count, reset_fom_solve_count


# -------------------------------------------------------------- error metric


def test_relative_l2_error_examples():
    rng = np.random.default_rng(2)
    ref = rng.normal(size=12)
    w = rng.uniform(0.5, 2.0, size=12)
    assert relative_l2_error(ref, ref, w) == 0.0
    assert relative_l2_error(np.zeros(12), ref, w) == pytest.approx(1.0, rel=1e-14)
    assert relative_l2_error(1.01 * ref, ref, w) == pytest.approx(0.01, rel=1e-12)


def test_relative_l2_error_validation():
    with pytest.raises(ValueError):
        relative_l2_error(np.zeros(3), np.zeros(4), np.ones(3))
    with pytest.raises(ValueError):
        relative_l2_error(np.zeros(3), np.zeros(3), np.ones(4))
    with pytest.raises(ValueError):
        relative_l2_error(np.ones(3), np.zeros(3), np.ones(3))


def test_error_row_invariant():
    ErrorRow(1, 0.1, 0.5)
    with pytest.raises(ValueError):
        ErrorRow(1, 0.5, 0.2)
    with pytest.raises(ValueError):
        ErrorRow(1, -0.1, 0.2)


# ------------------------------------------------------------- configuration


def test_study_config_validation():
    with pytest.raises(ConfigError):
        StudyConfig(model="potential_flow")
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic")  # kind missing
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic", analytic_kind="weierstrass")
    with pytest.raises(ConfigError):
        StudyConfig(model="narrowing_width", analytic_kind="runge")
    with pytest.raises(ConfigError):
        StudyConfig(model="curved_walls", point_rules=("leja",))
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic", analytic_kind="runge", point_rules=("leja", "leja"))
    with pytest.raises(ConfigError):
        StudyConfig(model="narrowing_width", point_rules=("chebyshev",))
    with pytest.raises(ConfigError):
        StudyConfig(model="narrowing_width", max_dimension=0)
    with pytest.raises(ConfigError):
        StudyConfig(model="narrowing_width", nx=3)
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic", analytic_kind="runge", test_grid=())
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic", analytic_kind="runge", test_grid=((0.1,), (0.1,)))
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic", analytic_kind="runge", test_grid=((1.5,),))
    with pytest.raises(ConfigError):
        StudyConfig(model="analytic", analytic_kind="runge", test_grid=((0.1, 0.2),))


def test_default_test_grids():
    m1 = StudyConfig(model="narrowing_width")
    grid1 = resolved_test_grid(m1)
    assert len(grid1) == 40
    assert len(set(grid1)) == 40
    assert all(len(p) == 1 and -1.0 < p[0] < 1.0 for p in grid1)
    m2 = StudyConfig(model="curved_walls", point_rules=("leja", "leja"))
    grid2 = resolved_test_grid(m2)
    assert len(grid2) == 72
    assert len({p[0] for p in grid2}) == 12
    assert len({p[1] for p in grid2}) == 6
    custom = StudyConfig(model="narrowing_width", test_grid=((0.5,), (-0.25,)))
    assert resolved_test_grid(custom) == ((0.5,), (-0.25,))


# ------------------------------------------------------------------ studies


def test_run_study_rows_and_csv(tmp_path):
    out = tmp_path / "errors.csv"
    cfg = StudyConfig(
        model="analytic",
        analytic_kind="tensor_exp",
        point_rules=("leja", "leja"),
        max_dimension=8,
        output_path=str(out),
    )
    rows = run_study(cfg)
    assert [r.N for r in rows] == list(range(1, 9))
    for r in rows:
        assert 0.0 <= r.mean_rel_l2 <= r.max_rel_l2
    lines = out.read_text().splitlines()
    assert lines[0] == "N,mean_rel_l2,max_rel_l2"
    assert len(lines) == 9
    for r, line in zip(rows, lines[1:]):
        n_text, mean_text, max_text = line.split(",")
        assert int(n_text) == r.N
        assert float(mean_text) == r.mean_rel_l2  # repr round-trips exactly
        assert float(max_text) == r.max_rel_l2


def test_run_study_matches_fresh_interpolants():
    cfg = StudyConfig(
        model="analytic",
        analytic_kind="sine_field",
        point_rules=("leja", "symmetrized_leja"),
        max_dimension=10,
        analytic_output_dim=6,
    )
    rows = run_study(cfg)
    snap = analytic_map("sine_field", output_dim=6)
    sequence = canonical_sequence(2, 10)
    needed = np.max(np.array(sequence), axis=0) + 1
    grid = TensorGrid(
        (make_rule("leja", int(needed[0])), make_rule("symmetrized_leja", int(needed[1])))
    )
    test_points = resolved_test_grid(cfg)
    weights = np.ones(6)
    for n in (1, 4, 7, 10):
        fresh = build(sequence[:n], grid, snap)
        errs = [
            relative_l2_error(evaluate(fresh, np.array(t)), snap(np.array(t)), weights)
            for t in test_points
        ]
        assert rows[n - 1].mean_rel_l2 == pytest.approx(float(np.mean(errs)), abs=1e-12)
        assert rows[n - 1].max_rel_l2 == pytest.approx(float(np.max(errs)), abs=1e-12)


def test_run_study_best_error_in_final_quartile():
    cfg = StudyConfig(
        model="analytic", analytic_kind="tensor_exp", point_rules=("leja",), max_dimension=16
    )
    rows = run_study(cfg)
    means = np.array([r.mean_rel_l2 for r in rows])
    assert int(np.argmin(means)) + 1 > 12
    assert means[-1] < 1e-8


def test_run_study_rejects_overlapping_test_grid():
    cfg = StudyConfig(
        model="analytic",
        analytic_kind="runge",
        point_rules=("leja",),
        max_dimension=5,
        test_grid=((0.0,), (0.3,)),  # 0.0 is the first Leja point
    )
    with pytest.raises(ConfigError):
        run_study(cfg)
    allowed = StudyConfig(
        model="analytic",
        analytic_kind="runge",
        point_rules=("leja",),
        max_dimension=5,
        test_grid=((0.0,), (0.3,)),
        include_interpolation_points=True,
    )
    rows = run_study(allowed)
    assert rows[-1].mean_rel_l2 >= 0.0


def test_leja_beats_natural_ordering_on_runge():
    # negative control: natural equidistant ordering falls apart on the
    # Runge map while Leja steadily improves
    cfg = StudyConfig(
        model="analytic", analytic_kind="runge", point_rules=("leja",), max_dimension=20
    )
    leja_rows, natural_rows = compare_point_rules(cfg, ["leja", "equidistant_natural"])
    assert leja_rows[-1].mean_rel_l2 < 0.15
    assert leja_rows[-1].mean_rel_l2 < leja_rows[4].mean_rel_l2
    for row in natural_rows[14:]:
        assert row.mean_rel_l2 > 0.5


def test_run_study_fom_counting_and_warm_cache(tmp_path):
    out = tmp_path / "m1.csv"
    cfg = StudyConfig(
        model="narrowing_width",
        point_rules=("leja",),
        max_dimension=4,
        test_grid=((-0.8,), (-0.3,), (0.2,), (0.6,), (0.9,)),
        nx=8,
        ny=4,
        cache_root=str(tmp_path / "cache"),
        output_path=str(out),
    )
    reset_fom_solve_count()
    rows = run_study(cfg)
    assert fom_solve_count() == 4 + 5
    first_csv = out.read_bytes()
    assert len(rows) == 4
    # two cache fingerprints: snapshots and shared references
    assert len(list((tmp_path / "cache").iterdir())) == 2

    reset_fom_solve_count()
    again = run_study(cfg)
    assert fom_solve_count() == 0
    assert out.read_bytes() == first_csv
    for a, b in zip(rows, again):
        assert (a.N, a.mean_rel_l2, a.max_rel_l2) == (b.N, b.mean_rel_l2, b.max_rel_l2)


def test_run_study_flushes_partial_rows(tmp_path, monkeypatch):
    calls = {"n": 0}

    def flaky(study, y, initial=None):
        calls["n"] += 1
        if calls["n"] > 5:  # 3 references + 2 snapshots succeed
            raise RuntimeError("solver exploded")
        return np.full(4, float(np.sum(np.atleast_1d(y))) + calls["n"])

    monkeypatch.setattr(harness, "fom_snapshot", flaky)
    monkeypatch.setattr(harness, "_reference_weights", lambda cfg, n: np.ones(n))
    out = tmp_path / "partial.csv"
    cfg = StudyConfig(
        model="narrowing_width",
        point_rules=("leja",),
        max_dimension=6,
        test_grid=((-0.5,), (0.1,), (0.7,)),
        nx=8,
        ny=4,
        output_path=str(out),
    )
    with pytest.raises(RuntimeError, match="solver exploded"):
        run_study(cfg)
    lines = out.read_text().splitlines()
    assert lines[0] == "N,mean_rel_l2,max_rel_l2"
    assert len(lines) == 1 + 2


def test_compare_point_rules_shares_references(tmp_path):
    out = tmp_path / "cmp.csv"
    cfg = StudyConfig(
        model="narrowing_width",
        point_rules=("leja",),
        max_dimension=3,
        test_grid=((-0.7,), (0.15,), (0.8,)),
        nx=8,
        ny=4,
        cache_root=str(tmp_path / "cache"),
        output_path=str(out),
    )
    reset_fom_solve_count()
    results = compare_point_rules(cfg, ["leja", "equidistant_leja_ordered"])
    # references solved once, snapshots once per rule
    assert fom_solve_count() == 3 + 2 * 3
    assert len(results) == 2
    assert (tmp_path / "cmp_leja.csv").exists()
    assert (tmp_path / "cmp_equidistant_leja_ordered.csv").exists()
    for rows in results:
        assert [r.N for r in rows] == [1, 2, 3]


def test_compare_single_rule_matches_run_study(tmp_path):
    cfg = StudyConfig(
        model="analytic",
        analytic_kind="tensor_exp",
        point_rules=("leja", "leja"),
        max_dimension=6,
    )
    (only,) = compare_point_rules(cfg, ["leja"])
    direct = run_study(cfg)
    for a, b in zip(only, direct):
        assert (a.N, a.mean_rel_l2, a.max_rel_l2) == (b.N, b.mean_rel_l2, b.max_rel_l2)


# --------------------------------------------------------------- config file


def test_parse_config_round_trip(tmp_path):
    text = """
# convergence study over the narrowing channel
model = narrowing_width
point_rules = leja
max_dimension = 7
nx = 8
ny = 4
nu_visc = 0.9
oseen_tol = 1e-9
oseen_max_iter = 150
relaxation = 0.8
cache_root = /tmp/cache
output_path = /tmp/out.csv
grid_resolution = 20001
include_interpolation_points = false
test_grid = -0.5; 0.0; 0.5
"""
    path = tmp_path / "study.cfg"
    path.write_text(text)
    cfg = parse_config(path)
    assert cfg.model == "narrowing_width"
    assert cfg.point_rules == ("leja",)
    assert cfg.max_dimension == 7
    assert cfg.nx == 8 and cfg.ny == 4
    assert cfg.nu_visc == 0.9
    assert cfg.oseen_tol == 1e-9
    assert cfg.oseen_max_iter == 150
    assert cfg.relaxation == 0.8
    assert cfg.cache_root == "/tmp/cache"
    assert cfg.output_path == "/tmp/out.csv"
    assert cfg.grid_resolution == 20001
    assert cfg.include_interpolation_points is False
    assert cfg.test_grid == ((-0.5,), (0.0,), (0.5,))


def test_parse_config_multidimensional_grid(tmp_path):
    path = tmp_path / "study.cfg"
    path.write_text(
        "model = analytic\nanalytic_kind = tensor_exp\npoint_rules = leja, symmetrized_leja\n"
        "test_grid = -0.5, 0.5; 0.25, -0.75\n"
    )
    cfg = parse_config(path)
    assert cfg.point_rules == ("leja", "symmetrized_leja")
    assert cfg.test_grid == ((-0.5, 0.5), (0.25, -0.75))


def test_parse_config_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("model = narrowing_width\nwarp_factor = 9\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(path)
    path.write_text("model = narrowing_width\nmodel = curved_walls\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(path)
    path.write_text("model = narrowing_width\nnx = eight\n")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config(path)
    path.write_text("model = narrowing_width\nnx\n")
    with pytest.raises(ConfigError, match="expected key"):
        parse_config(path)
    path.write_text("model = escher_stairs\n")
    with pytest.raises(ConfigError):
        parse_config(path)
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.cfg")
