import filecmp
import json

import numpy as np
import pytest

from urbanmix.demand import MIXED, RESIDENTIAL_ONLY
from urbanmix.experiments import (CATEGORY_METRICS, SWEEP_TEST_METRICS,
                                  build_problem, capacity_axis, evaluate_cell,
                                  prepare, run_experiment1, run_experiment2,
                                  run_optimize, scenario_components,
                                  write_experiment1_tables,
                                  write_experiment2_tables)
from urbanmix.metrics import aggregate_from_series
from urbanmix.stats import apply_holm


@pytest.fixture(scope="module")
def prep(config2014):
    return prepare(config2014)


@pytest.fixture(scope="module")
def grid(config2014):
    return run_experiment1(config2014)


@pytest.fixture(scope="module")
def exp2(config2014):
    return run_experiment2(config2014)


def test_capacity_axis_default():
    caps = capacity_axis()
    assert len(caps) == 11
    assert caps[0] == 0.0
    assert caps[-1] == 525.0
    steps = np.diff(caps)
    assert steps == pytest.approx(np.full(10, 52.5))


def test_prepare_units(prep):
    assert len(prep.load_r_mw) == 8760
    # both cases carry the same annual energy by construction
    assert prep.load_r_mw.sum() == pytest.approx(prep.load_m_mw.sum(), rel=1e-9)
    # residential case is phi * household, in MW
    household_mw = prep.inputs.household.values / 1000.0
    assert prep.load_r_mw == pytest.approx(prep.phi * household_mw, rel=1e-12)
    assert not prep.load_r_mw.flags.writeable


def test_grid_has_121_cells(grid):
    assert len(grid.cells) == 121
    assert grid.pv_caps == capacity_axis()
    assert grid.wind_caps == capacity_axis()
    seen = {(c.pv_mw, c.wind_mw) for c in grid.cells}
    assert len(seen) == 121


def test_zero_capacity_cell(grid, prep):
    cell = grid.cell(0.0, 0.0)
    assert cell.residential.pos_mismatch == 0.0
    assert cell.residential.utilisation == 0.0
    assert cell.residential.neg_mismatch == pytest.approx(-float(prep.load_r_mw.sum()))
    assert cell.mixed.neg_mismatch == pytest.approx(-float(prep.load_m_mw.sum()))
    assert cell.residential.self_consumption is None
    assert cell.mixed.self_consumption is None
    assert cell.tests["self_consumption"].untestable


def test_cell_matches_pipeline_composition(prep):
    # evaluate_cell must agree with composing the public pieces by hand
    pv_mw, wind_mw = 105.0, 157.5
    cell = evaluate_cell(pv_mw, wind_mw, prep)
    pv_gen, wind_gen = scenario_components(pv_mw, wind_mw, prep)
    g = pv_gen + wind_gen
    for agg, load in ((cell.residential, prep.load_r_mw),
                      (cell.mixed, prep.load_m_mw)):
        oracle = aggregate_from_series(g, load)
        assert agg.pos_mismatch == pytest.approx(oracle.pos_mismatch, rel=1e-12)
        assert agg.neg_mismatch == pytest.approx(oracle.neg_mismatch, rel=1e-12)
        assert agg.utilisation == pytest.approx(oracle.utilisation, rel=1e-12)
        assert agg.self_consumption == pytest.approx(oracle.self_consumption,
                                                     rel=1e-12)
    # the delta columns are mixed minus residential
    m_r = g - prep.load_r_mw
    m_m = g - prep.load_m_mw
    pos_diff = float(np.maximum(m_m, 0).sum() - np.maximum(m_r, 0).sum())
    assert cell.delta_sums["pos_mwh"] == pytest.approx(pos_diff, rel=1e-9)
    assert cell.delta_hourly_means["pos_mwh"] == pytest.approx(pos_diff / 8760.0,
                                                               rel=1e-9)


def test_scenario_components_scale_linearly(prep):
    pv1, wind1 = scenario_components(100.0, 50.0, prep)
    pv2, wind2 = scenario_components(200.0, 50.0, prep)
    assert np.allclose(pv2, 2.0 * pv1, rtol=1e-12)
    assert np.array_equal(wind1, wind2)
    # 50 MW of 0.5 MW turbines = 100 machines
    _, wind_one = scenario_components(0.0, 0.5, prep)
    assert np.allclose(wind1, 100.0 * wind_one, rtol=1e-12)


def test_holm_family_is_all_121_scenarios(grid, config2014):
    for name in SWEEP_TEST_METRICS:
        family = [cell.tests[name] for cell in grid.cells]
        redone = apply_holm(family, alpha=config2014.alpha)
        assert [r.reject for r in redone] == [r.reject for r in family]
        assert any(r.reject for r in family)


def test_parallel_matches_serial(config2014, grid):
    parallel = run_experiment1(config2014, parallel=4)
    assert parallel.cells == grid.cells
    assert parallel.phi == grid.phi


def test_experiment1_tables_deterministic(grid, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    paths_a = write_experiment1_tables(grid, a)
    write_experiment1_tables(grid, b)
    for path in paths_a:
        assert filecmp.cmp(path, b / path.name, shallow=False)
    metrics = (a / "sweep_metrics.csv").read_text().splitlines()
    assert len(metrics) == 1 + 242
    assert metrics[0] == ("scenario_pv_mw,scenario_wind_mw,load_case,"
                          "pos_mwh,neg_mwh,util_mwh,self_consumption")
    first = metrics[1].split(",")
    assert first[2] == RESIDENTIAL_ONLY
    assert first[6] == ""  # SC undefined at zero capacity
    sig = (a / "sweep_significance.csv").read_text().splitlines()
    assert len(sig) == 1 + 484
    deltas = (a / "sweep_deltas.csv").read_text().splitlines()
    assert len(deltas) == 1 + 363


def test_experiment2_defaults_to_preset(exp2, config2014):
    assert exp2.pv_mw == config2014.mix_pv_mw == 399.0
    assert exp2.wind_mw == config2014.mix_wind_mw == 30.0
    assert exp2.summary["turbines"] == 60


def test_experiment2_counts(exp2):
    counts = exp2.counts
    assert len(counts) == 150
    assert sum(counts.values()) == 8760
    wind_totals = {b: 0 for b in range(1, 6)}
    for key, n in counts.items():
        wind_totals[key.wind_bin] += n
    assert wind_totals == {b: 1752 for b in range(1, 6)}


def test_experiment2_dark_hours_land_in_solar_bin_1(exp2, prep):
    # hours without solar output sit below the first edge, hence bin 1;
    # the clock bands still leave some categories structurally empty
    pv_gen, _ = scenario_components(exp2.pv_mw, exp2.wind_mw, prep)
    for key, pv in zip(exp2.keys, pv_gen):
        if pv == 0.0:
            assert key.solar_bin == 1
    assert any(n == 0 for n in exp2.counts.values())


def test_experiment2_aggregates_consistent(exp2, prep):
    # category totals of the mismatch metric must sum to the annual total
    pv_gen, wind_gen = scenario_components(exp2.pv_mw, exp2.wind_mw, prep)
    g = pv_gen + wind_gen
    for case, load in ((RESIDENTIAL_ONLY, prep.load_r_mw), (MIXED, prep.load_m_mw)):
        aggs = exp2.aggregates[(case, "mismatch")]
        total = sum(a.total for a in aggs.values())
        assert total == pytest.approx(float((g - load).sum()), rel=1e-9)
        assert sum(a.count for a in aggs.values()) == 8760


def test_experiment2_delta_is_generation_free(exp2, prep):
    # per-category sums of the load-case delta recover s - (phi-1) h
    delta = (prep.inputs.service.values / 1000.0
             - (prep.phi - 1.0) * prep.inputs.household.values / 1000.0)
    direct = {}
    for key, value in zip(exp2.keys, delta):
        direct[key] = direct.get(key, 0.0) + float(value)
    for key, agg in exp2.delta_aggregates.items():
        assert agg.total == pytest.approx(direct.get(key, 0.0), abs=1e-9)
    # the annual delta is ~zero because phi equalizes annual energies
    assert abs(float(delta.sum())) < 1e-6


def test_experiment2_tests_cover_all_categories(exp2):
    for metric in CATEGORY_METRICS:
        assert len(exp2.tests[metric]) == 150
        untestable = [k for k, r in exp2.tests[metric].items() if r.untestable]
        empty = [k for k, n in exp2.counts.items() if n == 0]
        for key in empty:
            assert key in untestable


def test_experiment2_tables(exp2, tmp_path):
    paths = write_experiment2_tables(exp2, tmp_path)
    names = {p.name for p in paths}
    assert "category_counts.csv" in names
    assert "mix_summary.json" in names
    for case in (RESIDENTIAL_ONLY, MIXED):
        for metric in CATEGORY_METRICS:
            assert f"categories_{case}_{metric}.csv" in names
    counts = (tmp_path / "category_counts.csv").read_text().splitlines()
    assert len(counts) == 1 + 30 + 1
    last = counts[-1].split(",")
    assert last[:3] == ["all", "all", "all"]
    assert last[-1] == "8760"
    summary = json.loads((tmp_path / "mix_summary.json").read_text())
    assert summary["pv_mw"] == exp2.pv_mw
    assert len(summary["solar_edges_pct"]) == 4


def test_build_problem_uses_fixture_roofs(prep):
    problem = build_problem(prep)
    assert problem.a_roof_m2 == pytest.approx(5_130_333.0)
    assert problem.phi_area == 3.0
    assert np.array_equal(problem.load_mw, prep.load_m_mw)
    assert np.array_equal(problem.g_pv, prep.pv_unit.values)


def test_run_optimize_writes_reports(config2014, tmp_path):
    problem, solution, report = run_optimize(config2014, out_dir=tmp_path)
    assert (tmp_path / "optimize_report.json").exists()
    assert (tmp_path / "optimize_solution.csv").exists()
    on_disk = json.loads((tmp_path / "optimize_report.json").read_text())
    assert on_disk["objective"] == report["objective"]
    assert problem.is_feasible(solution.x_pv_m2, solution.x_turbine_m2,
                               tol=1e-9 * problem.total_area_max)
