import filecmp
import json

import pytest

from urbanmix.cli import main


def run(tmp_path, *args):
    out = tmp_path / "out"
    return main(["--out", str(out), *args]), out


def test_scale_outputs(tmp_path, capsys):
    code, out = run(tmp_path, "scale")
    assert code == 0
    printed = capsys.readouterr().out
    assert "4 inconsistencies flagged" in printed
    for name in ("scale_report.txt", "scale_mix_per_100k.csv",
                 "scale_reconciliation.csv", "scale_office_bands.csv"):
        assert (out / name).exists()
    mix = (out / "scale_mix_per_100k.csv").read_text().splitlines()
    assert len(mix) == 1 + 13
    counts = [int(line.split(",")[1]) for line in mix[1:]]
    assert sum(counts) == 834


def test_profiles_outputs(tmp_path):
    code, out = run(tmp_path, "profiles")
    assert code == 0
    for name in ("profiles_household.csv", "profiles_service.csv",
                 "load_residential-only.csv", "load_mixed.csv"):
        lines = (out / name).read_text().splitlines()
        assert len(lines) == 1 + 8760
    summary = json.loads((out / "profiles_summary.json").read_text())
    assert summary["phi"] > 1.0
    assert summary["household_annual_kwh"] == pytest.approx(3.5e8, rel=1e-9)


def test_generation_outputs(tmp_path):
    code, out = run(tmp_path, "generation")
    assert code == 0
    pv = (out / "generation_pv_unit.csv").read_text().splitlines()
    assert pv[0] == "hour,w_per_m2"
    wind = (out / "generation_wind_unit.csv").read_text().splitlines()
    assert wind[0] == "hour,kw"
    summary = json.loads((out / "generation_summary.json").read_text())
    assert summary["wind_peak_kw"] <= 500.0
    assert summary["pv_peak_w_per_m2"] <= 107.9


def test_sweep_outputs_and_determinism(tmp_path, capsys):
    code_a, out_a = run(tmp_path / "a", "sweep")
    code_b, out_b = run(tmp_path / "b", "sweep")
    assert code_a == code_b == 0
    assert "121" in capsys.readouterr().out
    for name in ("sweep_metrics.csv", "sweep_significance.csv", "sweep_deltas.csv"):
        assert filecmp.cmp(out_a / name, out_b / name, shallow=False)
    metrics = (out_a / "sweep_metrics.csv").read_text().splitlines()
    assert len(metrics) == 1 + 242


def test_classify_outputs(tmp_path):
    code, out = run(tmp_path, "classify", "--pv-mw", "399", "--wind-mw", "30")
    assert code == 0
    counts = (out / "category_counts.csv").read_text().splitlines()
    assert counts[-1].endswith(",8760")
    summary = json.loads((out / "mix_summary.json").read_text())
    assert summary["pv_mw"] == 399.0
    assert summary["turbines"] == 60


def test_optimize_outputs(tmp_path):
    code, out = run(tmp_path, "optimize")
    assert code == 0
    report = json.loads((out / "optimize_report.json").read_text())
    assert report["seed"] == 0
    assert report["constraint_slacks_m2"]["total_area"] >= -1.0


def test_validate_passes_on_fixture(tmp_path, capsys):
    code, out = run(tmp_path, "validate")
    assert code == 0
    text = (out / "validate_report.txt").read_text()
    assert "FAIL" not in text
    assert "SKIP" in text
    assert "fixture-only" in text
    assert capsys.readouterr().out.count("PASS") >= 4


def test_flags_accepted_before_and_after_subcommand(tmp_path):
    out_pre = tmp_path / "pre"
    out_post = tmp_path / "post"
    assert main(["--out", str(out_pre), "scale"]) == 0
    assert main(["scale", "--out", str(out_post)]) == 0
    assert filecmp.cmp(out_pre / "scale_report.txt",
                       out_post / "scale_report.txt", shallow=False)


def test_seed_changes_synthetic_weather(tmp_path):
    _, out_a = run(tmp_path / "a", "generation")
    code, out_b = main(["--out", str(tmp_path / "b" / "out"), "--seed", "7",
                        "generation"]), tmp_path / "b" / "out"
    assert code == 0
    assert not filecmp.cmp(out_a / "generation_pv_unit.csv",
                           out_b / "generation_pv_unit.csv", shallow=False)


def test_unknown_subcommand_is_usage_error(tmp_path, capsys):
    assert main(["--out", str(tmp_path / "out"), "frobnicate"]) == 1
    assert main([]) == 1


def test_missing_config_file_exits_1(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json"), "scale"]) == 1


def test_unknown_config_key_exits_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"year": 2014, "frobs": 3}))
    assert main(["--config", str(bad), "--out", str(tmp_path / "out"), "scale"]) == 1


def test_bad_weather_data_exits_2(tmp_path):
    weather = tmp_path / "weather.csv"
    lines = ["hour,ghi_wm2,temp_c,pressure_pa,wind_ms"]
    lines += [f"{i},-5.0,10.0,101325.0,4.0" for i in range(8760)]
    weather.write_text("\n".join(lines) + "\n")
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"year": 2014, "weather": "weather.csv"}))
    code = main(["--config", str(cfg), "--out", str(tmp_path / "out"), "generation"])
    assert code == 2


def test_config_file_drives_run(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"year": 2014, "seed": 3,
                               "mix_preset": {"pv_mw": 100.0, "wind_mw": 10.0}}))
    out = tmp_path / "out"
    code = main(["--config", str(cfg), "--out", str(out), "classify"])
    assert code == 0
    summary = json.loads((out / "mix_summary.json").read_text())
    assert summary["pv_mw"] == 100.0
    assert summary["turbines"] == 20
