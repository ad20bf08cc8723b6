"""Command-line entry point.

Exit codes: 0 success, 2 validation failure, 1 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments, tabular, validation
from .config import ConfigError, SimulationConfig, assemble, default_config, load_config
from .demand import MIXED, RESIDENTIAL_ONLY, build_load_cases
from .generation import pv_unit_series, wind_unit_series
from .ingest import write_series
from .scaling import build_service_mix


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; this project reserves 2 for
    validation failures, so usage problems are rethrown as config errors."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> _Parser:
    # Global flags are accepted both before and after the subcommand. The
    # shared parent suppresses defaults so a subparser never clobbers a value
    # given before the subcommand; real defaults live on the root namespace.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="JSON run configuration (defaults are built in)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="override the configured random seed")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS,
                        help="output directory (default: ./out)")
    common.add_argument("--parallel", type=int, default=argparse.SUPPRESS,
                        help="worker count for scenario evaluation")

    parser = _Parser(prog="urbanmix", parents=[common],
                     description="Urban electricity demand, renewable generation, "
                                 "and mix integration experiments.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("scale", parents=[common],
                   help="per-100k building mix and reconciliation report")
    sub.add_parser("profiles", parents=[common],
                   help="synthesize household/service demand and load cases")
    sub.add_parser("generation", parents=[common],
                   help="per-unit PV and wind generation series")
    sub.add_parser("sweep", parents=[common],
                   help="capacity scenario grid with significance tests")
    p_classify = sub.add_parser("classify", parents=[common],
                                help="time/weather category study at one mix")
    p_classify.add_argument("--pv-mw", type=float, default=argparse.SUPPRESS,
                            help="installed PV capacity (default: config preset)")
    p_classify.add_argument("--wind-mw", type=float, default=argparse.SUPPRESS,
                            help="installed wind capacity (default: config preset)")
    sub.add_parser("optimize", parents=[common],
                   help="area-constrained generation mix search")
    sub.add_parser("validate", parents=[common],
                   help="fixture reconciliation and model sanity battery")
    return parser


def _resolve_config(args) -> SimulationConfig:
    config = load_config(args.config) if args.config is not None else default_config()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def cmd_scale(args, config: SimulationConfig) -> int:
    fixture = config.scaling_fixture
    report = validation.reconcile_published(fixture)
    text = validation.render_reconciliation(report)
    print(text)

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "scale_report.txt").write_text(text + "\n", encoding="utf-8")

    mix = build_service_mix(fixture.specs,
                            households_per_100k=fixture.households_per_100k)
    tabular.write_csv(out / "scale_mix_per_100k.csv",
                      ("building_type", "per_100k"), list(mix.items()))
    tabular.write_csv(
        out / "scale_reconciliation.csv",
        ("building_type", "published_national", "recomputed_national",
         "national_delta", "published_per_100k", "recomputed_per_100k",
         "alt_published_per_100k", "verdict", "detail"),
        [(r.name, r.published_national, r.recomputed_national, r.national_delta,
          r.published_per_100k, r.recomputed_per_100k, r.alt_published_per_100k,
          r.verdict, r.detail) for r in report.rows])
    if report.band_rows:
        tabular.write_csv(
            out / "scale_office_bands.csv",
            ("band", "published_count", "recomputed_count", "delta",
             "published_area_m2", "recomputed_area_m2", "verdict"),
            [(b.label, b.published_count, b.recomputed_count, b.delta,
              b.published_area_m2, b.recomputed_area_m2, b.verdict)
             for b in report.band_rows])
    return 0


def cmd_profiles(args, config: SimulationConfig) -> int:
    inputs = assemble(config)
    residential, mixed, phi = build_load_cases(inputs.household, inputs.service)
    out: Path = args.out
    write_series(inputs.household, out / "profiles_household.csv", value_column="kw")
    write_series(inputs.service, out / "profiles_service.csv", value_column="kw")
    write_series(residential.series, out / f"load_{RESIDENTIAL_ONLY}.csv", value_column="kw")
    write_series(mixed.series, out / f"load_{MIXED}.csv", value_column="kw")
    summary = {
        "phi": phi,
        "household_annual_kwh": inputs.household.total(),
        "service_annual_kwh": inputs.service.total(),
        "peak_residential_only_kw": float(residential.series.values.max()),
        "peak_mixed_kw": float(mixed.series.values.max()),
    }
    (out / "profiles_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"phi = {phi!r}; wrote demand series to {out}")
    return 0


def cmd_generation(args, config: SimulationConfig) -> int:
    inputs = assemble(config)
    pv_unit = pv_unit_series(inputs.weather, inputs.calendar.year, config.pv)
    wind_unit = wind_unit_series(inputs.weather, inputs.calendar.year, config.turbine)
    out: Path = args.out
    write_series(pv_unit, out / "generation_pv_unit.csv", value_column="w_per_m2")
    write_series(wind_unit, out / "generation_wind_unit.csv", value_column="kw")
    summary = {
        "pv_annual_kwh_per_m2": pv_unit.total() / 1000.0,
        "wind_annual_mwh_per_turbine": wind_unit.total() / 1000.0,
        "pv_peak_w_per_m2": float(pv_unit.values.max()),
        "wind_peak_kw": float(wind_unit.values.max()),
    }
    (out / "generation_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote per-unit generation series to {out}")
    return 0


def cmd_sweep(args, config: SimulationConfig) -> int:
    grid = experiments.run_experiment1(config, out_dir=args.out,
                                       parallel=args.parallel)
    rejected = {name: sum(1 for cell in grid.cells if cell.tests[name].reject)
                for name in experiments.SWEEP_TEST_METRICS}
    print(f"swept {len(grid.cells)} scenarios "
          f"({len(grid.pv_caps)}x{len(grid.wind_caps)}); phi = {grid.phi!r}")
    print("Holm rejections per metric: "
          + ", ".join(f"{k}={v}" for k, v in rejected.items()))
    return 0


def cmd_classify(args, config: SimulationConfig) -> int:
    result = experiments.run_experiment2(config, out_dir=args.out,
                                         pv_mw=args.pv_mw, wind_mw=args.wind_mw)
    print(f"classified 8760 hours at mix ({result.pv_mw} MW PV, "
          f"{result.wind_mw} MW wind) into {len(result.counts)} categories")
    occupied = sum(1 for c in result.counts.values() if c > 0)
    print(f"occupied categories: {occupied}; tables written to {args.out}")
    return 0


def cmd_optimize(args, config: SimulationConfig) -> int:
    problem, solution, report = experiments.run_optimize(config, out_dir=args.out)
    print(f"best mix: {solution.pv_mw:.1f} MW PV "
          f"({solution.x_pv_m2:.0f} m2 panels), {solution.turbines} turbines "
          f"({solution.turbines * 0.5:.1f} MW wind)")
    print(f"objective {solution.objective!r} "
          f"(rounded-turbine {solution.objective_rounded!r}) "
          f"after {solution.generations} generations")
    return 0


def cmd_validate(args, config: SimulationConfig) -> int:
    fixture = config.scaling_fixture
    lines = []
    failures = 0

    def check(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        lines.append(f"{status} {name}" + (f": {detail}" if detail else ""))

    report = validation.reconcile_published(fixture)
    flagged = set(report.inconsistencies)
    documented = set(fixture.documented_inconsistencies)
    check("reconciliation flags match documented set",
          flagged == documented,
          f"flagged={sorted(flagged)} documented={sorted(documented)}")

    inputs = assemble(config)
    residential, mixed, phi = build_load_cases(inputs.household, inputs.service)
    check("load cases share annual energy",
          abs(residential.annual_energy - mixed.annual_energy)
          <= 1e-6 * mixed.annual_energy,
          f"residential={residential.annual_energy!r} mixed={mixed.annual_energy!r}")
    check("phi is positive and finite", 0 < phi < float("inf"), f"phi={phi!r}")

    prep = experiments.prepare(config)
    cell = experiments.evaluate_cell(105.0, 105.0, prep)
    for case_name, agg, load in ((RESIDENTIAL_ONLY, cell.residential, prep.load_r_mw),
                                 (MIXED, cell.mixed, prep.load_m_mw)):
        pv_gen, wind_gen = experiments.scenario_components(105.0, 105.0, prep)
        g_total = float((pv_gen + wind_gen).sum())
        balance = agg.pos_mismatch + agg.neg_mismatch
        expected = g_total - float(load.sum())
        denom = max(abs(expected), 1.0)
        check(f"energy balance holds ({case_name})",
              abs(balance - expected) <= 1e-9 * denom,
              f"pos+neg={balance!r} vs G-L={expected!r}")

    national = validation.national_total_check(
        inputs.service, households_per_100k=fixture.households_per_100k,
        benchmarks=config.benchmarks, real_inputs=config.real_inputs)
    if national.skipped:
        lines.append(f"SKIP national demand benchmarks: {national.reason}")
    else:
        for bench in config.benchmarks:
            ratio = national.ratios[bench.name]
            expected = {"PBL": 0.80, "CBS": 0.88}.get(bench.name)
            if expected is None:
                lines.append(f"INFO {bench.name}: modeled/published = {ratio:.3f}")
            else:
                check(f"national demand ratio vs {bench.name}",
                      abs(ratio - expected) <= 0.02,
                      f"ratio={ratio:.3f} expected~{expected:.2f}")
        check("national service demand near 26.9 TWh",
              national.modeled_twh is not None
              and abs(national.modeled_twh - 26.9) <= 0.02 * 26.9,
              f"modeled={national.modeled_twh}")

    text = "\n".join(lines)
    print(text)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "validate_report.txt").write_text(text + "\n", encoding="utf-8")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 2
    print("all checks passed")
    return 0


_HANDLERS = {
    "scale": cmd_scale,
    "profiles": cmd_profiles,
    "generation": cmd_generation,
    "sweep": cmd_sweep,
    "classify": cmd_classify,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
}


_FLAG_DEFAULTS = {"config": None, "seed": None, "out": Path("out"), "parallel": 1,
                  "pv_mw": None, "wind_mw": None}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for key, value in _FLAG_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        config = _resolve_config(args)
        args.out.mkdir(parents=True, exist_ok=True)
        return _HANDLERS[args.command](args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
