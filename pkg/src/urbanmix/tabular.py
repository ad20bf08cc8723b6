"""CSV table writers with deterministic, round-trippable formatting."""

from __future__ import annotations

import math
from pathlib import Path

METRIC_HEADER = ("scenario_pv_mw", "scenario_wind_mw", "load_case",
                 "pos_mwh", "neg_mwh", "util_mwh", "self_consumption")
CATEGORY_HEADER = ("day_kind", "time_band", "solar_bin", "wind_bin",
                   "hours", "metric", "mean", "sum")
SIGNIFICANCE_COLUMNS = ("t", "dof", "p", "reject_holm")


def fmt(value) -> str:
    """One CSV cell: floats via repr for exact round-trips, None/NaN empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
        lines.append(",".join(fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def metric_row(pv_mw: float, wind_mw: float, load_case: str, agg) -> tuple:
    return (float(pv_mw), float(wind_mw), load_case,
            agg.pos_mismatch, agg.neg_mismatch, agg.utilisation,
            agg.self_consumption)


def significance_cells(result) -> tuple:
    """The four trailing significance columns for one test result."""
    t = None if result.untestable else result.t_stat
    dof = None if result.untestable else result.dof
    return (t, dof, result.p_value, result.reject)
