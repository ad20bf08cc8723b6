"""Time and weather classification.

Every hour of the year is assigned to one of 150 categories: day kind
(weekday/weekend) × time band (night/day/evening) × solar quintile ×
wind quintile. Quintile edges are the 20/40/60/80 percentiles of
generation expressed as percent of installed capacity; solar edges use
daylight hours only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .ingest import Calendar, HourlySeries

DAY_KINDS = ("weekday", "weekend")
TIME_BANDS = ("night", "day", "evening")
N_BINS = 5
QUANTILE_LEVELS = (20, 40, 60, 80)


class ClassifyError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CategoryKey:
    day_kind: str
    time_band: str
    solar_bin: int
    wind_bin: int

    def __post_init__(self):
        if self.day_kind not in DAY_KINDS:
            raise ClassifyError(f"unknown day kind {self.day_kind!r}")
        if self.time_band not in TIME_BANDS:
            raise ClassifyError(f"unknown time band {self.time_band!r}")
        if not 1 <= self.solar_bin <= N_BINS or not 1 <= self.wind_bin <= N_BINS:
            raise ClassifyError(
                f"bins must be 1..{N_BINS}, got ({self.solar_bin}, {self.wind_bin})"
            )


def all_category_keys() -> list[CategoryKey]:
    """The 150 possible keys in canonical order."""
    return [
        CategoryKey(day_kind=dk, time_band=tb, solar_bin=sb, wind_bin=wb)
        for dk in DAY_KINDS
        for tb in TIME_BANDS
        for sb in range(1, N_BINS + 1)
        for wb in range(1, N_BINS + 1)
    ]


@dataclass(frozen=True)
class BinEdges:
    solar_edges: tuple[float, float, float, float]
    wind_edges: tuple[float, float, float, float]

    def __post_init__(self):
        for edges in (self.solar_edges, self.wind_edges):
            if len(edges) != len(QUANTILE_LEVELS):
                raise ClassifyError(f"need {len(QUANTILE_LEVELS)} edges, got {len(edges)}")
            if list(edges) != sorted(edges):
                raise ClassifyError("edges must be non-decreasing")
            if edges[0] < 0 or edges[-1] > 100:
                raise ClassifyError("edges must lie within [0, 100]")


def _as_array(series):
    if isinstance(series, HourlySeries):
        return series.values
    return np.asarray(series, dtype=float)


def percent_of_capacity(generation, capacity_mw: float) -> np.ndarray:
    """Generation as percent of installed capacity; zero capacity gives zeros."""
    g = _as_array(generation)
    if capacity_mw < 0:
        raise ClassifyError(f"capacity must be non-negative, got {capacity_mw}")
    if capacity_mw == 0:
        return np.zeros_like(g)
    return 100.0 * g / capacity_mw


def compute_bins(solar_pct, wind_pct, daylight_mask) -> BinEdges:
    """Quintile edges from the percent-of-capacity series.

    Wind edges come from all hours; solar edges from daylight hours only,
    since solar output is identically zero at night and would otherwise
    collapse the lower quantiles.
    """
    solar = _as_array(solar_pct)
    wind = _as_array(wind_pct)
    mask = np.asarray(daylight_mask, dtype=bool)
    if len(solar) != len(wind) or len(solar) != len(mask):
        raise ClassifyError("series length mismatch")
    for name, arr in (("solar", solar), ("wind", wind)):
        if np.any(arr < 0) or np.any(arr > 100):
            raise ClassifyError(f"{name} percent series must lie within [0, 100]")
    if not mask.any():
        raise ClassifyError("daylight hour set is empty, cannot place solar quantiles")
    solar_edges = tuple(np.percentile(solar[mask], QUANTILE_LEVELS))
    wind_edges = tuple(np.percentile(wind, QUANTILE_LEVELS))
    for name, edges in (("solar", solar_edges), ("wind", wind_edges)):
        if edges[0] == edges[-1]:
            warnings.warn(f"constant {name} series: all quantile edges coincide, "
                          "binning degenerates to a single occupied bin")
    return BinEdges(solar_edges=solar_edges, wind_edges=wind_edges)


def _bin_of(values, edges) -> np.ndarray:
    # half-open bins, value equal to an edge goes to the upper bin
    return np.searchsorted(np.asarray(edges), values, side="right") + 1


def time_band_of(local_hour) -> np.ndarray:
    """night [0,8), day [8,16), evening [16,24) from the local clock hour."""
    hours = np.asarray(local_hour)
    bands = np.where(hours < 8, 0, np.where(hours < 16, 1, 2))
    return bands


def classify_year(solar_pct, wind_pct, edges: BinEdges, calendar: Calendar,
                  holidays_as_weekend: bool = True) -> list[CategoryKey]:
    """CategoryKey for every hour of the calendar year."""
    solar = _as_array(solar_pct)
    wind = _as_array(wind_pct)
    if len(solar) != calendar.n_hours or len(wind) != calendar.n_hours:
        raise ClassifyError("series length does not match calendar")
    weekend = calendar.weekend_kind(holidays_as_weekend)
    bands = time_band_of(calendar.local_hour)
    solar_bins = _bin_of(solar, edges.solar_edges)
    wind_bins = _bin_of(wind, edges.wind_edges)
    return [
        CategoryKey(
            day_kind=DAY_KINDS[1] if weekend[i] else DAY_KINDS[0],
            time_band=TIME_BANDS[bands[i]],
            solar_bin=int(solar_bins[i]),
            wind_bin=int(wind_bins[i]),
        )
        for i in range(calendar.n_hours)
    ]


def classify_hour(hour_index: int, solar_pct_value: float, wind_pct_value: float,
                  edges: BinEdges, calendar: Calendar,
                  holidays_as_weekend: bool = True) -> CategoryKey:
    weekend = calendar.weekend_kind(holidays_as_weekend)[hour_index]
    band = int(time_band_of(np.array([calendar.local_hour[hour_index]]))[0])
    return CategoryKey(
        day_kind=DAY_KINDS[1] if weekend else DAY_KINDS[0],
        time_band=TIME_BANDS[band],
        solar_bin=int(_bin_of(np.array([solar_pct_value]), edges.solar_edges)[0]),
        wind_bin=int(_bin_of(np.array([wind_pct_value]), edges.wind_edges)[0]),
    )


@dataclass(frozen=True)
class CategoryAggregate:
    count: int
    mean: float | None
    total: float


def aggregate_by_category(keys, metric) -> dict[CategoryKey, CategoryAggregate]:
    """Count, mean, and sum of a metric per category.

    All 150 keys are present in the result; empty categories carry count 0
    and an undefined mean. NaN metric values mark hours where the metric is
    undefined and are left out of that category's count.
    """
    values = _as_array(metric)
    if len(keys) != len(values):
        raise ClassifyError("keys and metric length mismatch")
    sums: dict[CategoryKey, float] = {}
    counts: dict[CategoryKey, int] = {}
    for key, value in zip(keys, values):
        if np.isnan(value):
            continue
        sums[key] = sums.get(key, 0.0) + float(value)
        counts[key] = counts.get(key, 0) + 1
    out = {}
    for key in all_category_keys():
        n = counts.get(key, 0)
        total = sums.get(key, 0.0)
        out[key] = CategoryAggregate(count=n, mean=total / n if n else None, total=total)
    return out


def member_values(keys, metric) -> dict[CategoryKey, np.ndarray]:
    """Raw metric samples per category (NaN entries dropped), for testing."""
    values = _as_array(metric)
    if len(keys) != len(values):
        raise ClassifyError("keys and metric length mismatch")
    grouped: dict[CategoryKey, list[float]] = {key: [] for key in all_category_keys()}
    for key, value in zip(keys, values):
        if not np.isnan(value):
            grouped[key].append(float(value))
    return {key: np.array(vals) for key, vals in grouped.items()}


def category_counts(keys) -> dict[CategoryKey, int]:
    counts = {key: 0 for key in all_category_keys()}
    for key in keys:
        counts[key] += 1
    return counts
