"""Renewable-integration metrics.

Per hour: mismatch M = G − L and utilisation min(G, L). Per year: positive
and negative mismatch sums (negative kept signed, ≤ 0, so that
pos + neg = ΣG − ΣL holds), utilisation, and self-consumption. The
load-case difference identities ΔM and ΔR are provided as well.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .ingest import HourlySeries


class MetricsError(ValueError):
    pass


def _values(series) -> np.ndarray:
    if isinstance(series, HourlySeries):
        return series.values
    return np.asarray(series, dtype=float)


def _check_same_length(*arrays):
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise MetricsError(f"length mismatch: {sorted(lengths)}")


def _check_same_year(*series):
    years = {s.year for s in series if isinstance(s, HourlySeries)}
    if len(years) > 1:
        raise MetricsError(f"year mismatch: {sorted(years)}")


@dataclass(frozen=True)
class HourMetrics:
    mismatch: float
    utilisation: float


class HourMetricsSeries(Sequence):
    """Per-hour mismatch and utilisation, indexable as HourMetrics."""

    def __init__(self, mismatch: np.ndarray, utilisation: np.ndarray):
        self.mismatch = mismatch
        self.utilisation = utilisation

    def __len__(self):
        return len(self.mismatch)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return HourMetricsSeries(self.mismatch[i], self.utilisation[i])
        return HourMetrics(mismatch=float(self.mismatch[i]),
                           utilisation=float(self.utilisation[i]))


def hourly_metrics(G, L) -> HourMetricsSeries:
    g, load = _values(G), _values(L)
    _check_same_length(g, load)
    _check_same_year(G, L)
    if np.any(load < 0) or np.any(g < 0):
        raise MetricsError("generation and load must be non-negative")
    return HourMetricsSeries(mismatch=g - load, utilisation=np.minimum(g, load))


@dataclass(frozen=True)
class AggregateMetrics:
    pos_mismatch: float
    neg_mismatch: float           # signed, <= 0
    utilisation: float
    self_consumption: float | None  # None when no generation

    def as_row(self):
        return (self.pos_mismatch, self.neg_mismatch, self.utilisation,
                self.self_consumption)


def aggregate(hours: HourMetricsSeries, G) -> AggregateMetrics:
    g = _values(G)
    _check_same_length(hours.mismatch, g)
    m = hours.mismatch
    pos = float(np.maximum(m, 0.0).sum())
    neg = float(np.minimum(m, 0.0).sum())
    util = float(hours.utilisation.sum())
    total_g = float(g.sum())
    sc = util / total_g if total_g > 0 else None
    return AggregateMetrics(pos_mismatch=pos, neg_mismatch=neg,
                            utilisation=util, self_consumption=sc)


def aggregate_from_series(G, L) -> AggregateMetrics:
    return aggregate(hourly_metrics(G, L), G)


def delta_mismatch(s, h, phi: float):
    """Pointwise mismatch difference between load cases: s − (phi−1)·h.

    Independent of the generation series, which cancels out of M_r − M_m.
    """
    sv, hv = _values(s), _values(h)
    _check_same_length(sv, hv)
    _check_same_year(s, h)
    values = sv - (phi - 1.0) * hv
    if isinstance(h, HourlySeries):
        return h.with_values(values)
    return values


def utilisation_sum(G, L) -> float:
    g, load = _values(G), _values(L)
    _check_same_length(g, load)
    return float(np.minimum(g, load).sum())


def delta_utilisation(G, L_r, L_m) -> float:
    """Annual utilisation difference between load cases, residential minus mixed."""
    g = _values(G)
    _check_same_length(g, _values(L_r), _values(L_m))
    _check_same_year(G, L_r, L_m)
    return utilisation_sum(G, L_r) - utilisation_sum(G, L_m)


def hourly_self_consumption(G, L) -> np.ndarray:
    """min(G,L)/G per hour; NaN where G = 0 (undefined)."""
    g, load = _values(G), _values(L)
    _check_same_length(g, load)
    out = np.full(len(g), np.nan)
    mask = g > 0
    out[mask] = np.minimum(g[mask], load[mask]) / g[mask]
    return out
