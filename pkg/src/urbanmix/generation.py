"""Solar and wind generation from weather.

Per-unit series (W per m² of PV, kW per turbine) are built once from the
weather year and scaled to installed capacities per scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .ingest import HourlySeries, MIN_TEMP_C, WeatherRecord
from .scaling import ServiceMix, round_half_away

R_DRY_AIR = 287.05          # J/(kg K)
BETZ_LIMIT = 0.593
STC_IRRADIANCE = 1000.0     # W/m²
STC_CELL_TEMP = 25.0        # °C
NOCT_IRRADIANCE = 800.0     # W/m²
TURBINE_UNIT_MW = 0.5


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class TurbineParams:
    hub_height_m: float = 50.0
    rotor_area_m2: float = 2290.0
    cp: float = 0.35
    cut_in_ms: float = 2.5
    cut_out_ms: float = 25.0
    nominal_power_kw: float = 500.0
    shear_exponent: float = 0.15

    def __post_init__(self):
        if not 0 < self.cp < BETZ_LIMIT:
            raise GenerationError(f"cp must be in (0, {BETZ_LIMIT}), got {self.cp}")
        if not self.cut_in_ms < self.cut_out_ms:
            raise GenerationError("cut-in speed must be below cut-out speed")
        for name in ("hub_height_m", "rotor_area_m2", "cut_in_ms",
                     "nominal_power_kw", "shear_exponent"):
            if getattr(self, name) <= 0:
                raise GenerationError(f"{name} must be positive")


@dataclass(frozen=True)
class PvParams:
    """Flat-plate PV parameters (datasheet values supplied as config).

    Defaults describe a 60 W, 0.556 m² crystalline module: 107.9 W/m² rated
    density, -0.5%/°C power coefficient, 47 °C nominal operating cell
    temperature (i.e. a 27 °C offset above ambient at 800 W/m²).
    """

    rated_power_density_wm2: float = 107.9
    temp_coefficient: float = -0.005    # 1/°C, <= 0
    noct_offset_c: float = 27.0
    panel_area_m2: float = 0.556
    model: str = "linear-derate"        # or "single-diode"
    diode: "SingleDiodeParams | None" = None

    def __post_init__(self):
        if self.rated_power_density_wm2 <= 0:
            raise GenerationError("rated power density must be positive")
        if self.panel_area_m2 <= 0:
            raise GenerationError("panel area must be positive")
        if self.temp_coefficient > 0:
            raise GenerationError("temperature coefficient must be <= 0")
        if self.model not in ("linear-derate", "single-diode"):
            raise GenerationError(f"unknown PV model {self.model!r}")


@dataclass(frozen=True)
class SingleDiodeParams:
    """One-diode module model inputs at standard test conditions."""

    isc_a: float = 3.8
    voc_v: float = 21.1
    n_cells: int = 36
    ideality: float = 1.2
    rs_ohm: float = 0.008
    isc_temp_coeff: float = 0.0024      # A/°C
    voc_temp_coeff: float = -0.08       # V/°C


@dataclass(frozen=True)
class AreaBudget:
    household_roof_m2_each: float = 33.0
    service_roofs: Mapping[str, float] = field(default_factory=dict)
    phi_area: float = 3.0
    turbine_footprint_km2_per_mw: float = 0.345

    def __post_init__(self):
        if self.household_roof_m2_each <= 0 or self.phi_area <= 0:
            raise GenerationError("area budget values must be positive")
        if self.turbine_footprint_km2_per_mw <= 0:
            raise GenerationError("turbine footprint must be positive")

    def footprint_m2_per_turbine(self, turbine_unit_mw: float = TURBINE_UNIT_MW) -> float:
        return self.turbine_footprint_km2_per_mw * 1e6 * turbine_unit_mw


def air_density(temp: float, pressure: float) -> float:
    """Ideal-gas density of dry air, kg/m³."""
    if temp <= MIN_TEMP_C:
        raise GenerationError(f"temperature must be above {MIN_TEMP_C} °C, got {temp}")
    if pressure <= 0:
        raise GenerationError(f"pressure must be positive, got {pressure}")
    return pressure / (R_DRY_AIR * (temp + 273.15))


def hub_height_speed(v0, params: TurbineParams):
    return v0 * (params.hub_height_m / 10.0) ** params.shear_exponent


def wind_power(record: WeatherRecord, params: TurbineParams = TurbineParams()) -> float:
    """kW produced by one turbine in the given hour.

    Swept-area power 0.5 ρ A V³ Cp at hub-height speed, zero outside the
    cut-in/cut-out window, clipped at nominal power.
    """
    rho = air_density(record.temp, record.pressure)
    v = hub_height_speed(record.wind_speed_10m, params)
    if v < params.cut_in_ms or v > params.cut_out_ms:
        return 0.0
    raw_w = 0.5 * rho * params.rotor_area_m2 * v ** 3 * params.cp
    return min(raw_w / 1000.0, params.nominal_power_kw)


def cell_temperature(temp, ghi, params: PvParams):
    return temp + params.noct_offset_c * (ghi / NOCT_IRRADIANCE)


def pv_power(record: WeatherRecord, params: PvParams = PvParams()) -> float:
    """W per m² of panel for the given hour."""
    if record.ghi <= 0:
        return 0.0
    if params.model == "single-diode":
        diode = params.diode or SingleDiodeParams()
        watts = _single_diode_mpp(record.ghi, record.temp, params, diode)
        return watts / params.panel_area_m2
    t_cell = cell_temperature(record.temp, record.ghi, params)
    p = (params.rated_power_density_wm2 * (record.ghi / STC_IRRADIANCE)
         * (1.0 + params.temp_coefficient * (t_cell - STC_CELL_TEMP)))
    return float(np.clip(p, 0.0, params.rated_power_density_wm2))


def _single_diode_mpp(ghi, temp, params: PvParams, diode: SingleDiodeParams) -> float:
    # Module-level one-diode model: photocurrent proportional to irradiance,
    # saturation current fixed by the open-circuit point at cell temperature.
    # The maximum power point is located numerically on a voltage grid, with
    # the implicit current solved by damped fixed-point iteration.
    t_cell = cell_temperature(temp, ghi, params) + 273.15
    vt_module = diode.n_cells * diode.ideality * 1.380649e-23 * t_cell / 1.602176634e-19
    t_delta = (t_cell - 273.15) - STC_CELL_TEMP
    i_ph = diode.isc_a * (ghi / STC_IRRADIANCE) * (1.0 + diode.isc_temp_coeff / diode.isc_a * t_delta)
    voc = diode.voc_v + diode.voc_temp_coeff * t_delta
    if i_ph <= 0 or voc <= 0:
        return 0.0
    i_sat = i_ph / math.expm1(voc / vt_module)
    rs = diode.rs_ohm * diode.n_cells
    v_grid = np.linspace(0.0, voc, 200)
    i = np.full_like(v_grid, i_ph)
    for _ in range(40):
        arg = np.clip((v_grid + i * rs) / vt_module, None, 80.0)
        i_new = i_ph - i_sat * np.expm1(arg)
        i = 0.7 * i + 0.3 * i_new
    i = np.clip(i, 0.0, None)
    return float(np.max(v_grid * i))


def pv_unit_series(records, year: int, params: PvParams = PvParams()) -> HourlySeries:
    """Per-m² PV output for a weather year, W/m²."""
    values = np.array([pv_power(r, params) for r in records])
    return HourlySeries(values=values, unit="W/m2", year=year)


def wind_unit_series(records, year: int, params: TurbineParams = TurbineParams()) -> HourlySeries:
    """Per-turbine output for a weather year, kW."""
    values = np.array([wind_power(r, params) for r in records])
    return HourlySeries(values=values, unit="kW", year=year)


def scenario_generation(cap_pv_mw: float, cap_wind_mw: float,
                        pv_unit: HourlySeries, wind_unit: HourlySeries,
                        pv_params: PvParams = PvParams()) -> HourlySeries:
    """Generation series in MW for installed PV and wind capacities.

    PV capacity is converted to panel area via the rated power density;
    wind capacity is rounded to whole 0.5 MW turbines.
    """
    if cap_pv_mw < 0 or cap_wind_mw < 0:
        raise GenerationError(
            f"capacities must be non-negative, got ({cap_pv_mw}, {cap_wind_mw})"
        )
    if pv_unit.year != wind_unit.year:
        raise GenerationError("per-unit series year mismatch")
    panel_area_m2 = cap_pv_mw * 1e6 / pv_params.rated_power_density_wm2
    n_turbines = round_half_away(cap_wind_mw / TURBINE_UNIT_MW)
    values = (panel_area_m2 * pv_unit.values / 1e6
              + n_turbines * wind_unit.values / 1000.0)
    return HourlySeries(values=values, unit="MW", year=pv_unit.year)


def area_budget_totals(mix: ServiceMix, n_households: int, budget: AreaBudget,
                       roof_only_pv: bool = False) -> tuple[float, float, float]:
    """(total roof area, PV area cap, wind area cap) in m².

    PV may use up to phi_area × roof area (roof area alone under the
    roof-only flag); wind up to (phi_area − 1) × roof area.
    """
    if n_households < 0:
        raise GenerationError("household count must be non-negative")
    service = 0.0
    for name, count in mix.items():
        if name not in budget.service_roofs:
            raise GenerationError(f"no roof area for building type {name!r}")
        service += count * budget.service_roofs[name]
    a_roof = n_households * budget.household_roof_m2_each + service
    pv_cap = a_roof if roof_only_pv else budget.phi_area * a_roof
    wind_cap = (budget.phi_area - 1.0) * a_roof
    return a_roof, pv_cap, wind_cap
