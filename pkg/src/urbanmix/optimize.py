"""Area-constrained renewable mix optimization.

Decision variables are the PV area x_pv (m²) and the wind footprint area
x_turbine (m²). The objective combines annual positive mismatch, negative
mismatch, and utilisation with weights (p_pos, p_neg, p_ren); feasibility
is a box plus the shared-area constraint x_pv + x_turbine <= phi * A_roof.

A real-coded genetic algorithm does the searching; an exhaustive grid
oracle validates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scaling import round_half_away

SIGN_CONVENTIONS = ("magnitude-neg", "signed-neg")


class OptimizeError(ValueError):
    pass


@dataclass(frozen=True)
class MixProblem:
    g_pv: np.ndarray            # W per m² of panel
    g_turbine: np.ndarray       # kW per turbine
    load_mw: np.ndarray         # MW
    a_roof_m2: float
    phi_area: float = 3.0
    weights: tuple[float, float, float] = (1.0, 1.0, -5.0)
    turbine_footprint_m2: float = 172500.0
    pv_rated_wm2: float = 107.9
    sign_convention: str = "magnitude-neg"
    roof_only_pv: bool = False

    def __post_init__(self):
        g_pv = np.asarray(self.g_pv, dtype=float)
        g_turbine = np.asarray(self.g_turbine, dtype=float)
        load = np.asarray(self.load_mw, dtype=float)
        if not (len(g_pv) == len(g_turbine) == len(load)):
            raise OptimizeError("profile length mismatch")
        object.__setattr__(self, "g_pv", g_pv)
        object.__setattr__(self, "g_turbine", g_turbine)
        object.__setattr__(self, "load_mw", load)
        p_pos, p_neg, p_ren = self.weights
        if p_pos <= 0 or p_neg <= 0 or p_ren >= 0:
            raise OptimizeError(
                f"weights must satisfy p_pos > 0, p_neg > 0, p_ren < 0, got {self.weights}"
            )
        if self.a_roof_m2 <= 0:
            raise OptimizeError("roof area must be positive")
        if self.phi_area < 1:
            raise OptimizeError("phi_area must be >= 1")
        if self.turbine_footprint_m2 <= 0 or self.pv_rated_wm2 <= 0:
            raise OptimizeError("footprint and rated density must be positive")
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise OptimizeError(f"unknown sign convention {self.sign_convention!r}")

    @property
    def pv_area_max(self) -> float:
        if self.roof_only_pv:
            return self.a_roof_m2
        return self.phi_area * self.a_roof_m2

    @property
    def turbine_area_max(self) -> float:
        return (self.phi_area - 1.0) * self.a_roof_m2

    @property
    def total_area_max(self) -> float:
        return self.phi_area * self.a_roof_m2

    def is_feasible(self, x_pv: float, x_turbine: float, tol: float = 0.0) -> bool:
        return (-tol <= x_pv <= self.pv_area_max + tol
                and -tol <= x_turbine <= self.turbine_area_max + tol
                and x_pv + x_turbine <= self.total_area_max + tol)

    def generation_mw(self, x_pv: float, x_turbine: float) -> np.ndarray:
        turbines = x_turbine / self.turbine_footprint_m2
        return x_pv * self.g_pv / 1e6 + turbines * self.g_turbine / 1000.0


@dataclass(frozen=True)
class ObjectiveTerms:
    pos_mismatch: float
    neg_mismatch: float     # signed, <= 0
    utilisation: float

    def combined(self, weights, sign_convention: str) -> float:
        p_pos, p_neg, p_ren = weights
        neg = abs(self.neg_mismatch) if sign_convention == "magnitude-neg" else self.neg_mismatch
        return p_pos * self.pos_mismatch + p_neg * neg + p_ren * self.utilisation


def objective_terms(x, problem: MixProblem) -> ObjectiveTerms:
    x_pv, x_turbine = float(x[0]), float(x[1])
    if not problem.is_feasible(x_pv, x_turbine, tol=1e-9 * problem.total_area_max):
        raise OptimizeError(f"point ({x_pv}, {x_turbine}) violates the area constraints")
    g = problem.generation_mw(x_pv, x_turbine)
    load = problem.load_mw
    mismatch = g - load
    return ObjectiveTerms(
        pos_mismatch=float(np.maximum(mismatch, 0.0).sum()),
        neg_mismatch=float(np.minimum(mismatch, 0.0).sum()),
        utilisation=float(np.minimum(g, load).sum()),
    )


def objective(x, problem: MixProblem) -> float:
    return objective_terms(x, problem).combined(problem.weights, problem.sign_convention)


def _batch_objective(x_pv, x_turbine, problem: MixProblem, chunk: int = 256) -> np.ndarray:
    """Objective at many points; algebraic form sharing one relu pass.

    Uses M+ = sum(max(G-L,0)), R = sum(G) - M+, M- = sum(G) - sum(L) - M+.
    """
    x_pv = np.asarray(x_pv, dtype=float)
    x_turbine = np.asarray(x_turbine, dtype=float)
    p_pos, p_neg, p_ren = problem.weights
    magnitude = problem.sign_convention == "magnitude-neg"
    load = problem.load_mw
    sum_l = load.sum()
    out = np.empty(len(x_pv))
    for start in range(0, len(x_pv), chunk):
        sl = slice(start, start + chunk)
        g = (x_pv[sl, None] * problem.g_pv[None, :] / 1e6
             + (x_turbine[sl, None] / problem.turbine_footprint_m2)
             * problem.g_turbine[None, :] / 1000.0)
        m_pos = np.maximum(g - load[None, :], 0.0).sum(axis=1)
        sum_g = g.sum(axis=1)
        util = sum_g - m_pos
        m_neg = sum_g - sum_l - m_pos
        neg_term = np.abs(m_neg) if magnitude else m_neg
        out[sl] = p_pos * m_pos + p_neg * neg_term + p_ren * util
    return out


@dataclass(frozen=True)
class MixSolution:
    x_pv_m2: float
    x_turbine_m2: float
    pv_mw: float
    turbines: int
    objective: float
    objective_rounded: float
    terms: ObjectiveTerms
    generations: int | None = None
    evaluations: int = 0


def _rounded_turbines(x_pv: float, x_turbine: float, problem: MixProblem) -> int:
    n = round_half_away(x_turbine / problem.turbine_footprint_m2)
    while n > 0 and not problem.is_feasible(x_pv, n * problem.turbine_footprint_m2):
        n -= 1
    return max(n, 0)


def _solution_at(x_pv: float, x_turbine: float, problem: MixProblem,
                 generations=None, evaluations=0) -> MixSolution:
    terms = objective_terms((x_pv, x_turbine), problem)
    f = terms.combined(problem.weights, problem.sign_convention)
    turbines = _rounded_turbines(x_pv, x_turbine, problem)
    f_rounded = objective((x_pv, turbines * problem.turbine_footprint_m2), problem)
    return MixSolution(
        x_pv_m2=x_pv,
        x_turbine_m2=x_turbine,
        pv_mw=x_pv * problem.pv_rated_wm2 / 1e6,
        turbines=turbines,
        objective=f,
        objective_rounded=f_rounded,
        terms=terms,
        generations=generations,
        evaluations=evaluations,
    )


@dataclass(frozen=True)
class GAConfig:
    population: int = 50
    tournament_k: int = 3
    blend_alpha: float = 0.5
    mutation_sigma_frac: float = 0.02
    mutation_rate: float = 0.9
    elite: int = 2
    stall_generations: int = 20
    stall_rel_tol: float = 1e-6
    max_generations: int = 400

    def __post_init__(self):
        if self.population < 4:
            raise OptimizeError("population must be at least 4")
        if not 1 <= self.tournament_k <= self.population:
            raise OptimizeError("tournament size must be within the population")
        if self.elite < 0 or self.elite >= self.population:
            raise OptimizeError("elite count must be smaller than the population")


def _project(points: np.ndarray, problem: MixProblem) -> np.ndarray:
    """Map arbitrary points onto the feasible region (box clip + scale-down)."""
    pts = np.clip(points, 0.0, [problem.pv_area_max, problem.turbine_area_max])
    totals = pts.sum(axis=1)
    cap = problem.total_area_max
    over = totals > cap
    if np.any(over):
        scale = cap / totals[over]
        pts[over] *= scale[:, None]
    return pts


def ga_optimize(problem: MixProblem, config: GAConfig = GAConfig(),
                seed: int = 0) -> MixSolution:
    """Real-coded GA: tournament selection, blend crossover, Gaussian mutation.

    Infeasible offspring are projected back onto the constraint set.
    Terminates when the best objective improves by less than
    ``stall_rel_tol`` (relative) over ``stall_generations`` generations.
    Fully deterministic for a fixed seed and config.
    """
    if problem.total_area_max <= 0:
        raise OptimizeError("feasible region is empty")
    rng = np.random.default_rng(seed)
    n = config.population
    ranges = np.array([problem.pv_area_max, problem.turbine_area_max])
    sigma = config.mutation_sigma_frac * ranges

    pop = _project(rng.uniform(0.0, 1.0, size=(n, 2)) * ranges, problem)
    fitness = _batch_objective(pop[:, 0], pop[:, 1], problem)
    evaluations = n
    best_history = [float(fitness.min())]
    generation = 0

    for generation in range(1, config.max_generations + 1):
        order = np.argsort(fitness, kind="stable")
        pop, fitness = pop[order], fitness[order]

        children = np.empty_like(pop)
        children[:config.elite] = pop[:config.elite]
        for i in range(config.elite, n):
            pa = pop[rng.integers(0, n, size=config.tournament_k).min()]
            pb = pop[rng.integers(0, n, size=config.tournament_k).min()]
            lo = np.minimum(pa, pb)
            hi = np.maximum(pa, pb)
            span = hi - lo
            child = rng.uniform(lo - config.blend_alpha * span,
                                hi + config.blend_alpha * span)
            mutate = rng.uniform(size=2) < config.mutation_rate
            child = child + mutate * rng.normal(0.0, 1.0, size=2) * sigma
            children[i] = child
        pop = _project(children, problem)
        fitness = _batch_objective(pop[:, 0], pop[:, 1], problem)
        evaluations += n

        best_history.append(float(fitness.min()))
        if len(best_history) > config.stall_generations:
            then = best_history[-1 - config.stall_generations]
            now = best_history[-1]
            scale = max(abs(then), 1e-12)
            if (then - now) / scale < config.stall_rel_tol:
                break

    best_idx = int(np.argmin(fitness))
    x_pv, x_turbine = float(pop[best_idx, 0]), float(pop[best_idx, 1])
    return _solution_at(x_pv, x_turbine, problem,
                        generations=generation, evaluations=evaluations)


def grid_oracle(problem: MixProblem, resolution: int = 200) -> MixSolution:
    """Best feasible point on a regular grid, by exhaustive evaluation."""
    if resolution < 2:
        raise OptimizeError(f"resolution must be at least 2, got {resolution}")
    xs = np.linspace(0.0, problem.pv_area_max, resolution)
    ys = np.linspace(0.0, problem.turbine_area_max, resolution)
    grid_pv, grid_wt = np.meshgrid(xs, ys, indexing="ij")
    flat_pv = grid_pv.ravel()
    flat_wt = grid_wt.ravel()
    feasible = flat_pv + flat_wt <= problem.total_area_max * (1 + 1e-12)
    flat_pv, flat_wt = flat_pv[feasible], flat_wt[feasible]
    values = _batch_objective(flat_pv, flat_wt, problem)
    best = int(np.argmin(values))
    return _solution_at(float(flat_pv[best]), float(flat_wt[best]), problem,
                        evaluations=len(flat_pv))


def tournament_comparison(ga: MixSolution, oracle: MixSolution, rel_tol: float = 0.02) -> bool:
    """True when the GA objective is within rel_tol of the oracle's."""
    scale = max(abs(oracle.objective), 1e-12)
    return ga.objective <= oracle.objective + rel_tol * scale


def solution_report(problem: MixProblem, solution: MixSolution,
                    config: GAConfig | None = None, seed: int | None = None) -> dict:
    """JSON-ready report: chosen point, slacks, objective decomposition."""
    report = {
        "x_pv_m2": solution.x_pv_m2,
        "x_turbine_m2": solution.x_turbine_m2,
        "pv_mw": solution.pv_mw,
        "turbines": solution.turbines,
        "wind_mw": solution.turbines * 0.5,
        "objective": solution.objective,
        "objective_rounded_turbines": solution.objective_rounded,
        "terms": {
            "pos_mismatch_mwh": solution.terms.pos_mismatch,
            "neg_mismatch_mwh": solution.terms.neg_mismatch,
            "utilisation_mwh": solution.terms.utilisation,
        },
        "constraint_slacks_m2": {
            "pv_area": problem.pv_area_max - solution.x_pv_m2,
            "turbine_area": problem.turbine_area_max - solution.x_turbine_m2,
            "total_area": problem.total_area_max - solution.x_pv_m2 - solution.x_turbine_m2,
        },
        "weights": list(problem.weights),
        "sign_convention": problem.sign_convention,
        "generations": solution.generations,
        "evaluations": solution.evaluations,
    }
    if seed is not None:
        report["seed"] = seed
    if config is not None:
        report["ga_config"] = {
            "population": config.population,
            "tournament_k": config.tournament_k,
            "blend_alpha": config.blend_alpha,
            "mutation_sigma_frac": config.mutation_sigma_frac,
            "mutation_rate": config.mutation_rate,
            "elite": config.elite,
            "stall_generations": config.stall_generations,
            "stall_rel_tol": config.stall_rel_tol,
            "max_generations": config.max_generations,
        }
    return report
