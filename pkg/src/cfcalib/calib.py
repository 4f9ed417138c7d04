"""Goodness-of-fit metrics and seeded genetic-algorithm calibration.

The calibration objective is the NRMSE of spacing pooled over all
calibration segments (concatenate first, then one NRMSE). The GA is
elitist with tournament selection of size 2, uniform crossover, and
per-gene uniform-reset mutation; every random draw comes from one seeded
generator in a fixed order, so a (seed, inputs) pair fully determines
the outcome regardless of how many threads evaluate fitness.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cleaning import FollowingSegment, split_segments
from .errors import CfCalibError, ConfigError, UndefinedStatisticError
from .models import GENE_BOUNDS, ModelParams, genes_to_params, params_to_dict
from .sim import SimLimits, simulate_all

# Fitness assigned when a simulation faults; finite so the GA keeps going.
FAULT_FITNESS = 1e9


def gof(sim, obs) -> tuple[float, float, float]:
    """Return (mae, rmse, nrmse) of a simulated series against observations.

    nrmse divides the rmse by the root mean square of the observations,
    so it is invariant under common rescaling of both series.
    """
    sim = np.asarray(sim, dtype=float)
    obs = np.asarray(obs, dtype=float)
    if sim.size != obs.size or sim.size == 0:
        raise ConfigError(f"series must have equal nonzero length, got {sim.size} vs {obs.size}")
    err = sim - obs
    mae = float(np.mean(np.abs(err)))
    rmse = float(np.sqrt(np.mean(err * err)))
    obs_rms = float(np.sqrt(np.mean(obs * obs)))
    if obs_rms == 0.0:
        raise UndefinedStatisticError("nrmse undefined: observations are all zero")
    return mae, rmse, rmse / obs_rms


@dataclass(frozen=True)
class GofReport:
    """Spacing and speed errors of a simulated trajectory set."""

    nrmse_spacing: float
    mae_spacing: float
    rmse_spacing: float
    nrmse_speed: float
    mae_speed: float
    rmse_speed: float

    def as_dict(self) -> dict[str, float]:
        return {
            "nrmse_spacing": self.nrmse_spacing,
            "mae_spacing": self.mae_spacing,
            "rmse_spacing": self.rmse_spacing,
            "nrmse_speed": self.nrmse_speed,
            "mae_speed": self.mae_speed,
            "rmse_speed": self.rmse_speed,
        }


def gof_report(
    params: ModelParams,
    segments: list[FollowingSegment],
    limits: SimLimits | None = None,
    dt: float = 1.0,
) -> GofReport:
    """Simulate `params` over `segments` and pool spacing/speed errors."""
    results = simulate_all(params, segments, limits, dt)
    sim_spacing = np.concatenate([r.spacing for r in results])
    obs_spacing = np.concatenate([s.spacing for s in segments])
    sim_speed = np.concatenate([r.follower_speed for r in results])
    obs_speed = np.concatenate([s.follower_speed for s in segments])
    mae_s, rmse_s, nrmse_s = gof(sim_spacing, obs_spacing)
    mae_v, rmse_v, nrmse_v = gof(sim_speed, obs_speed)
    return GofReport(
        nrmse_spacing=nrmse_s, mae_spacing=mae_s, rmse_spacing=rmse_s,
        nrmse_speed=nrmse_v, mae_speed=mae_v, rmse_speed=rmse_v,
    )


@dataclass
class GaConfig:
    """Genetic-algorithm settings; bounds default to the model's gene table."""

    population: int = 100
    max_generations: int = 1000
    mutation_prob: float = 0.10
    crossover_prob: float = 0.5
    elitism_ratio: float = 0.1
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    bounds: list[tuple[float, float]] | None = None
    stall_generations: int = 100

    def __post_init__(self):
        for name in ("mutation_prob", "crossover_prob", "elitism_ratio"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must be in (0, 1), got {value}")
        if self.population < 4:
            raise ConfigError(f"population must be >= 4, got {self.population}")
        if self.max_generations < 1 or self.stall_generations < 1:
            raise ConfigError("generation counts must be >= 1")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.bounds is not None:
            for lo, hi in self.bounds:
                if not lo < hi:
                    raise ConfigError(f"infeasible gene bounds [{lo}, {hi}]")

    def bounds_for(self, kind: str) -> list[tuple[float, float]]:
        if self.bounds is not None:
            return list(self.bounds)
        return [(lo, hi) for _, lo, hi, _ in GENE_BOUNDS[kind]]

    def as_dict(self) -> dict:
        return {
            "population": self.population,
            "max_generations": self.max_generations,
            "mutation_prob": self.mutation_prob,
            "crossover_prob": self.crossover_prob,
            "elitism_ratio": self.elitism_ratio,
            "seeds": list(self.seeds),
            "bounds": None if self.bounds is None else [list(b) for b in self.bounds],
            "stall_generations": self.stall_generations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaConfig":
        kwargs = dict(data)
        if kwargs.get("bounds") is not None:
            kwargs["bounds"] = [tuple(b) for b in kwargs["bounds"]]
        return cls(**kwargs)


@dataclass
class CalibrationResult:
    model_kind: str
    best_params: ModelParams
    fitness: float
    per_seed: list[tuple[int, float, ModelParams]]
    generations_run: int

    def as_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "best_params": params_to_dict(self.best_params),
            "fitness": self.fitness,
            "per_seed": [
                {"seed": s, "fitness": f, "params": params_to_dict(p)}
                for s, f, p in self.per_seed
            ],
            "generations_run": self.generations_run,
        }


def _make_fitness(kind, segments, limits, dt):
    """Fitness closure with the pooled observation vector precomputed."""
    from .sim import _accel_fn, _step_loop

    obs_spacing = np.concatenate([s.spacing for s in segments])
    limits = limits or SimLimits()

    def evaluate(genes) -> float:
        try:
            params = genes_to_params(kind, genes)
            accel_fn = _accel_fn(params)
            pooled: list[float] = []
            for seg in segments:
                pooled.extend(_step_loop(accel_fn, seg, limits, dt)[2])
            _, _, nrmse = gof(np.array(pooled), obs_spacing)
        except (CfCalibError, FloatingPointError, OverflowError, ZeroDivisionError):
            return FAULT_FITNESS
        if not np.isfinite(nrmse):
            return FAULT_FITNESS
        return nrmse

    return evaluate


def fitness(
    kind: str,
    genes,
    segments: list[FollowingSegment],
    limits: SimLimits | None = None,
    dt: float = 1.0,
) -> float:
    """Pooled spacing NRMSE of the gene vector over the segments.

    Per-segment simulations are concatenated before the single NRMSE is
    taken. Simulation faults score FAULT_FITNESS instead of raising so a
    GA can evaluate arbitrary in-bounds individuals.
    """
    return _make_fitness(kind, segments, limits, dt)(genes)


def _evaluate(fitness_fn, genes_block, threads) -> np.ndarray:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(fitness_fn, genes_block))
    else:
        values = [fitness_fn(g) for g in genes_block]
    return np.array(values, dtype=float)


def ga_calibrate(
    kind: str,
    segments: list[FollowingSegment],
    config: GaConfig,
    seed: int,
    limits: SimLimits | None = None,
    dt: float = 1.0,
    threads: int = 1,
) -> tuple[np.ndarray, float, list[float]]:
    """Run one seeded GA; returns (best genes, best fitness, per-generation trace).

    The trace starts at the initial population's best and is monotone
    non-increasing thanks to elitism. The run stops early after
    config.stall_generations without strict improvement.
    """
    if not segments:
        raise ConfigError("no segments to calibrate on")
    bounds = config.bounds_for(kind)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    if np.any(lo >= hi):
        raise ConfigError("infeasible gene bounds")
    n_genes = len(bounds)
    pop_size = config.population
    n_elite = max(1, int(round(config.elitism_ratio * pop_size)))
    n_children = pop_size - n_elite

    fitness_fn = _make_fitness(kind, segments, limits, dt)
    rng = np.random.default_rng(seed)
    population = rng.uniform(lo, hi, size=(pop_size, n_genes))
    fit = _evaluate(fitness_fn, population, threads)

    best_idx = int(np.argmin(fit))
    best_genes = population[best_idx].copy()
    best_fit = float(fit[best_idx])
    trace = [best_fit]
    last_improvement = 0

    for gen in range(1, config.max_generations + 1):
        # fixed draw order keeps the stream independent of evaluation order
        parent_draws = rng.integers(0, pop_size, size=(n_children, 2, 2))
        cross_coin = rng.random(n_children)
        gene_src = rng.integers(0, 2, size=(n_children, n_genes))
        mut_mask = rng.random((n_children, n_genes)) < config.mutation_prob
        mut_vals = rng.uniform(lo, hi, size=(n_children, n_genes))

        elite_order = np.argsort(fit, kind="stable")[:n_elite]
        children = np.empty((n_children, n_genes))
        for j in range(n_children):
            i1, i2 = parent_draws[j, 0]
            p1 = i1 if fit[i1] <= fit[i2] else i2
            i3, i4 = parent_draws[j, 1]
            p2 = i3 if fit[i3] <= fit[i4] else i4
            child = population[p1].copy()
            if cross_coin[j] < config.crossover_prob:
                mask = gene_src[j] == 1
                child[mask] = population[p2][mask]
            child[mut_mask[j]] = mut_vals[j][mut_mask[j]]
            children[j] = child

        child_fit = _evaluate(fitness_fn, children, threads)
        population = np.vstack([population[elite_order], children])
        fit = np.concatenate([fit[elite_order], child_fit])
        if np.any(population < lo) or np.any(population > hi):
            raise AssertionError("GA produced out-of-bounds genes")

        gen_best = int(np.argmin(fit))
        if float(fit[gen_best]) < best_fit:
            best_fit = float(fit[gen_best])
            best_genes = population[gen_best].copy()
            last_improvement = gen
        trace.append(best_fit)
        if gen - last_improvement >= config.stall_generations:
            break

    return best_genes, best_fit, trace


def calibrate_and_validate(
    kind: str,
    segments: list[FollowingSegment],
    config: GaConfig,
    split_fraction: float = 0.8,
    split_seed: int = 0,
    limits: SimLimits | None = None,
    dt: float = 1.0,
    threads: int = 1,
) -> tuple[CalibrationResult, GofReport, GofReport]:
    """Split segments, calibrate once per seed, and report both error sets."""
    calibration, validation = split_segments(segments, split_fraction, split_seed)
    per_seed = []
    best = None
    for seed in config.seeds:
        genes, fit_value, trace = ga_calibrate(
            kind, calibration, config, seed, limits, dt, threads)
        params = genes_to_params(kind, genes)
        per_seed.append((seed, fit_value, params))
        if best is None or fit_value < best[1]:
            best = (seed, fit_value, params, len(trace) - 1)
    result = CalibrationResult(
        model_kind=kind,
        best_params=best[2],
        fitness=best[1],
        per_seed=per_seed,
        generations_run=best[3],
    )
    report_calib = gof_report(result.best_params, calibration, limits, dt)
    report_valid = gof_report(result.best_params, validation, limits, dt)
    return result, report_calib, report_valid


def load_ga_config(path: str | Path) -> GaConfig:
    return GaConfig.from_dict(json.loads(Path(path).read_text()))
