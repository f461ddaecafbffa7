"""Experiment drivers and flat-file emission: the reproducibility surface.

Every driver takes a validated RunConfig, runs deterministically from its
seed, writes CSV (canonical output, floats at 17 significant digits) and
optionally self-contained SVG charts, and drops an effective-config JSON
next to the main output so the exact run can be repeated.

Trace CSV columns:      step,agent_id,income,growth,equilibrium_growth,
                        excess_growth,sigma_0,...,sigma_{n-1}
Population CSV columns: step,agent_id,income,growth,equilibrium_growth,
                        sigma_0,...,sigma_{n-1}
Landscape CSV columns:  sigma_0,...,sigma_{n-1},response,equilibrium_growth
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import RunConfig, dump_config
from .core import ConfigurationError, Strategy, project_to_simplex
from .dynamics import TraceRecord, equilibrium_state, run_hold, run_switch_experiment
from .equilibrium import equilibrium_growth, optimal_strategy, response
from .evolution import (
    EvolutionConfig,
    evolve_step,
    experiment_stream,
    init_population,
    mutate_strategy,
)
from .svgchart import emit_svg


def fmt17(x: float) -> str:
    """Serialize a float with 17 significant digits (round-trip safe)."""
    return format(float(x), ".17g")


def _write_lines(path: str, lines: Iterable[str]) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def trace_header(sectors: int) -> str:
    sigma_cols = ",".join(f"sigma_{i}" for i in range(sectors))
    return f"step,agent_id,income,growth,equilibrium_growth,excess_growth,{sigma_cols}"


def write_trace_csv(records: Sequence[TraceRecord], sectors: int, path: str) -> None:
    lines = [trace_header(sectors)]
    for r in records:
        sigma = ",".join(fmt17(s) for s in r.strategy)
        lines.append(
            f"{r.step},{r.agent_id},{fmt17(r.income)},{fmt17(r.growth)},"
            f"{fmt17(r.equilibrium_growth)},{fmt17(r.excess_growth)},{sigma}"
        )
    _write_lines(path, lines)


def population_header(sectors: int) -> str:
    sigma_cols = ",".join(f"sigma_{i}" for i in range(sectors))
    return f"step,agent_id,income,growth,equilibrium_growth,{sigma_cols}"


def landscape_header(sectors: int) -> str:
    sigma_cols = ",".join(f"sigma_{i}" for i in range(sectors))
    return f"{sigma_cols},response,equilibrium_growth"


def write_effective_config(cfg: RunConfig) -> str:
    """Dump the materialized configuration next to the main output file."""
    stem, _ = os.path.splitext(cfg.output_path)
    path = stem + ".config.json"
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(dump_config(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


@dataclass(frozen=True)
class ExperimentResult:
    """Paths written by one driver run."""

    output: str
    extras: tuple[str, ...] = ()


def _require(cfg: RunConfig, experiment: str) -> None:
    if cfg.experiment != experiment:
        raise ConfigurationError(
            f"config experiment is {cfg.experiment!r}, driver needs {experiment!r}"
        )


def hold_experiment(cfg: RunConfig) -> ExperimentResult:
    """Single agent holding one strategy; writes the trace CSV."""
    _require(cfg, "hold")
    sigma_spec = cfg.hold.sigma if cfg.hold else None
    if sigma_spec is None:
        sigma = optimal_strategy(cfg.coefficients)
    else:
        sigma = Strategy(np.asarray(sigma_spec))
    state = equilibrium_state(sigma, cfg.coefficients, cfg.params, cfg.prices.at(1))
    records = run_hold(state, cfg.params, cfg.coefficients, cfg.prices, cfg.steps)
    write_trace_csv(records, cfg.params.sectors, cfg.output_path)
    extras = [write_effective_config(cfg)]
    if cfg.emit_svg:
        extras.extend(_emit_panels(records, cfg.output_path))
    return ExperimentResult(cfg.output_path, tuple(extras))


def draw_switch_schedule(
    cfg: RunConfig, rng: np.random.Generator
) -> list[tuple[int, Strategy]]:
    """Materialize the switch schedule, drawing unset parts from the seed.

    Switch strategies are noisy copies of the optimal strategy (imitations
    with Gaussian error of the configured sd), matching a population member
    repeatedly imitating a near-optimal peer.
    """
    sw = cfg.switch if cfg.switch is not None else None
    alpha = optimal_strategy(cfg.coefficients)
    sd = sw.mutation_sd if sw else 0.02
    if sw is not None and sw.switch_steps is not None:
        steps_at = list(sw.switch_steps)
    else:
        lo = min(20, max(2, cfg.steps // 10))
        hi = max(lo + 1, cfg.steps - max(2, cfg.steps // 25))
        n_min = sw.min_switches if sw else 6
        n_max = sw.max_switches if sw else 10
        count = int(rng.integers(n_min, n_max + 1)) if n_max > 0 else 0
        count = min(count, hi - lo)
        if count <= 0:
            steps_at = []
        else:
            steps_at = sorted(
                int(s) for s in rng.choice(np.arange(lo, hi), count, replace=False)
            )
    if sw is not None and sw.switch_sigmas is not None:
        sigmas = [Strategy(np.asarray(v)) for v in sw.switch_sigmas]
    else:
        sigmas = [mutate_strategy(alpha, sd, rng) for _ in steps_at]
    return list(zip(steps_at, sigmas))


def switch_experiment(cfg: RunConfig) -> ExperimentResult:
    """Strategy-switch run: trace CSV plus the two derived chart series.

    Writes the full trace to the configured output path, then two panel CSVs
    next to it: income growth vs. equilibrium growth, and their difference
    (the excess growth that spikes right after each switch).  With emit_svg
    set, both panels are also rendered as SVG line charts.
    """
    _require(cfg, "switch")
    rng = experiment_stream(cfg.seed)
    alpha = optimal_strategy(cfg.coefficients)
    sw = cfg.switch
    sd = sw.mutation_sd if sw else 0.02
    if sw is not None and sw.initial_sigma is not None:
        initial = Strategy(np.asarray(sw.initial_sigma))
    else:
        initial = mutate_strategy(alpha, sd, rng)
    switches = draw_switch_schedule(cfg, rng)
    records = run_switch_experiment(
        initial,
        switches,
        cfg.params,
        cfg.coefficients,
        cfg.prices,
        cfg.steps,
    )
    write_trace_csv(records, cfg.params.sectors, cfg.output_path)
    extras = [write_effective_config(cfg)]
    extras.extend(_emit_panels(records, cfg.output_path, svg=cfg.emit_svg))
    return ExperimentResult(cfg.output_path, tuple(extras))


def _emit_panels(
    records: Sequence[TraceRecord], output_path: str, svg: bool = True
) -> list[str]:
    stem, _ = os.path.splitext(output_path)
    growth_csv = stem + ".growth.csv"
    excess_csv = stem + ".excess.csv"
    lines = ["step,growth,equilibrium_growth"]
    for r in records:
        lines.append(f"{r.step},{fmt17(r.growth)},{fmt17(r.equilibrium_growth)}")
    _write_lines(growth_csv, lines)
    lines = ["step,excess_growth"]
    for r in records:
        lines.append(f"{r.step},{fmt17(r.excess_growth)}")
    _write_lines(excess_csv, lines)
    written = [growth_csv, excess_csv]
    if svg:
        growth_svg = stem + ".growth.svg"
        excess_svg = stem + ".excess.svg"
        emit_svg(
            [
                ("income growth", [(r.step, r.growth) for r in records]),
                (
                    "equilibrium growth",
                    [(r.step, r.equilibrium_growth) for r in records],
                ),
            ],
            growth_svg,
            title="Income growth rate vs. equilibrium growth rate",
            y_label="income growth rate",
        )
        emit_svg(
            [("excess growth", [(r.step, r.excess_growth) for r in records])],
            excess_svg,
            title="Growth rate minus equilibrium growth rate",
            y_label="excess growth rate",
        )
        written.extend([growth_svg, excess_svg])
    return written


def evolve_experiment(cfg: RunConfig) -> ExperimentResult:
    """Population imitation loop; writes the per-step population CSV."""
    _require(cfg, "evolve")
    evo = cfg.evolution if cfg.evolution is not None else EvolutionConfig(seed=cfg.seed)
    pop = init_population(cfg.params, cfg.coefficients, evo, cfg.prices.at(1))
    lines = [population_header(cfg.params.sectors)]

    def snapshot(step: int) -> None:
        for i, agent in enumerate(pop.agents):
            g_star = equilibrium_growth(
                agent.strategy, cfg.coefficients, cfg.params, cfg.prices.at(max(step, 1))
            )
            sigma = ",".join(fmt17(s) for s in agent.strategy.weights)
            lines.append(
                f"{step},{i},{fmt17(agent.income)},{fmt17(agent.growth)},"
                f"{fmt17(g_star)},{sigma}"
            )

    snapshot(0)
    for t in range(1, cfg.steps + 1):
        pop = evolve_step(pop, cfg.params, cfg.coefficients, cfg.prices.at(t), evo)
        snapshot(t)
    _write_lines(cfg.output_path, lines)
    extras = [write_effective_config(cfg)]
    if cfg.emit_svg:
        extras.append(_emit_mean_response_svg(cfg, lines))
    return ExperimentResult(cfg.output_path, tuple(extras))


def _emit_mean_response_svg(cfg: RunConfig, csv_lines: list[str]) -> str:
    sectors = cfg.params.sectors
    by_step: dict[int, list[float]] = {}
    for line in csv_lines[1:]:
        parts = line.split(",")
        step = int(parts[0])
        sigma = Strategy(np.asarray([float(x) for x in parts[5 : 5 + sectors]]))
        by_step.setdefault(step, []).append(response(sigma, cfg.coefficients))
    series = [
        ("mean response", [(s, float(np.mean(v))) for s, v in sorted(by_step.items())])
    ]
    stem, _ = os.path.splitext(cfg.output_path)
    path = stem + ".response.svg"
    emit_svg(series, path, title="Population mean response", y_label="response")
    return path


def landscape_experiment(cfg: RunConfig) -> ExperimentResult:
    """Sample the strategy simplex; writes response and equilibrium growth rows."""
    _require(cfg, "landscape")
    samples = cfg.landscape.samples if cfg.landscape else 1000
    rng = experiment_stream(cfg.seed)
    n = cfg.params.sectors
    lines = [landscape_header(n)]
    p = cfg.prices.at(1)
    ones = np.ones(n)
    for _ in range(samples):
        sigma = project_to_simplex(rng.dirichlet(ones))
        resp = response(sigma, cfg.coefficients)
        g_star = equilibrium_growth(sigma, cfg.coefficients, cfg.params, p)
        sig = ",".join(fmt17(x) for x in sigma.weights)
        lines.append(f"{sig},{fmt17(resp)},{fmt17(g_star)}")
    _write_lines(cfg.output_path, lines)
    return ExperimentResult(cfg.output_path, (write_effective_config(cfg),))


DRIVERS = {
    "hold": hold_experiment,
    "switch": switch_experiment,
    "evolve": evolve_experiment,
    "landscape": landscape_experiment,
}


def run_experiment(cfg: RunConfig) -> ExperimentResult:
    return DRIVERS[cfg.experiment](cfg)
