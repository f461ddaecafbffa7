"""Run configuration: JSON documents -> validated RunConfig and back.

A run is described by one JSON object (see README for the schema).  Loading
materializes every default, so dumping the loaded config yields a complete
"effective" document; loading that dump reproduces the identical RunConfig.
Validation errors always name the exact key path that failed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import (
    ConfigurationError,
    EconomyParams,
    GrowthLabError,
    ProductionCoefficients,
    Strategy,
)
from .dynamics import PriceSchedule
from .equilibrium import calibrate_scaling
from .evolution import EvolutionConfig

EXPERIMENTS = ("hold", "switch", "evolve", "landscape")

DEFAULT_TARGET_GROWTH = 0.0185
DEFAULT_STEPS = 500
DEFAULT_MUTATION_SD = 0.02
DEFAULT_LANDSCAPE_SAMPLES = 1000
# default switch schedule density: 6..10 changes in a 500-step run
DEFAULT_MIN_SWITCHES = 6
DEFAULT_MAX_SWITCHES = 10


@dataclass(frozen=True)
class SwitchSpec:
    """Switch-experiment section; null fields are drawn from the run seed."""

    initial_sigma: tuple[float, ...] | None = None
    switch_steps: tuple[int, ...] | None = None
    switch_sigmas: tuple[tuple[float, ...], ...] | None = None
    mutation_sd: float = DEFAULT_MUTATION_SD
    min_switches: int = DEFAULT_MIN_SWITCHES
    max_switches: int = DEFAULT_MAX_SWITCHES


@dataclass(frozen=True)
class HoldSpec:
    sigma: tuple[float, ...] | None = None  # default: the optimal strategy


@dataclass(frozen=True)
class LandscapeSpec:
    samples: int = DEFAULT_LANDSCAPE_SAMPLES


@dataclass(frozen=True)
class RunConfig:
    """Fully validated description of one experiment run."""

    experiment: str
    params: EconomyParams
    coefficients: ProductionCoefficients
    prices: PriceSchedule
    steps: int
    seed: int
    output_path: str
    emit_svg: bool
    target_growth: float | None
    steps_per_year: float = 1.0
    evolution: EvolutionConfig | None = None
    hold: HoldSpec | None = None
    switch: SwitchSpec | None = None
    landscape: LandscapeSpec | None = None


_REQUIRED = object()


def _fail(path: str, message: str) -> ConfigurationError:
    return ConfigurationError(f"{path}: {message}")


def _get(doc: dict, key: str, path: str, expected, default=_REQUIRED):
    if key not in doc or doc[key] is None:
        if default is _REQUIRED:
            raise _fail(f"{path}{key}", "missing required key")
        return default
    value = doc[key]
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _fail(f"{path}{key}", f"expected a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise _fail(f"{path}{key}", f"expected an integer, got {value!r}")
        return value
    if not isinstance(value, expected):
        raise _fail(
            f"{path}{key}", f"expected {expected.__name__}, got {type(value).__name__}"
        )
    return value


def _number_list(value, path: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise _fail(path, "expected a non-empty list of numbers")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise _fail(f"{path}[{i}]", f"expected a number, got {item!r}")
        out.append(float(item))
    return out


def config_from_dict(doc: dict) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig with all defaults set."""
    if not isinstance(doc, dict):
        raise ConfigurationError("config root must be a JSON object")

    experiment = _get(doc, "experiment", "", str)
    if experiment not in EXPERIMENTS:
        raise _fail("experiment", f"must be one of {EXPERIMENTS}, got {experiment!r}")

    steps = _get(doc, "steps", "", int, DEFAULT_STEPS)
    if steps < 1:
        raise _fail("steps", f"must be >= 1, got {steps}")
    seed = _get(doc, "seed", "", int, 0)
    output_path = _get(doc, "output", "", str, "growthlab_out.csv")
    emit_svg = _get(doc, "emit_svg", "", bool, False)
    steps_per_year = _get(doc, "steps_per_year", "", float, 1.0)
    if steps_per_year <= 0.0:
        raise _fail("steps_per_year", f"must be positive, got {steps_per_year}")

    economy = _get(doc, "economy", "", dict)
    alphas = _number_list(_get(economy, "alphas", "economy.", list), "economy.alphas")
    try:
        coefficients = ProductionCoefficients(np.asarray(alphas))
    except GrowthLabError as exc:
        raise _fail("economy.alphas", str(exc)) from exc
    n = coefficients.sectors

    sectors = _get(economy, "sectors", "economy.", int, n)
    if sectors != n:
        raise _fail("economy.sectors", f"{sectors} != len(economy.alphas) = {n}")
    deprecation = _get(economy, "deprecation", "economy.", float, 0.03)
    prices_list = _number_list(
        _get(economy, "prices", "economy.", list, [1.0] * n), "economy.prices"
    )
    if len(prices_list) != n:
        raise _fail(
            "economy.prices", f"dimension {len(prices_list)} != sectors {n}"
        )

    scaling = _get(economy, "scaling", "economy.", float, None)
    target_growth = _get(doc, "target_growth", "", float, None)
    if scaling is not None and target_growth is not None:
        raise _fail(
            "target_growth",
            "mutually exclusive with economy.scaling; give one of the two",
        )
    if scaling is None and target_growth is None:
        target_growth = DEFAULT_TARGET_GROWTH
    if scaling is None:
        per_step_target = annual_to_step_rate(target_growth, steps_per_year)
        try:
            scaling = calibrate_scaling(
                per_step_target, coefficients, deprecation, np.asarray(prices_list)
            )
        except GrowthLabError as exc:
            raise _fail("target_growth", str(exc)) from exc
    try:
        params = EconomyParams(scaling, deprecation, np.asarray(prices_list), n)
    except GrowthLabError as exc:
        raise _fail("economy", str(exc)) from exc

    schedule_rows = doc.get("price_schedule")
    if schedule_rows is None:
        prices = PriceSchedule.constant(params.prices)
    else:
        if not isinstance(schedule_rows, list) or not schedule_rows:
            raise _fail("price_schedule", "expected a non-empty list of price vectors")
        rows = []
        for i, row in enumerate(schedule_rows):
            vec = _number_list(row, f"price_schedule[{i}]")
            if len(vec) != n:
                raise _fail(
                    f"price_schedule[{i}]", f"dimension {len(vec)} != sectors {n}"
                )
            rows.append(vec)
        try:
            prices = PriceSchedule.series(rows)
        except GrowthLabError as exc:
            raise _fail("price_schedule", str(exc)) from exc

    evolution = None
    hold = None
    switch = None
    landscape = None

    if experiment == "hold":
        section = _get(doc, "hold", "", dict, {})
        sigma = section.get("sigma")
        if sigma is not None:
            sigma = tuple(_number_list(sigma, "hold.sigma"))
            _check_strategy(sigma, n, "hold.sigma")
        hold = HoldSpec(sigma=sigma)
    elif experiment == "switch":
        section = _get(doc, "switch", "", dict, {})
        initial = section.get("initial_sigma")
        if initial is not None:
            initial = tuple(_number_list(initial, "switch.initial_sigma"))
            _check_strategy(initial, n, "switch.initial_sigma")
        raw_steps = section.get("switch_steps")
        switch_steps = None
        if raw_steps is not None:
            if not isinstance(raw_steps, list):
                raise _fail("switch.switch_steps", "expected a list of integers")
            switch_steps = []
            prev = 0
            for i, s in enumerate(raw_steps):
                if isinstance(s, bool) or not isinstance(s, int):
                    raise _fail(f"switch.switch_steps[{i}]", f"expected an integer")
                if not (1 <= s <= steps):
                    raise _fail(
                        f"switch.switch_steps[{i}]", f"{s} outside [1, {steps}]"
                    )
                if s <= prev:
                    raise _fail(
                        f"switch.switch_steps[{i}]",
                        f"{s} not strictly greater than previous step {prev}",
                    )
                prev = s
                switch_steps.append(s)
            switch_steps = tuple(switch_steps)
        raw_sigmas = section.get("switch_sigmas")
        switch_sigmas = None
        if raw_sigmas is not None:
            if switch_steps is None:
                raise _fail("switch.switch_sigmas", "requires switch.switch_steps")
            if not isinstance(raw_sigmas, list) or len(raw_sigmas) != len(switch_steps):
                raise _fail(
                    "switch.switch_sigmas",
                    f"expected {len(switch_steps)} strategy vectors",
                )
            switch_sigmas = []
            for i, row in enumerate(raw_sigmas):
                vec = tuple(_number_list(row, f"switch.switch_sigmas[{i}]"))
                _check_strategy(vec, n, f"switch.switch_sigmas[{i}]")
                switch_sigmas.append(vec)
            switch_sigmas = tuple(switch_sigmas)
        mutation_sd = _get(section, "mutation_sd", "switch.", float, DEFAULT_MUTATION_SD)
        if mutation_sd < 0.0:
            raise _fail("switch.mutation_sd", "must be >= 0")
        min_sw = _get(section, "min_switches", "switch.", int, DEFAULT_MIN_SWITCHES)
        max_sw = _get(section, "max_switches", "switch.", int, DEFAULT_MAX_SWITCHES)
        if not (0 <= min_sw <= max_sw):
            raise _fail("switch.max_switches", "need 0 <= min_switches <= max_switches")
        switch = SwitchSpec(
            initial_sigma=initial,
            switch_steps=switch_steps,
            switch_sigmas=switch_sigmas,
            mutation_sd=mutation_sd,
            min_switches=min_sw,
            max_switches=max_sw,
        )
    elif experiment == "evolve":
        section = _get(doc, "evolution", "", dict, {})
        try:
            evolution = EvolutionConfig(
                population_size=_get(section, "population_size", "evolution.", int, 50),
                imitation_error_sd=_get(
                    section, "imitation_error_sd", "evolution.", float, 0.02
                ),
                imitation_probability=_get(
                    section, "imitation_probability", "evolution.", float, 0.02
                ),
                selection_rule=_get(
                    section,
                    "selection_rule",
                    "evolution.",
                    str,
                    "imitate-best-observed",
                ),
                observation_sample=_get(
                    section, "observation_sample", "evolution.", int, 5
                ),
                seed=_get(section, "seed", "evolution.", int, seed),
            )
        except ConfigurationError as exc:
            if ":" in str(exc) and str(exc).startswith("evolution."):
                raise
            raise _fail("evolution", str(exc)) from exc
    else:  # landscape
        section = _get(doc, "landscape", "", dict, {})
        samples = _get(section, "samples", "landscape.", int, DEFAULT_LANDSCAPE_SAMPLES)
        if samples < 1:
            raise _fail("landscape.samples", f"must be >= 1, got {samples}")
        landscape = LandscapeSpec(samples=samples)

    return RunConfig(
        experiment=experiment,
        params=params,
        coefficients=coefficients,
        prices=prices,
        steps=steps,
        seed=seed,
        output_path=output_path,
        emit_svg=emit_svg,
        target_growth=target_growth,
        steps_per_year=steps_per_year,
        evolution=evolution,
        hold=hold,
        switch=switch,
        landscape=landscape,
    )


def _check_strategy(vec: tuple[float, ...], sectors: int, path: str) -> None:
    if len(vec) != sectors:
        raise _fail(path, f"dimension {len(vec)} != sectors {sectors}")
    try:
        Strategy(np.asarray(vec))
    except GrowthLabError as exc:
        raise _fail(path, str(exc)) from exc


def annual_to_step_rate(annual: float, steps_per_year: float) -> float:
    """Geometric conversion of a per-year growth rate to a per-step rate.

    With the default steps_per_year = 1.0 the rates are identical ("percent
    per year" read as "percent per step").
    """
    if steps_per_year == 1.0:
        return annual
    return float((1.0 + annual) ** (1.0 / steps_per_year) - 1.0)


def load_config(path: str) -> RunConfig:
    """Load and validate a JSON run configuration from disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def dump_config(cfg: RunConfig) -> dict[str, Any]:
    """Effective configuration as a JSON-serializable dict (all defaults set).

    Loading the dump reproduces the identical RunConfig; null fields in the
    switch section stay null because they are drawn from the seed at run time.
    """
    economy: dict[str, Any] = {
        "alphas": [float(a) for a in cfg.coefficients.alphas],
        "deprecation": cfg.params.deprecation,
        "prices": [float(p) for p in cfg.params.prices],
        "sectors": cfg.params.sectors,
    }
    if cfg.target_growth is None:
        economy["scaling"] = cfg.params.scaling
    doc: dict[str, Any] = {
        "experiment": cfg.experiment,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "output": cfg.output_path,
        "emit_svg": cfg.emit_svg,
        "steps_per_year": cfg.steps_per_year,
        "economy": economy,
    }
    if cfg.target_growth is not None:
        doc["target_growth"] = cfg.target_growth
    if cfg.prices.mode == "time-series":
        doc["price_schedule"] = [[float(x) for x in row] for row in cfg.prices.values]
    if cfg.hold is not None:
        doc["hold"] = {
            "sigma": list(cfg.hold.sigma) if cfg.hold.sigma is not None else None
        }
    if cfg.switch is not None:
        sw = cfg.switch
        doc["switch"] = {
            "initial_sigma": list(sw.initial_sigma)
            if sw.initial_sigma is not None
            else None,
            "switch_steps": list(sw.switch_steps)
            if sw.switch_steps is not None
            else None,
            "switch_sigmas": [list(v) for v in sw.switch_sigmas]
            if sw.switch_sigmas is not None
            else None,
            "mutation_sd": sw.mutation_sd,
            "min_switches": sw.min_switches,
            "max_switches": sw.max_switches,
        }
    if cfg.evolution is not None:
        ev = cfg.evolution
        doc["evolution"] = {
            "population_size": ev.population_size,
            "imitation_error_sd": ev.imitation_error_sd,
            "imitation_probability": ev.imitation_probability,
            "selection_rule": ev.selection_rule,
            "observation_sample": ev.observation_sample,
            "seed": ev.seed,
        }
    if cfg.landscape is not None:
        doc["landscape"] = {"samples": cfg.landscape.samples}
    return doc
