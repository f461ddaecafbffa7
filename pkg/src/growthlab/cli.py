"""Command line interface.

Subcommands:
  equilibrium  print the equilibrium growth rate of a strategy
  calibrate    print the scaling factor for a target equilibrium growth
  converge     strategy-switch experiment, writes the trace CSV (+charts)
  evolve       population imitation loop, writes the population CSV
  landscape    sample response/growth over the strategy simplex

Global flags: --config PATH (JSON run configuration), --seed N, --output
PATH, --svg.  Flags override config values; the GROWTHLAB_SEED environment
variable is used when no seed is given anywhere.  Exit codes: 0 success,
2 configuration/usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .config import (
    DEFAULT_TARGET_GROWTH,
    RunConfig,
    config_from_dict,
    load_config,
)
from .core import (
    ConfigurationError,
    GrowthLabError,
    ProductionCoefficients,
    Strategy,
    EconomyParams,
)
from .equilibrium import calibrate_scaling, equilibrium_growth
from .experiments import run_experiment

SEED_ENV_VAR = "GROWTHLAB_SEED"


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growthlab",
        description="Growth-economy simulator: equilibrium analysis, "
        "strategy-switch convergence, imitation dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON run configuration file")
        p.add_argument("--seed", type=int, help="master random seed")
        p.add_argument("--output", help="output CSV path")
        p.add_argument("--svg", action="store_true", help="also write SVG charts")
        p.add_argument("--steps", type=int, help="number of simulation steps")

    def add_economy(p: argparse.ArgumentParser) -> None:
        p.add_argument("--alpha", type=_floats, help="production coefficients")
        p.add_argument("--delta", type=float, help="deprecation rate in (0, 1]")
        p.add_argument("--prices", type=_floats, help="sector prices")
        p.add_argument("--s", type=float, dest="scaling", help="scaling factor")
        p.add_argument(
            "--target",
            type=float,
            help="target equilibrium growth of the optimal strategy "
            "(calibrates the scaling factor)",
        )

    p_eq = sub.add_parser("equilibrium", help="print g* for a strategy")
    add_economy(p_eq)
    p_eq.add_argument("--sigma", type=_floats, required=True, help="strategy weights")

    p_cal = sub.add_parser("calibrate", help="print s for a target growth")
    p_cal.add_argument("--target", type=float, required=True)
    p_cal.add_argument("--alpha", type=_floats, required=True)
    p_cal.add_argument("--delta", type=float, required=True)
    p_cal.add_argument("--prices", type=_floats)
    p_cal.add_argument(
        "--steps-per-year",
        type=float,
        default=1.0,
        help="interpret --target as per-year and convert (default 1: per step)",
    )

    p_conv = sub.add_parser("converge", help="strategy-switch experiment")
    add_common(p_conv)
    add_economy(p_conv)
    p_conv.add_argument("--initial-sigma", type=_floats, help="starting strategy")
    p_conv.add_argument("--switch-steps", type=_ints, help="steps to switch at")
    p_conv.add_argument(
        "--mutation-sd", type=float, help="sd of the imitation error (default 0.02)"
    )

    p_evo = sub.add_parser("evolve", help="population imitation loop")
    add_common(p_evo)
    add_economy(p_evo)
    p_evo.add_argument("--population", type=int, help="number of agents")
    p_evo.add_argument("--imitation-probability", type=float)
    p_evo.add_argument("--imitation-sd", type=float)
    p_evo.add_argument("--rule", help="selection rule")
    p_evo.add_argument("--sample", type=int, help="peers observed per decision")

    p_land = sub.add_parser("landscape", help="sample the strategy simplex")
    add_common(p_land)
    add_economy(p_land)
    p_land.add_argument("--samples", type=int, help="number of simplex samples")

    return parser


def _resolve_seed(args) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(
                f"{SEED_ENV_VAR} must be an integer, got {env!r}"
            )
    return None


def _economy_doc(args) -> dict:
    if args.alpha is None:
        raise ConfigurationError("--alpha is required without --config")
    doc: dict = {"alphas": args.alpha}
    if args.delta is not None:
        doc["deprecation"] = args.delta
    if args.prices is not None:
        doc["prices"] = args.prices
    if args.scaling is not None:
        doc["scaling"] = args.scaling
    return doc


def _experiment_config(args, experiment: str) -> RunConfig:
    seed = _resolve_seed(args)
    if args.config:
        cfg = load_config(args.config)
        if cfg.experiment != experiment:
            raise ConfigurationError(
                f"config is for experiment {cfg.experiment!r}, "
                f"subcommand needs {experiment!r}"
            )
        updates: dict = {}
        if seed is not None:
            updates["seed"] = seed
        if args.output is not None:
            updates["output_path"] = args.output
        if args.svg:
            updates["emit_svg"] = True
        if args.steps is not None:
            updates["steps"] = args.steps
        if updates:
            cfg = replace(cfg, **updates)
        if seed is not None and cfg.evolution is not None:
            cfg = replace(cfg, evolution=replace(cfg.evolution, seed=seed))
        return cfg

    doc: dict = {"experiment": experiment, "economy": _economy_doc(args)}
    if args.scaling is None:
        doc["target_growth"] = (
            args.target if args.target is not None else DEFAULT_TARGET_GROWTH
        )
    if experiment == "switch":
        switch: dict = {}
        if args.initial_sigma is not None:
            switch["initial_sigma"] = args.initial_sigma
        if args.switch_steps is not None:
            switch["switch_steps"] = args.switch_steps
        if args.mutation_sd is not None:
            switch["mutation_sd"] = args.mutation_sd
        if switch:
            doc["switch"] = switch
    elif experiment == "evolve":
        evo: dict = {}
        if args.population is not None:
            evo["population_size"] = args.population
        if args.imitation_probability is not None:
            evo["imitation_probability"] = args.imitation_probability
        if args.imitation_sd is not None:
            evo["imitation_error_sd"] = args.imitation_sd
        if args.rule is not None:
            evo["selection_rule"] = args.rule
        if args.sample is not None:
            evo["observation_sample"] = args.sample
        if evo:
            doc["evolution"] = evo
    elif experiment == "landscape":
        if args.samples is not None:
            doc["landscape"] = {"samples": args.samples}
    if args.steps is not None:
        doc["steps"] = args.steps
    if seed is not None:
        doc["seed"] = seed
    if args.output is not None:
        doc["output"] = args.output
    if args.svg:
        doc["emit_svg"] = True
    return config_from_dict(doc)


def _print_number(value: float) -> None:
    print(f"{value:.12g}")


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "equilibrium":
            if args.sigma is None or args.alpha is None:
                raise ConfigurationError("--sigma and --alpha are required")
            coefficients = ProductionCoefficients(np.asarray(args.alpha))
            sigma = Strategy(np.asarray(args.sigma))
            prices = (
                np.asarray(args.prices)
                if args.prices is not None
                else np.ones(coefficients.sectors)
            )
            delta = args.delta if args.delta is not None else 0.03
            if args.scaling is not None:
                scaling = args.scaling
            else:
                target = args.target if args.target is not None else DEFAULT_TARGET_GROWTH
                scaling = calibrate_scaling(target, coefficients, delta, prices)
            params = EconomyParams(scaling, delta, prices)
            _print_number(equilibrium_growth(sigma, coefficients, params, prices))
            return 0
        if args.command == "calibrate":
            coefficients = ProductionCoefficients(np.asarray(args.alpha))
            prices = (
                np.asarray(args.prices)
                if args.prices is not None
                else np.ones(coefficients.sectors)
            )
            from .config import annual_to_step_rate

            target = annual_to_step_rate(args.target, args.steps_per_year)
            _print_number(
                calibrate_scaling(target, coefficients, args.delta, prices)
            )
            return 0

        experiment = {"converge": "switch", "evolve": "evolve", "landscape": "landscape"}[
            args.command
        ]
        cfg = _experiment_config(args, experiment)
        result = run_experiment(cfg)
        print(result.output)
        for extra in result.extras:
            print(extra)
        return 0
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GrowthLabError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
