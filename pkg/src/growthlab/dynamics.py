"""Forward simulation of a single agent's capital, income and growth.

One step of the model, given the price vector of the period:

    k_i' = (sigma_i / p_i) * y + (1 - deprecation) * k_i
    y'   = scaling * prod(k_i' ** alpha_i)
    g'   = y' / y - 1                      (while y > 0)

Invested capital is non-malleable: a strategy switch reallocates only new
investment, never the existing per-sector stock.  Income is recomputed from
capital every step rather than accumulated multiplicatively, so the state
fields cannot drift apart.  A zero-income state is absorbing: income stays
zero and growth is reported as 0.0 with the ``absorbed`` flag set, never NaN.

Steps are numbered from 1; a PriceSchedule maps each step to a price vector
(constant, or a time series that holds its last value past the end).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    AgentState,
    ConfigurationError,
    DimensionError,
    DomainError,
    EconomyParams,
    InvariantViolation,
    ProductionCoefficients,
    Strategy,
    _freeze,
    production,
    weighted_geometric_mean,
)
from . import equilibrium as eq


@dataclass(frozen=True, eq=False)
class PriceSchedule:
    """Prices per simulation step: a constant vector or a step-indexed series.

    Series lookups past the last entry hold the last value.  The model itself
    prescribes no law for dynamic prices; this type makes whatever choice the
    caller made explicit.
    """

    mode: str  # "constant" | "time-series"
    values: np.ndarray  # (n,) for constant, (T, n) for time-series

    def __post_init__(self):
        if self.mode not in ("constant", "time-series"):
            raise ConfigurationError(f"unknown price schedule mode {self.mode!r}")
        arr = np.asarray(self.values, dtype=float)
        if self.mode == "constant":
            if arr.ndim != 1 or arr.size == 0:
                raise DimensionError("constant price schedule needs one price vector")
        else:
            if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
                raise DimensionError(
                    "time-series price schedule needs a (steps, sectors) array"
                )
        if not np.isfinite(arr).all() or (arr <= 0.0).any():
            raise DomainError("every price must be a positive real")
        object.__setattr__(self, "values", _freeze(arr))

    @classmethod
    def constant(cls, prices) -> "PriceSchedule":
        return cls("constant", np.asarray(prices, dtype=float))

    @classmethod
    def series(cls, rows) -> "PriceSchedule":
        return cls("time-series", np.asarray(rows, dtype=float))

    @property
    def sectors(self) -> int:
        return int(self.values.shape[-1])

    def at(self, step: int) -> np.ndarray:
        """Price vector for simulation step ``step`` (1-based)."""
        if step < 1:
            raise ConfigurationError(f"step must be >= 1, got {step}")
        if self.mode == "constant":
            return self.values
        return self.values[min(step - 1, self.values.shape[0] - 1)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceSchedule):
            return NotImplemented
        return self.mode == other.mode and np.array_equal(self.values, other.values)


class TraceRecord(NamedTuple):
    """One row of simulation output."""

    step: int
    agent_id: int
    income: float
    growth: float
    equilibrium_growth: float  # of the current strategy at the step's prices
    excess_growth: float  # growth - equilibrium_growth
    strategy: tuple[float, ...]


def growth_rate(income_prev: float, income_curr: float) -> float:
    """Per-step income growth: income_curr / income_prev - 1."""
    if not (np.isfinite(income_prev) and income_prev > 0.0):
        raise DomainError(f"previous income must be positive, got {income_prev}")
    if not (np.isfinite(income_curr) and income_curr >= 0.0):
        raise DomainError(f"current income must be non-negative, got {income_curr}")
    return income_curr / income_prev - 1.0


def step_agent(
    state: AgentState,
    params: EconomyParams,
    coefficients: ProductionCoefficients,
    prices_at_t,
) -> AgentState:
    """Advance one agent by one period under the given prices."""
    p = np.asarray(prices_at_t, dtype=float)
    n = state.sectors
    if n != params.sectors or n != coefficients.sectors or p.size != n:
        raise ConfigurationError(
            f"dimension mismatch: state {n}, params {params.sectors}, "
            f"coefficients {coefficients.sectors}, prices {p.size}"
        )
    # AgentState construction already guarantees finite non-negative capital
    # and income, so only the raw price vector needs a domain check here
    if not float(p.min()) > 0.0 or float(p.max()) == np.inf:
        raise DomainError("every price must be a positive finite real")
    k = state.capital
    y = state.income

    k_new = (state.strategy.weights / p) * y + (1.0 - params.deprecation) * k
    y_new = params.scaling * weighted_geometric_mean(k_new, coefficients)
    if y > 0.0:
        g_new = y_new / y - 1.0
        absorbed = y_new == 0.0
    else:
        # absorbing zero-income state: no investment happens, capital decays
        g_new = 0.0
        absorbed = True
    return AgentState(k_new, y_new, g_new, state.strategy, absorbed)


def verify_state_consistency(
    state: AgentState,
    params: EconomyParams,
    coefficients: ProductionCoefficients,
    rel_tol: float = 1e-12,
) -> None:
    """Raise unless state.income matches production(state.capital) within rel_tol."""
    derived = production(state.capital, coefficients, params.scaling)
    scale = max(abs(derived), abs(state.income), 1e-300)
    if abs(derived - state.income) > rel_tol * scale:
        raise InvariantViolation(
            f"income {state.income!r} inconsistent with capital-derived "
            f"value {derived!r}"
        )


def equilibrium_state(
    strategy: Strategy,
    coefficients: ProductionCoefficients,
    params: EconomyParams,
    prices=None,
    income: float = 1.0,
) -> AgentState:
    """Agent state sitting exactly at the strategy's equilibrium ratio.

    Capital is the equilibrium capital/income ratio scaled to the requested
    income level; stepping such a state realizes the equilibrium growth rate
    immediately.  Requires a strategy with positive response.
    """
    if income <= 0.0:
        raise DomainError("income must be positive")
    ratio = eq.equilibrium_ratio(strategy, coefficients, params, prices)
    capital = ratio * income
    y = production(capital, coefficients, params.scaling)
    g = eq.equilibrium_growth(strategy, coefficients, params, prices)
    return AgentState(capital, y, g, strategy)


def uniform_state(
    strategy: Strategy,
    coefficients: ProductionCoefficients,
    params: EconomyParams,
    capital_level: float = 1.0,
) -> AgentState:
    """Agent state with the same capital in every sector (generic start)."""
    if capital_level <= 0.0:
        raise DomainError("capital_level must be positive")
    capital = np.full(params.sectors, float(capital_level))
    y = production(capital, coefficients, params.scaling)
    return AgentState(capital, y, 0.0, strategy)


def run_hold(
    state: AgentState,
    params: EconomyParams,
    coefficients: ProductionCoefficients,
    prices: PriceSchedule,
    steps: int,
    agent_id: int = 0,
) -> list[TraceRecord]:
    """Simulate ``steps`` periods with a fixed strategy; one record per step."""
    if steps < 1:
        raise ConfigurationError(f"steps must be >= 1, got {steps}")
    verify_state_consistency(state, params, coefficients)
    records: list[TraceRecord] = []
    sigma = state.strategy.as_tuple()
    # equilibrium growth only changes when prices do; recompute on change
    last_p: np.ndarray | None = None
    g_star = 0.0
    for t in range(1, steps + 1):
        p = prices.at(t)
        if last_p is None or (p is not last_p and not np.array_equal(p, last_p)):
            g_star = eq.equilibrium_growth(state.strategy, coefficients, params, p)
            last_p = p
        state = step_agent(state, params, coefficients, p)
        records.append(
            TraceRecord(
                t, agent_id, state.income, state.growth, g_star,
                state.growth - g_star, sigma,
            )
        )
    return records


def run_switch_experiment(
    initial: Strategy,
    switches: Sequence[tuple[int, Strategy]],
    params: EconomyParams,
    coefficients: ProductionCoefficients,
    prices: PriceSchedule,
    steps: int,
    initial_state: AgentState | None = None,
    agent_id: int = 0,
) -> list[TraceRecord]:
    """Simulate one agent whose strategy is replaced at the given steps.

    A switch scheduled at step t takes effect before step t is computed.
    Capital is untouched by a switch: once invested it cannot be transferred
    between sectors.  The trace records the equilibrium growth of whichever
    strategy is current at each step.  With no switches the output is
    identical to ``run_hold``.

    By default the agent starts exactly at the initial strategy's equilibrium
    with income 1, so pre-switch growth already equals equilibrium growth.
    """
    if steps < 1:
        raise ConfigurationError(f"steps must be >= 1, got {steps}")
    last_step = 0
    for at_step, strat in switches:
        if not (1 <= at_step <= steps):
            raise ConfigurationError(
                f"switch step {at_step} outside [1, {steps}]"
            )
        if at_step <= last_step:
            raise ConfigurationError(
                f"switch steps must be strictly increasing (got {at_step} "
                f"after {last_step})"
            )
        if strat.sectors != params.sectors:
            raise ConfigurationError(
                f"switch strategy sectors {strat.sectors} != economy sectors "
                f"{params.sectors}"
            )
        last_step = at_step

    if initial_state is None:
        state = equilibrium_state(
            initial, coefficients, params, prices.at(1), income=1.0
        )
    else:
        state = initial_state
        if state.strategy != initial:
            state = replace(state, strategy=initial)
        verify_state_consistency(state, params, coefficients)

    pending = list(switches)
    records: list[TraceRecord] = []
    last_p: np.ndarray | None = None
    current = state.strategy
    sigma = current.as_tuple()
    g_star = 0.0
    stale = True
    for t in range(1, steps + 1):
        if pending and pending[0][0] == t:
            _, new_strategy = pending.pop(0)
            state = replace(state, strategy=new_strategy)
            current = new_strategy
            sigma = current.as_tuple()
            stale = True
        p = prices.at(t)
        if last_p is None or (p is not last_p and not np.array_equal(p, last_p)):
            last_p = p
            stale = True
        if stale:
            g_star = eq.equilibrium_growth(current, coefficients, params, p)
            stale = False
        state = step_agent(state, params, coefficients, p)
        records.append(
            TraceRecord(
                t, agent_id, state.income, state.growth, g_star,
                state.growth - g_star, sigma,
            )
        )
    return records
