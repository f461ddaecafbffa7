"""Closed-form equilibrium analysis of a held strategy under stable prices.

When an agent holds one strategy and prices are constant, each sector's
capital/income ratio follows an affine recursion x(t) = a + b*x(t-1) with
0 <= b < 1, so it converges monotonically to a unique fixed point.  Solving
the fixed point against the production function gives the equilibrium
income growth rate

    g* = scaling * prod(p_i ** -alpha_i) * prod(sigma_i ** alpha_i) - deprecation

and the equilibrium capital/income ratio sigma_i / (p_i * (g* + deprecation)).
The strategy-dependent factor prod(sigma_i ** alpha_i) -- the "response" of
the economy to the strategy -- is the only term that affects the ordering of
strategies: scaling, prices and deprecation are monotone transformations.
Superlevel sets of the response are convex, there is a single global maximum
at sigma = alpha and no local maxima, so even a trivial hill climber finds it.

The special case: growth - deprecation is only attainable when every sector
with a positive production coefficient receives zero investment, in which
case the response is zero and the growth formula still applies exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigurationError,
    DomainError,
    EconomyParams,
    InvariantViolation,
    ProductionCoefficients,
    Strategy,
    weighted_geometric_mean,
)

#: Relative slack (in log-domain) for boundary-inclusive contour membership.
CONTOUR_REL_TOL = 1e-12


def _resolve_prices(params: EconomyParams, prices) -> np.ndarray:
    if prices is None:
        return params.prices
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or p.size != params.sectors:
        raise ConfigurationError(
            f"prices dimension {p.size} != sectors {params.sectors}"
        )
    if not np.isfinite(p).all() or (p <= 0.0).any():
        raise DomainError("every price must be a positive real")
    return p


@dataclass(frozen=True)
class ContourQuery:
    """A growth level whose contour (iso-growth) set is being queried."""

    level: float
    params: EconomyParams
    coefficients: ProductionCoefficients

    def __post_init__(self):
        if not np.isfinite(self.level):
            raise DomainError("contour level must be finite")
        if self.level < -self.params.deprecation:
            raise DomainError(
                "contour level cannot lie below -deprecation "
                f"({self.level} < {-self.params.deprecation})"
            )


def response(strategy: Strategy, coefficients: ProductionCoefficients) -> float:
    """prod(sigma_i ** alpha_i): the strategy-dependent factor of equilibrium growth.

    Lies in [0, 1]; attains its unique maximum exactly at sigma = alpha.
    """
    if strategy.sectors != coefficients.sectors:
        raise ConfigurationError(
            f"strategy sectors {strategy.sectors} != coefficients sectors "
            f"{coefficients.sectors}"
        )
    return weighted_geometric_mean(strategy.weights, coefficients)


def equilibrium_growth(
    strategy: Strategy,
    coefficients: ProductionCoefficients,
    params: EconomyParams,
    prices=None,
) -> float:
    """Income growth rate an agent converges to while holding ``strategy``.

    Evaluates scaling * prod(p_i ** -alpha_i) * prod(sigma_i ** alpha_i)
    - deprecation, with both products combined in one log-domain sum to avoid
    cancellation for extreme prices.  Returns exactly -deprecation when the
    response term is zero.
    """
    if strategy.sectors != coefficients.sectors:
        raise ConfigurationError(
            f"strategy sectors {strategy.sectors} != coefficients sectors "
            f"{coefficients.sectors}"
        )
    p = _resolve_prices(params, prices)
    sup = coefficients.support
    sig = strategy.weights[sup]
    if (sig == 0.0).any():
        return -params.deprecation
    alph = coefficients.alphas[sup]
    log_term = float(np.dot(alph, np.log(sig) - np.log(p[sup])))
    return params.scaling * float(np.exp(log_term)) - params.deprecation


def equilibrium_ratio(
    strategy: Strategy,
    coefficients: ProductionCoefficients,
    params: EconomyParams,
    prices=None,
) -> np.ndarray:
    """Per-sector limit of capital/income: sigma_i / (p_i * (g* + deprecation)).

    Zero-investment sectors have ratio 0.  Requires g* > -deprecation for any
    sector with positive investment; a strategy whose response is zero but
    which still invests somewhere has no finite ratio there, so asking for it
    raises InvariantViolation.
    """
    p = _resolve_prices(params, prices)
    g = equilibrium_growth(strategy, coefficients, params, p)
    denom = g + params.deprecation
    w = strategy.weights
    if denom <= 0.0:
        if (w > 0.0).any():
            raise InvariantViolation(
                "equilibrium growth is -deprecation while some sector still "
                "receives investment; its capital/income ratio diverges"
            )
        return np.zeros_like(w)
    return w / (p * denom)


def contour_contains(strategy: Strategy, query: ContourQuery, prices=None) -> bool:
    """True iff ``strategy`` reaches equilibrium growth >= ``query.level``.

    Boundary-inclusive: membership is prod(sigma_i ** alpha_i) >=
    ((level + deprecation) / scaling) * prod(p_i ** alpha_i), compared in
    log-domain with a 1e-12 relative slack so points exactly on the contour
    test true.
    """
    params = query.params
    coeffs = query.coefficients
    p = _resolve_prices(params, prices)
    threshold_scale = (query.level + params.deprecation) / params.scaling
    if threshold_scale <= 0.0:
        return True  # every strategy grows at least at -deprecation
    resp = response(strategy, coeffs)
    if resp == 0.0:
        return False
    sup = coeffs.support
    log_rhs = float(np.log(threshold_scale)) + float(
        np.dot(coeffs.alphas[sup], np.log(p[sup]))
    )
    return float(np.log(resp)) >= log_rhs - CONTOUR_REL_TOL


def calibrate_scaling(
    target_growth: float,
    coefficients: ProductionCoefficients,
    deprecation: float,
    prices,
) -> float:
    """Scaling factor that puts the optimal strategy's equilibrium growth at target.

    Inverts the growth formula at sigma = alpha:
    scaling = (target + deprecation) / (prod(p_i ** -alpha_i) * prod(alpha_i ** alpha_i)).
    Zero coefficients contribute factor 1 (0**0 == 1).  The target must exceed
    -deprecation, otherwise the required scaling would not be positive.
    """
    if not (0.0 < deprecation <= 1.0):
        raise DomainError("deprecation must lie in (0, 1]")
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or p.size != coefficients.sectors:
        raise ConfigurationError(
            f"prices dimension {p.size} != coefficients sectors {coefficients.sectors}"
        )
    if not np.isfinite(p).all() or (p <= 0.0).any():
        raise DomainError("every price must be a positive real")
    if not np.isfinite(target_growth) or target_growth <= -deprecation:
        raise DomainError(
            f"target growth must exceed -deprecation ({-deprecation}); "
            f"got {target_growth}"
        )
    sup = coefficients.support
    alph = coefficients.alphas[sup]
    # log of prod(p**-alpha) * prod(alpha**alpha), negated for the inversion
    log_gain = float(np.dot(alph, np.log(alph) - np.log(p[sup])))
    return (target_growth + deprecation) * float(np.exp(-log_gain))


def optimal_strategy(coefficients: ProductionCoefficients) -> Strategy:
    """The unique global maximizer of the response term: sigma = alpha."""
    return Strategy(coefficients.alphas)


@dataclass(frozen=True)
class HillClimbResult:
    strategy: Strategy
    response_value: float
    iterations: int
    converged: bool


def hill_climb(
    start: Strategy,
    coefficients: ProductionCoefficients,
    step_size: float = 0.05,
    max_iters: int = 10_000,
    rng=None,
    *,
    patience: int = 20,
    decay: float = 0.5,
    min_step: float = 1e-7,
) -> HillClimbResult:
    """Random-perturbation ascent of the response term on the simplex.

    Perturb the incumbent with spherical Gaussian noise of the current step
    size, repair onto the simplex, keep the candidate iff its response is
    strictly higher.  After ``patience`` consecutive rejections the step size
    decays geometrically; the search stops once it falls below ``min_step``
    (converged) or ``max_iters`` is exhausted (best-so-far, not converged).

    ``rng`` may be a numpy Generator or a seed; pass one explicitly for
    reproducible searches.
    """
    if step_size <= 0.0:
        raise DomainError("step_size must be positive")
    if start.sectors != coefficients.sectors:
        raise ConfigurationError(
            f"start sectors {start.sectors} != coefficients sectors "
            f"{coefficients.sectors}"
        )
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    n = start.sectors

    best = start
    best_val = response(start, coefficients)
    step = float(step_size)
    stall = 0
    iterations = 0
    converged = False
    while iterations < max_iters:
        iterations += 1
        perturbed = best.weights + gen.normal(0.0, step, size=n)
        clipped = np.maximum(perturbed, 0.0)
        total = float(clipped.sum())
        if total <= 0.0:
            stall += 1
        else:
            candidate = Strategy(clipped / total)
            val = response(candidate, coefficients)
            if val > best_val:
                best, best_val = candidate, val
                stall = 0
            else:
                stall += 1
        if stall >= patience:
            step *= decay
            stall = 0
            if step < min_step:
                converged = True
                break
    return HillClimbResult(best, best_val, iterations, converged)
