"""Domain types and the shared numeric primitives of the growth economy.

The model lives on two unit simplices: investment strategies (the fraction
of income an agent puts into each capital sector) and production
coefficients (per-sector Cobb-Douglas elasticities, summing to one for
constant returns to scale).  This module owns the simplex validation and
repair rules, the weighted-geometric-mean kernel that both the production
function and the strategy-response term are built on, and the immutable
value types every other module passes around.

All functions here are pure; all types are frozen.  Products of powers are
evaluated in log-domain so they do not underflow for many sectors, with
exact-zero factors short-circuiting to 0.  Factors with a zero exponent
contribute 1 (the 0**0 == 1 convention), which makes sectors with a zero
production coefficient economically inert.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Default absolute tolerance for simplex membership checks.
SIMPLEX_TOL = 1e-12


class GrowthLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(GrowthLabError, ValueError):
    """Invalid parameters, mismatched dimensions, bad run configuration."""


class DimensionError(ConfigurationError):
    """Empty vector or dimension mismatch."""


class DomainError(GrowthLabError, ValueError):
    """Value outside the mathematical domain of an operation."""


class DegenerateInputError(DomainError):
    """Input that cannot be repaired into a valid simplex point."""


class SelectionError(GrowthLabError, ValueError):
    """Imitation selection is impossible (e.g. population of one)."""


class InvariantViolation(GrowthLabError, RuntimeError):
    """An internal consistency condition failed; indicates a bug or misuse."""


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-d vector")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Strategy:
    """Investment strategy: per-sector income shares on the unit simplex."""

    weights: np.ndarray

    def __post_init__(self):
        w = _as_vector(self.weights, "strategy weights")
        if not np.isfinite(w).all():
            raise DomainError("strategy weights must be finite")
        if (w < 0.0).any() or (w > 1.0).any():
            raise DomainError("strategy weights must lie in [0, 1]")
        if abs(float(w.sum()) - 1.0) > SIMPLEX_TOL:
            raise DomainError(
                f"strategy weights must sum to 1 within {SIMPLEX_TOL} (got {w.sum()!r})"
            )
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def sectors(self) -> int:
        return int(self.weights.size)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(x) for x in self.weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Strategy):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __repr__(self) -> str:
        return f"Strategy({self.as_tuple()})"


@dataclass(frozen=True, eq=False)
class ProductionCoefficients:
    """Cobb-Douglas elasticities per sector; sum to one (constant returns)."""

    alphas: np.ndarray
    #: Indices of sectors with a strictly positive coefficient.  Cached so the
    #: product kernel can skip zero-exponent factors without re-scanning.
    support: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = _as_vector(self.alphas, "production coefficients")
        if not np.isfinite(a).all():
            raise DomainError("production coefficients must be finite")
        if (a < 0.0).any() or (a > 1.0).any():
            raise DomainError("production coefficients must lie in [0, 1]")
        if abs(float(a.sum()) - 1.0) > SIMPLEX_TOL:
            raise DomainError(
                f"production coefficients must sum to 1 within {SIMPLEX_TOL} "
                f"(got {a.sum()!r})"
            )
        object.__setattr__(self, "alphas", _freeze(a))
        object.__setattr__(self, "support", _freeze(np.flatnonzero(a > 0.0)))

    @property
    def sectors(self) -> int:
        return int(self.alphas.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductionCoefficients):
            return NotImplemented
        return np.array_equal(self.alphas, other.alphas)

    def __repr__(self) -> str:
        return f"ProductionCoefficients({tuple(float(x) for x in self.alphas)})"


@dataclass(frozen=True, eq=False)
class EconomyParams:
    """Scalar economy parameters: scaling, deprecation, prices, sector count.

    ``scaling`` bounds the maximum possible income growth rate; ``deprecation``
    is the per-step proportional capital decay, uniform across sectors; the
    ``prices`` vector is the default (constant) capital price per sector.
    """

    scaling: float
    deprecation: float
    prices: np.ndarray
    sectors: int = 0  # 0 means "infer from prices"

    def __post_init__(self):
        p = _as_vector(self.prices, "prices")
        n = int(self.sectors) if self.sectors else p.size
        if not (np.isfinite(self.scaling) and self.scaling > 0.0):
            raise DomainError("scaling must be a positive real")
        if not (0.0 < self.deprecation <= 1.0):
            raise DomainError("deprecation must lie in (0, 1]")
        if not np.isfinite(p).all() or (p <= 0.0).any():
            raise DomainError("every price must be a positive real")
        if p.size != n:
            raise DimensionError(f"prices dimension {p.size} != sectors {n}")
        object.__setattr__(self, "scaling", float(self.scaling))
        object.__setattr__(self, "deprecation", float(self.deprecation))
        object.__setattr__(self, "prices", _freeze(p))
        object.__setattr__(self, "sectors", n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EconomyParams):
            return NotImplemented
        return (
            self.scaling == other.scaling
            and self.deprecation == other.deprecation
            and self.sectors == other.sectors
            and np.array_equal(self.prices, other.prices)
        )


@dataclass(frozen=True, eq=False)
class AgentState:
    """One agent's economic state: per-sector capital, income, last growth.

    ``income`` is always the production value of ``capital`` (recomputed each
    step, never accumulated separately).  ``growth`` is the last realized
    per-step income growth rate; with constant returns to scale it cannot
    fall below ``-deprecation`` while income is positive.  ``absorbed`` flags
    the zero-income state, which is absorbing: income stays zero and growth
    is reported as 0.0 rather than NaN.
    """

    capital: np.ndarray
    income: float
    growth: float
    strategy: Strategy
    absorbed: bool = False

    def __post_init__(self):
        k = _as_vector(self.capital, "capital")
        # min/max catch NaN (comparisons fail) and infinities in one pass each
        if not (float(k.min()) >= 0.0 and float(k.max()) < np.inf):
            raise DomainError("capital must be a vector of non-negative reals")
        if k.size != self.strategy.sectors:
            raise DimensionError(
                f"capital dimension {k.size} != strategy sectors {self.strategy.sectors}"
            )
        income = float(self.income)
        growth = float(self.growth)
        if not income >= 0.0 or income == np.inf:
            raise DomainError("income must be a non-negative real")
        if not np.isfinite(growth):
            raise DomainError("growth must be finite")
        object.__setattr__(self, "capital", _freeze(k))
        object.__setattr__(self, "income", income)
        object.__setattr__(self, "growth", growth)

    @property
    def sectors(self) -> int:
        return int(self.capital.size)


def validate_simplex(v, tol: float = SIMPLEX_TOL) -> bool:
    """True iff ``v`` is a simplex point up to ``tol``.

    Components may dip to ``-tol``; after clamping negatives to zero the sum
    must be 1 within ``tol``.  Non-finite input is never valid.
    """
    arr = _as_vector(v, "simplex candidate")
    if not np.isfinite(arr).all():
        return False
    if (arr < -tol).any():
        return False
    clamped = np.maximum(arr, 0.0)
    return abs(float(clamped.sum()) - 1.0) <= tol


def project_to_simplex(v) -> Strategy:
    """Repair an arbitrary vector into a Strategy: clip negatives, renormalize.

    This is the repair step applied after Gaussian imitation noise.  It is
    deliberately the simplest rule (not the Euclidean projection); swap in an
    alternative here if a different repair geometry is ever needed.
    """
    arr = _as_vector(v, "projection input")
    if not np.isfinite(arr).all():
        raise DomainError("projection input must be finite")
    clipped = np.maximum(arr, 0.0)
    total = float(clipped.sum())
    if total <= 0.0:
        raise DegenerateInputError(
            "cannot project: no component is positive after clipping"
        )
    return Strategy(clipped / total)


def weighted_geometric_mean(base, exponents: ProductionCoefficients) -> float:
    """exp(sum over positive-exponent sectors of alpha_i * ln(base_i)).

    Returns 0.0 if any base component under a positive exponent is exactly
    zero.  Sectors with a zero exponent are skipped entirely (0**0 == 1).
    """
    arr = _as_vector(base, "base")
    if arr.size != exponents.sectors:
        raise DimensionError(
            f"base dimension {arr.size} != coefficients sectors {exponents.sectors}"
        )
    lo = float(arr.min())
    if not lo >= 0.0 or float(arr.max()) == np.inf:
        raise DomainError("base components must be non-negative finite reals")
    sup = exponents.support
    if sup.size == arr.size:
        vals = arr
        alph = exponents.alphas
    else:
        vals = arr[sup]
        alph = exponents.alphas[sup]
    if lo == 0.0 and (vals == 0.0).any():
        return 0.0
    return float(np.exp(np.dot(alph, np.log(vals))))


def production(capital, coefficients: ProductionCoefficients, scaling: float) -> float:
    """Cobb-Douglas income from per-sector capital: scaling * prod(k_i ** alpha_i)."""
    if scaling <= 0.0:
        raise DomainError("scaling must be positive")
    return scaling * weighted_geometric_mean(capital, coefficients)
