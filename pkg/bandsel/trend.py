"""
Regression design, trend functions and weight functions.

The model is Y_i = r(x_i) + eps_i on the equispaced design x_i = i/n.
Trends carry analytic first and second derivatives; the curvature
integrals the bandwidth formulas need are computed here.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict

import numpy as np
from scipy import integrate

from .errors import QuadratureError, ValidationError

logger = logging.getLogger(__name__)

CURVATURE_PANELS = 2 ** 16

ArrayFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Design:
    """Equispaced design x_i = i/n, i = 1..n."""

    n: int
    points: np.ndarray = field(compare=False, repr=False)

    @property
    def spacing(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class TrendSpec:
    """
    A trend r with analytic derivatives.

    Attributes:
        name: Registry name
        r: Vectorised trend
        r1: First derivative
        r2: Second derivative
        periodic: True when r is smoothly 1-periodic
    """

    name: str
    r: ArrayFunc
    r1: ArrayFunc
    r2: ArrayFunc
    periodic: bool = False

    def values(self, design: Design) -> np.ndarray:
        return np.asarray(self.r(design.points), dtype=float)


@dataclass(frozen=True)
class WeightSpec:
    """
    Nonnegative weight function u, zero outside [lo, hi].

    Attributes:
        name: Registry name
        u: Vectorised weight
        lo: Lower end of the support
        hi: Upper end of the support
        is_uniform: True for u == 1 on [0, 1]
    """

    name: str
    u: ArrayFunc
    lo: float = 0.0
    hi: float = 1.0
    is_uniform: bool = False

    def values(self, design: Design) -> np.ndarray:
        return np.asarray(self.u(design.points), dtype=float)


def make_design(n: int) -> Design:
    """
    Build the equispaced design of size n.

    Args:
        n: Sample size, at least 4

    Returns:
        Design with points i/n

    Raises:
        ValidationError: If n < 4
    """
    if int(n) != n or n < 4:
        raise ValidationError(f"design size n must be an integer >= 4, got {n}")
    n = int(n)
    return Design(n=n, points=np.arange(1, n + 1, dtype=float) / n)


@lru_cache(maxsize=None)
def benchmark_trend() -> TrendSpec:
    """r(x) = (4x(1-x))^3, smoothly periodic on [0, 1]."""

    def r(x):
        return (4.0 * x * (1.0 - x)) ** 3

    def r1(x):
        return 192.0 * x * x * (1.0 - x) ** 2 * (1.0 - 2.0 * x)

    def r2(x):
        return 384.0 * x - 2304.0 * x ** 2 + 3840.0 * x ** 3 - 1920.0 * x ** 4

    return TrendSpec("benchmark", r, r1, r2, periodic=True)


@lru_cache(maxsize=None)
def zero_trend() -> TrendSpec:
    zero = np.zeros_like
    return TrendSpec("zero", zero, zero, zero, periodic=True)


@lru_cache(maxsize=None)
def linear_trend() -> TrendSpec:
    return TrendSpec("linear", lambda x: np.asarray(x, dtype=float), np.ones_like, np.zeros_like)


def trend_from_function(r: ArrayFunc, name: str = "custom", periodic: bool = False,
                        step: float = 1e-4) -> TrendSpec:
    """
    Wrap a user trend, deriving r' and r'' by central finite differences.

    The derivatives carry an O(step^2) truncation error plus a rounding
    error of order eps/step^2 for r''.

    Args:
        r: Vectorised trend
        name: Name reported in outputs
        periodic: Whether r is smoothly 1-periodic
        step: Finite-difference step

    Returns:
        TrendSpec
    """
    if not step > 0:
        raise ValidationError(f"finite-difference step must be positive, got {step}")

    def r1(x):
        return (r(x + step) - r(x - step)) / (2.0 * step)

    def r2(x):
        return (r(x + step) - 2.0 * r(x) + r(x - step)) / (step * step)

    return TrendSpec(name, r, r1, r2, periodic=periodic)


@lru_cache(maxsize=None)
def uniform_weight() -> WeightSpec:
    """u == 1 on [0, 1]; meaningful for periodic smoothing only."""
    return WeightSpec("uniform", np.ones_like, 0.0, 1.0, is_uniform=True)


@lru_cache(maxsize=None)
def bump_weight(eps: float = 0.1) -> WeightSpec:
    """
    C^1 bump u(x) = 30((x - eps)(1 - eps - x))^2 / (1 - 2 eps)^5 on [eps, 1 - eps].

    The constant makes int u = 1.
    """
    if not 0.0 < eps < 0.5:
        raise ValidationError(f"bump weight margin must lie in (0, 1/2), got {eps}")
    length = 1.0 - 2.0 * eps

    def u(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= eps) & (x <= 1.0 - eps)
        core = (x - eps) * (1.0 - eps - x)
        return np.where(inside, 30.0 * core * core / length ** 5, 0.0)

    return WeightSpec("bump", u, eps, 1.0 - eps, is_uniform=False)


def _simpson(f: ArrayFunc, lo: float, hi: float, what: str) -> float:
    x = np.linspace(lo, hi, CURVATURE_PANELS + 1)
    values = f(x)
    if not np.all(np.isfinite(values)):
        raise QuadratureError(f"non-finite integrand while integrating {what}")
    return float(integrate.simpson(values, x=x))


def curvature_integral(t: TrendSpec, w: WeightSpec, squared_weight: bool = False) -> float:
    """
    Integrate u r''^2 (or u^2 r''^2) over the weight support.

    Args:
        t: Trend
        w: Weight function
        squared_weight: Use u^2 instead of u

    Returns:
        The (nonnegative) curvature integral
    """
    power = 2 if squared_weight else 1
    return _simpson(lambda x: w.u(x) ** power * t.r2(x) ** 2, w.lo, w.hi,
                    f"curvature of trend {t.name}")


def weight_integral(w: WeightSpec, squared: bool = False) -> float:
    """Integrate u (or u^2) over [0, 1]."""
    if w.is_uniform:
        return 1.0
    power = 2 if squared else 1
    return _simpson(lambda x: w.u(x) ** power, w.lo, w.hi, f"weight {w.name}")


TRENDS: Dict[str, Callable[[], TrendSpec]] = {
    "benchmark": benchmark_trend,
    "zero": zero_trend,
    "linear": linear_trend,
}

WEIGHTS: Dict[str, Callable[[], WeightSpec]] = {
    "uniform": uniform_weight,
    "bump": bump_weight,
}


def get_trend(name: str) -> TrendSpec:
    try:
        return TRENDS[name]()
    except KeyError:
        raise ValidationError(f"unknown trend '{name}' (choose from {', '.join(sorted(TRENDS))})") from None


def get_weight(name: str) -> WeightSpec:
    try:
        return WEIGHTS[name]()
    except KeyError:
        raise ValidationError(f"unknown weight '{name}' (choose from {', '.join(sorted(WEIGHTS))})") from None
