"""
Kernel functions, the derived functions G and K - G, and their moments.

Every kernel is compactly supported on [-half_width, half_width], even and
C^1. Moments are integrated once, when the kernel is built, with a fixed
composite Simpson rule so that results are reproducible bit for bit.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy import integrate

from .errors import QuadratureError, ValidationError

logger = logging.getLogger(__name__)

# Composite Simpson panels used for every kernel moment
SIMPSON_PANELS = 2 ** 17

ArrayLike = Union[float, np.ndarray]
ArrayFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KernelMoments:
    """Scalar kernel integrals used by the bandwidth formulas."""

    second_moment: float  # int t^2 K(t) dt
    k_sq: float  # int K^2
    kg_sq: float  # int (K - G)^2 over the whole line
    k_zero: float  # K(0)
    kg_sq_half: float  # int_0^half_width (K - G)^2


@dataclass(frozen=True)
class KernelSpec:
    """
    A compactly supported even kernel with its derivative.

    Attributes:
        name: Registry name
        evaluate: Vectorised K, zero outside the support
        derivative: Vectorised K', zero outside the support
        half_width: Support is [-half_width, half_width]
        moments: Cached KernelMoments, filled at construction
    """

    name: str
    evaluate: ArrayFunc
    derivative: ArrayFunc
    half_width: float
    moments: KernelMoments = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValidationError(f"kernel half_width must be positive, got {self.half_width}")
        object.__setattr__(self, "moments", _compute_moments(self))
        logger.debug("Built kernel %s with moments %s", self.name, self.moments)

    def g(self, x: np.ndarray) -> np.ndarray:
        """G(x) = -x K'(x)."""
        return -x * self.derivative(x)

    def k_minus_g(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x) - self.g(x)


def _scalar_or_array(x: ArrayLike, values: np.ndarray) -> ArrayLike:
    if np.ndim(x) == 0:
        return float(values)
    return values


def eval_kernel(k: KernelSpec, x: ArrayLike) -> ArrayLike:
    """
    Evaluate K at x (scalar or array).

    Args:
        k: Kernel
        x: Evaluation point(s)

    Returns:
        K(x), zero outside the support
    """
    xs = np.asarray(x, dtype=float)
    return _scalar_or_array(x, k.evaluate(xs))


def eval_kernel_derivative(k: KernelSpec, x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    return _scalar_or_array(x, k.derivative(xs))


def eval_G(k: KernelSpec, x: ArrayLike) -> ArrayLike:
    """
    Evaluate G(x) = -x K'(x).

    Args:
        k: Kernel
        x: Evaluation point(s)

    Returns:
        G(x); vanishes at 0 and outside the support
    """
    xs = np.asarray(x, dtype=float)
    return _scalar_or_array(x, k.g(xs))


def integrate_over_support(k: KernelSpec, f: ArrayFunc, lo: Optional[float] = None,
                           hi: Optional[float] = None, panels: int = SIMPSON_PANELS) -> float:
    """
    Integrate f over (a part of) the kernel support with composite Simpson.

    Args:
        k: Kernel whose support bounds the integral
        f: Vectorised integrand
        lo: Lower bound (default -half_width)
        hi: Upper bound (default half_width)
        panels: Number of Simpson panels (even)

    Returns:
        The integral

    Raises:
        QuadratureError: If the integrand is not finite on the nodes
    """
    lo = -k.half_width if lo is None else lo
    hi = k.half_width if hi is None else hi
    x = np.linspace(lo, hi, panels + 1)
    values = f(x)
    if not np.all(np.isfinite(values)):
        raise QuadratureError(f"non-finite integrand on the support of kernel {k.name}")
    return float(integrate.simpson(values, x=x))


def _compute_moments(k: KernelSpec) -> KernelMoments:
    second_moment = integrate_over_support(k, lambda t: t * t * k.evaluate(t))
    k_sq = integrate_over_support(k, lambda t: k.evaluate(t) ** 2)
    kg_sq = integrate_over_support(k, lambda t: k.k_minus_g(t) ** 2)
    kg_sq_half = integrate_over_support(k, lambda t: k.k_minus_g(t) ** 2, lo=0.0)
    k_zero = float(k.evaluate(np.zeros(1))[0])
    for name, value in (("second_moment", second_moment), ("k_sq", k_sq), ("kg_sq", kg_sq)):
        if not np.isfinite(value):
            raise QuadratureError(f"kernel {k.name}: {name} did not converge")
    return KernelMoments(
        second_moment=second_moment,
        k_sq=k_sq,
        kg_sq=kg_sq,
        k_zero=k_zero,
        kg_sq_half=kg_sq_half,
    )


def kernel_moments(k: KernelSpec) -> KernelMoments:
    """Return the moments cached on the kernel."""
    return k.moments


# Built-in kernels. Evaluation goes through |x| so that K(x) == K(-x) exactly.

def _biweight(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    inner = 1.0 - 4.0 * ax * ax
    return np.where(ax <= 0.5, 1.875 * inner * inner, 0.0)


def _biweight_derivative(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    inner = 1.0 - 4.0 * ax * ax
    return np.where(ax <= 0.5, -30.0 * x * inner, 0.0)


def _triweight(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    inner = 1.0 - ax * ax
    return np.where(ax <= 1.0, (35.0 / 32.0) * inner ** 3, 0.0)


def _triweight_derivative(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    inner = 1.0 - ax * ax
    return np.where(ax <= 1.0, -(105.0 / 16.0) * x * inner * inner, 0.0)


@lru_cache(maxsize=None)
def biweight_kernel() -> KernelSpec:
    """K(x) = (15/8)(1 - 4x^2)^2 on [-1/2, 1/2]."""
    return KernelSpec("biweight", _biweight, _biweight_derivative, 0.5)


@lru_cache(maxsize=None)
def triweight_kernel() -> KernelSpec:
    """K(x) = (35/32)(1 - x^2)^3 on [-1, 1]."""
    return KernelSpec("triweight", _triweight, _triweight_derivative, 1.0)


KERNELS: Dict[str, Callable[[], KernelSpec]] = {
    "biweight": biweight_kernel,
    "triweight": triweight_kernel,
}


def get_kernel(name: str) -> KernelSpec:
    """
    Look up a kernel by registry name.

    Raises:
        ValidationError: If the name is unknown
    """
    try:
        return KERNELS[name]()
    except KeyError:
        raise ValidationError(f"unknown kernel '{name}' (choose from {', '.join(sorted(KERNELS))})") from None
