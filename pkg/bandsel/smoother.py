"""
Priestley-Chao smoothing on the equispaced design.

r_hat(x_i) = sum_j (1/(nh)) K((x_i - x_j)/h) Y_j, with circular design
distances in periodic mode. Weights are never renormalised.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence

import numpy as np

from .errors import ValidationError
from .kernels import KernelSpec
from .trend import WeightSpec, make_design

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmootherPlan:
    """
    Everything needed to smooth a length-n vector with bandwidth h.

    Attributes:
        n: Sample size
        h: Bandwidth, in (0, 1/2)
        kernel: Kernel
        periodic: Circular design distance when True
        profile: Weights w_k = K(k/(nh))/(nh) for k = 0..m
    """

    n: int
    h: float
    kernel: KernelSpec
    periodic: bool
    profile: np.ndarray = field(compare=False, repr=False)

    @property
    def reach(self) -> int:
        """Largest index offset with a (possibly) nonzero weight."""
        return len(self.profile) - 1

    @cached_property
    def circular_weights(self) -> np.ndarray:
        return circular_layout(self.profile, self.n)

    @cached_property
    def spectrum(self) -> np.ndarray:
        return np.fft.rfft(self.circular_weights)


def circular_layout(profile: np.ndarray, n: int) -> np.ndarray:
    """Length-n vector with profile[0] at index 0 and symmetric wrap."""
    w = np.zeros(n)
    m = len(profile) - 1
    w[: m + 1] = profile
    if m > 0:
        w[n - m:] = profile[1:][::-1]
    return w


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def make_plan(n: int, h: float, kernel: KernelSpec, periodic: bool = True) -> SmootherPlan:
    """
    Validate (n, h) and tabulate the smoothing weights.

    Args:
        n: Sample size (>= 4)
        h: Bandwidth in (0, 1/2)
        kernel: Kernel
        periodic: Use circular distances

    Returns:
        SmootherPlan

    Raises:
        ValidationError: On bad n or h, or when the kernel support would wrap
    """
    if int(n) != n or n < 4:
        raise ValidationError(f"sample size must be an integer >= 4, got {n}")
    n = int(n)
    if not 0.0 < h < 0.5:
        raise ValidationError(f"bandwidth must lie in (0, 1/2), got {h}")
    nh = n * h
    m = min(int(np.floor(nh * kernel.half_width)), n - 1)
    if periodic and 2 * m >= n:
        raise ValidationError(
            f"kernel support wraps around the circle (h * half_width = {h * kernel.half_width:g} >= 1/2)"
        )
    offsets = np.arange(m + 1, dtype=float)
    profile = kernel.evaluate(offsets / nh) / nh
    return SmootherPlan(n=n, h=float(h), kernel=kernel, periodic=bool(periodic), profile=profile)


def _check_length(plan: SmootherPlan, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) != plan.n:
        raise ValidationError(f"expected a vector of length {plan.n}, got shape {y.shape}")
    return y


def banded_apply(profile: np.ndarray, y: np.ndarray, periodic: bool) -> np.ndarray:
    out = profile[0] * y
    for k in range(1, len(profile)):
        wk = profile[k]
        if wk == 0.0:
            continue
        if periodic:
            out = out + wk * (np.roll(y, k) + np.roll(y, -k))
        else:
            out[k:] += wk * y[:-k]
            out[:-k] += wk * y[k:]
    return out


def smooth_direct(plan: SmootherPlan, y: Sequence[float]) -> np.ndarray:
    """
    Smooth by explicit weighted sums over the kernel band.

    Non-periodic smoothing truncates at the boundaries.

    Args:
        plan: Smoother plan
        y: Data vector of length n

    Returns:
        r_hat at the design points
    """
    y = _check_length(plan, y)
    return banded_apply(plan.profile, y, plan.periodic)


def smooth_fft(plan: SmootherPlan, y: Sequence[float]) -> np.ndarray:
    """
    Smooth by circular convolution in the frequency domain.

    Args:
        plan: Periodic smoother plan
        y: Data vector of length n

    Returns:
        r_hat at the design points

    Raises:
        ValidationError: If the plan is not periodic
    """
    if not plan.periodic:
        raise ValidationError("FFT smoothing requires a periodic plan")
    y = _check_length(plan, y)
    return np.fft.irfft(np.fft.rfft(y) * plan.spectrum, plan.n)


def smooth(plan: SmootherPlan, y: Sequence[float]) -> np.ndarray:
    """FFT smoothing for periodic plans, direct smoothing otherwise."""
    if plan.periodic:
        return smooth_fft(plan, y)
    return smooth_direct(plan, y)


def hat_matrix(plan: SmootherPlan) -> np.ndarray:
    """Dense smoothing matrix L, with r_hat = L Y."""
    idx = np.arange(plan.n)
    dist = np.abs(idx[:, None] - idx[None, :])
    if plan.periodic:
        dist = np.minimum(dist, plan.n - dist)
    inside = dist <= plan.reach
    return np.where(inside, plan.profile[np.minimum(dist, plan.reach)], 0.0)


def hat_row_sq_norms(plan: SmootherPlan) -> np.ndarray:
    """(L L^t)_ii for every design point."""
    squared = plan.profile ** 2
    if plan.periodic:
        return np.full(plan.n, squared[0] + 2.0 * squared[1:].sum())
    return banded_apply(squared, np.ones(plan.n), periodic=False)


def trace_UL(plan: SmootherPlan, w: WeightSpec) -> float:
    """tr(UL) = sum_i u(x_i) K(0)/(nh)."""
    u = w.values(make_design(plan.n))
    return float(u.sum() * plan.profile[0])


def trace_ULLt(plan: SmootherPlan, w: WeightSpec) -> float:
    """tr(U L L^t) = sum_i u(x_i) (L L^t)_ii."""
    u = w.values(make_design(plan.n))
    return float(np.dot(u, hat_row_sq_norms(plan)))


class SmootherBank:
    """
    Smoothers for a whole bandwidth grid sharing n, kernel and mode.

    Periodic banks with n a power of two smooth every bandwidth with one
    forward FFT and one batched inverse FFT; other banks smooth directly.
    """

    def __init__(self, plans: List[SmootherPlan]):
        if not plans:
            raise ValidationError("a smoother bank needs at least one bandwidth")
        first = plans[0]
        for plan in plans[1:]:
            if (plan.n, plan.periodic, plan.kernel) != (first.n, first.periodic, first.kernel):
                raise ValidationError("all plans in a bank must share n, kernel and mode")
        self.plans = plans
        self.n = first.n
        self.periodic = first.periodic
        self.use_fft = first.periodic and is_power_of_two(first.n)
        if first.periodic and not self.use_fft:
            logger.debug("n=%d is not a power of two, smoothing directly", first.n)
        self._spectra = np.stack([p.spectrum for p in plans]) if self.use_fft else None

    @classmethod
    def for_grid(cls, n: int, grid: Sequence[float], kernel: KernelSpec, periodic: bool = True) -> "SmootherBank":
        return cls([make_plan(n, h, kernel, periodic) for h in grid])

    @property
    def bandwidths(self) -> np.ndarray:
        return np.array([p.h for p in self.plans])

    def __len__(self) -> int:
        return len(self.plans)

    def apply(self, y: Sequence[float]) -> np.ndarray:
        """Return the (len(grid), n) matrix of fits."""
        y = _check_length(self.plans[0], y)
        if self.use_fft:
            return np.fft.irfft(self._spectra * np.fft.rfft(y)[None, :], self.n, axis=1)
        return np.stack([smooth_direct(p, y) for p in self.plans])
