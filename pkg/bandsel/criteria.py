"""
Bandwidth criteria and grid-search selection.

Four data criteria are computed on a bandwidth grid: the average squared
error T_n(h), its exact finite-n expectation (MASE), Mallows' CL(h) with the
known noise variance, and C_p with an estimated one. The asymptotic
surrogate D_n(h) and its minimiser h_n* = c n^(-1/5) live here as well.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateSetupError, ValidationError
from .kernels import KernelMoments, KernelSpec
from .smoother import SmootherBank, SmootherPlan, hat_row_sq_norms, smooth, trace_UL, trace_ULLt
from .trend import Design, TrendSpec, WeightSpec, curvature_integral, make_design, weight_integral

logger = logging.getLogger(__name__)

FIXED_DOMAIN = (0.019, 1.30)
# Upper end used when the fixed domain is truncated to h < 1/2
FIXED_GRID_CLAMP = 0.49
AUTO_GRID_BOUNDS = (0.019, 0.45)
DEFAULT_GRID_SIZE = 200


class CriterionKind(str, enum.Enum):
    ASE = "ASE"
    MASE_EXACT = "MASE_exact"
    CL = "CL"
    CP = "CP"
    DN = "D_n"


@dataclass(frozen=True)
class BandwidthGrid:
    """
    Candidate bandwidths.

    Attributes:
        values: Strictly increasing bandwidths in (0, 1/2)
        origin: "fixed", "hn_neighborhood" or "explicit"
        a: Lower multiplier of c n^(-1/5) for neighbourhood grids
        b: Upper multiplier of c n^(-1/5) for neighbourhood grids
    """

    values: Tuple[float, ...]
    origin: str = "explicit"
    a: Optional[float] = None
    b: Optional[float] = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ValidationError("bandwidth grid is empty")
        arr = np.asarray(values)
        if np.any(np.diff(arr) <= 0):
            raise ValidationError("bandwidth grid must be strictly increasing")
        if arr[0] <= 0.0 or arr[-1] >= 0.5:
            raise ValidationError("bandwidths must lie in (0, 1/2)")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CriterionCurve:
    """Criterion values over a bandwidth grid."""

    grid: BandwidthGrid
    values: np.ndarray = field(repr=False)
    kind: CriterionKind

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.grid):
            raise ValidationError(f"curve has {len(values)} values for {len(self.grid)} bandwidths")
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"{self.kind.value} curve contains non-finite values")


@dataclass(frozen=True)
class SelectionResult:
    """Grid minimiser of a criterion curve; ties go to the smallest h."""

    h_star: float
    index: int
    curve: CriterionCurve
    tie_policy: str = "smallest-h"

    def to_record(self) -> dict:
        return {"criterion": self.curve.kind.value, "h_star": self.h_star, "index": self.index}


@dataclass(frozen=True)
class OptimalBandwidth:
    """h_n* = c n^(-1/5)."""

    c: float
    h_star: float


# -- grids -------------------------------------------------------------------

def fixed_grid(size: int = DEFAULT_GRID_SIZE) -> BandwidthGrid:
    """
    Geometric grid on the fixed domain [0.019, 1.30], truncated below 1/2.
    """
    lo, hi = FIXED_DOMAIN
    if hi >= 0.5:
        logger.warning("grid domain [%g, %g] exceeds h < 1/2; upper end clamped to %g", lo, hi, FIXED_GRID_CLAMP)
        hi = FIXED_GRID_CLAMP
    return BandwidthGrid(tuple(np.geomspace(lo, hi, size)), origin="fixed")


def neighborhood_grid(c: float, n: int, a: float = 0.25, b: float = 4.0,
                      size: int = DEFAULT_GRID_SIZE) -> BandwidthGrid:
    """
    Geometric grid around h_n* = c n^(-1/5).

    Args:
        c: Bandwidth constant
        n: Sample size
        a: Lower multiplier
        b: Upper multiplier
        size: Number of bandwidths

    Returns:
        Grid on [max(0.019, a c n^-1/5), min(0.45, b c n^-1/5)]
    """
    if size < 1:
        raise ValidationError(f"grid size must be positive, got {size}")
    centre = c * n ** (-0.2)
    lo = max(AUTO_GRID_BOUNDS[0], a * centre)
    hi = min(AUTO_GRID_BOUNDS[1], b * centre)
    if lo >= hi:
        raise ValidationError(f"empty bandwidth neighbourhood [{lo:g}, {hi:g}]")
    values = np.geomspace(lo, hi, size) if size > 1 else np.array([lo])
    return BandwidthGrid(tuple(values), origin="hn_neighborhood", a=a, b=b)


def make_grid(kind: str, n: int, trend: TrendSpec, weight: WeightSpec, kernel: KernelSpec,
              sigma2: float, size: int = DEFAULT_GRID_SIZE) -> BandwidthGrid:
    """
    Build the "fixed" or "auto" grid for a configuration.

    "auto" centres the grid on h_n*; when h_n* is undefined (flat trend)
    it falls back to the fixed domain.
    """
    if kind == "fixed":
        return fixed_grid(size)
    if kind != "auto":
        raise ValidationError(f"unknown grid kind '{kind}' (choose from auto, fixed)")
    try:
        opt = optimal_bandwidth(trend, weight, kernel.moments, sigma2, 0.0, n)
    except DegenerateSetupError:
        logger.warning("h_n* undefined for trend %s, using the fixed grid domain", trend.name)
        return fixed_grid(size)
    return neighborhood_grid(opt.c, n, size=size)


# -- data criteria -------------------------------------------------------------

def _design_and_weights(plan: SmootherPlan, w: WeightSpec) -> Tuple[Design, np.ndarray]:
    design = make_design(plan.n)
    return design, w.values(design)


def _as_vector(plan: SmootherPlan, v: Sequence[float], what: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) != plan.n:
        raise ValidationError(f"{what} must have length {plan.n}, got shape {v.shape}")
    return v


def ase(y: Sequence[float], r_true: Sequence[float], plan: SmootherPlan, w: WeightSpec) -> float:
    """
    T_n(h) = (1/n) sum_i u(x_i) (r_hat(x_i) - r(x_i))^2.

    Args:
        y: Data vector
        r_true: True trend at the design points
        plan: Smoother plan
        w: Weight function

    Returns:
        Average squared error
    """
    y = _as_vector(plan, y, "data")
    r_true = _as_vector(plan, r_true, "trend values")
    _, u = _design_and_weights(plan, w)
    return float(np.mean(u * (smooth(plan, y) - r_true) ** 2))


def mase_exact(t: TrendSpec, plan: SmootherPlan, w: WeightSpec, sigma2: float) -> float:
    """
    Exact E T_n(h) under MDS noise: weighted squared bias plus (sigma2/n) tr(U L L^t).

    Args:
        t: Trend
        plan: Smoother plan
        w: Weight function
        sigma2: Noise variance (>= 0)

    Returns:
        Mean average squared error at this bandwidth
    """
    if sigma2 < 0:
        raise ValidationError(f"noise variance must be nonnegative, got {sigma2}")
    design, u = _design_and_weights(plan, w)
    r = t.values(design)
    bias = smooth(plan, r) - r
    return float(np.mean(u * bias ** 2) + sigma2 / plan.n * trace_ULLt(plan, w))


def mallows_cl(y: Sequence[float], plan: SmootherPlan, w: WeightSpec, sigma2: float) -> float:
    """CL(h) = n^-1 ||U^1/2 (I - L) Y||^2 + 2 sigma2 n^-1 tr(UL)."""
    y = _as_vector(plan, y, "data")
    _, u = _design_and_weights(plan, w)
    residual = y - smooth(plan, y)
    return float(np.mean(u * residual ** 2) + 2.0 * sigma2 * trace_UL(plan, w) / plan.n)


def cp(y: Sequence[float], plan: SmootherPlan, w: WeightSpec) -> float:
    """
    C_p = sigma_hat^2 (1 + 2 nu / n), sigma_hat^2 the weighted residual mean square.

    Raises:
        DegenerateSetupError: If the weights sum to zero
    """
    y = _as_vector(plan, y, "data")
    _, u = _design_and_weights(plan, w)
    total = float(u.sum())
    if total == 0.0:
        raise DegenerateSetupError("C_p needs a weight function with positive total mass")
    residual = y - smooth(plan, y)
    sigma_hat2 = float(np.dot(u, residual ** 2)) / total
    nu = plan.n * trace_UL(plan, w) / total
    if nu / plan.n >= 0.5:
        logger.warning("C_p at h=%g has nu/n = %.3f >= 1/2", plan.h, nu / plan.n)
    return sigma_hat2 * (1.0 + 2.0 * nu / plan.n)


def delta2(y: Sequence[float], r_true: Sequence[float], plan: SmootherPlan, w: WeightSpec,
           sigma2: float) -> float:
    """delta_2(h) = 2 n^-1 (Y - r)' U (r - r_hat) + 2 sigma2 n^-1 tr(UL)."""
    y = _as_vector(plan, y, "data")
    r_true = _as_vector(plan, r_true, "trend values")
    _, u = _design_and_weights(plan, w)
    r_hat = smooth(plan, y)
    cross = 2.0 * np.dot(u * (y - r_true), r_true - r_hat) / plan.n
    return float(cross + 2.0 * sigma2 * trace_UL(plan, w) / plan.n)


def cl_centered(y: Sequence[float], eps: Sequence[float], plan: SmootherPlan, w: WeightSpec,
                sigma2: float) -> float:
    """CL(h) - n^-1 ||U^1/2 eps||^2."""
    eps = _as_vector(plan, eps, "noise")
    _, u = _design_and_weights(plan, w)
    return mallows_cl(y, plan, w, sigma2) - float(np.mean(u * eps ** 2))


# Vectorised forms over a SmootherBank (rows = bandwidths)

def ase_values(fits: np.ndarray, r_true: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.mean(u[None, :] * (fits - r_true[None, :]) ** 2, axis=1)


def cl_values(fits: np.ndarray, y: np.ndarray, u: np.ndarray, sigma2: float,
              trace_ul: np.ndarray) -> np.ndarray:
    n = len(y)
    return np.mean(u[None, :] * (y[None, :] - fits) ** 2, axis=1) + 2.0 * sigma2 * trace_ul / n


def cp_values(fits: np.ndarray, y: np.ndarray, u: np.ndarray, trace_ul: np.ndarray) -> np.ndarray:
    total = float(u.sum())
    if total == 0.0:
        raise DegenerateSetupError("C_p needs a weight function with positive total mass")
    sigma_hat2 = (u[None, :] * (y[None, :] - fits) ** 2).sum(axis=1) / total
    # nu/n per bandwidth
    ratio = np.asarray(trace_ul, dtype=float) / total
    flagged = ratio >= 0.5
    if flagged.any():
        logger.warning("C_p has nu/n >= 1/2 at %d of %d bandwidths (largest %.3f)",
                       int(flagged.sum()), ratio.size, float(ratio.max()))
    return sigma_hat2 * (1.0 + 2.0 * ratio)


def bank_traces(bank: SmootherBank, w: WeightSpec) -> Tuple[np.ndarray, np.ndarray]:
    """tr(UL) and tr(U L L^t) for every bandwidth of the bank."""
    u = w.values(make_design(bank.n))
    trace_ul = np.array([u.sum() * p.profile[0] for p in bank.plans])
    trace_ullt = np.array([np.dot(u, hat_row_sq_norms(p)) for p in bank.plans])
    return trace_ul, trace_ullt


def mase_values(bank: SmootherBank, t: TrendSpec, w: WeightSpec, sigma2: float) -> np.ndarray:
    design = make_design(bank.n)
    u = w.values(design)
    r = t.values(design)
    _, trace_ullt = bank_traces(bank, w)
    bias2 = ase_values(bank.apply(r), r, u)
    return bias2 + sigma2 / bank.n * trace_ullt


# -- asymptotic surrogate ------------------------------------------------------

def bandwidth_constant(A: float, B: float, noise_level: float) -> float:
    """c = (B * noise_level / A)^(1/5), noise_level = sigma2 + 2 sum Cov."""
    if A <= 0:
        raise DegenerateSetupError("h_n* is undefined: the weighted curvature integral is zero")
    if B <= 0 or noise_level <= 0:
        raise DegenerateSetupError("h_n* is undefined: variance constant is not positive")
    return (B * noise_level / A) ** 0.2


def dn_from_constants(h: np.ndarray, A: float, B: float, noise_level: float, n: int) -> np.ndarray:
    """D_n(h) = (h^4/4) A + B noise_level / (n h)."""
    h = np.asarray(h, dtype=float)
    return h ** 4 / 4.0 * A + B * noise_level / (n * h)


def dn_second_from_constants(h: float, A: float, B: float, sigma2: float, n: int) -> float:
    """D_n''(h) = 3 h^2 A + 2 sigma2 B / (n h^3)."""
    return 3.0 * h * h * A + 2.0 * sigma2 * B / (n * h ** 3)


def surrogate_constants(t: TrendSpec, w: WeightSpec, k: KernelMoments) -> Tuple[float, float]:
    """A = int u r''^2 (int t^2 K)^2 and B = int u int K^2."""
    A = curvature_integral(t, w) * k.second_moment ** 2
    B = weight_integral(w) * k.k_sq
    return A, B


def dn_curve(t: TrendSpec, w: WeightSpec, k: KernelMoments, sigma2: float, cov_sum: float,
             n: int, grid: BandwidthGrid) -> CriterionCurve:
    """
    Evaluate D_n(h) on the grid.

    Args:
        t: Trend
        w: Weight function
        k: Kernel moments
        sigma2: Noise variance
        cov_sum: sum_{k>=1} Cov(eps_0, eps_k); zero for MDS noise
        n: Sample size
        grid: Bandwidth grid

    Returns:
        CriterionCurve of kind D_n
    """
    A, B = surrogate_constants(t, w, k)
    values = dn_from_constants(grid.array, A, B, sigma2 + 2.0 * cov_sum, n)
    return CriterionCurve(grid, values, CriterionKind.DN)


def optimal_bandwidth(t: TrendSpec, w: WeightSpec, k: KernelMoments, sigma2: float,
                      cov_sum: float, n: int) -> OptimalBandwidth:
    """
    Closed-form minimiser of D_n.

    Raises:
        DegenerateSetupError: If int u r''^2 = 0
    """
    A, B = surrogate_constants(t, w, k)
    c = bandwidth_constant(A, B, sigma2 + 2.0 * cov_sum)
    return OptimalBandwidth(c=c, h_star=c * n ** (-0.2))


def dn_second_derivative(t: TrendSpec, w: WeightSpec, k: KernelMoments, sigma2: float,
                         n: int, h: float) -> float:
    """Closed-form D_n''(h)."""
    if not h > 0:
        raise ValidationError(f"bandwidth must be positive, got {h}")
    A, B = surrogate_constants(t, w, k)
    return dn_second_from_constants(h, A, B, sigma2, n)


# -- curves and selection ---------------------------------------------------------

def criterion_curve(kind: CriterionKind, grid: BandwidthGrid, bank: SmootherBank, w: WeightSpec,
                    y: Optional[Sequence[float]] = None, r_true: Optional[Sequence[float]] = None,
                    trend: Optional[TrendSpec] = None, sigma2: Optional[float] = None,
                    moments: Optional[KernelMoments] = None) -> CriterionCurve:
    """
    Evaluate one criterion over a grid.

    ASE needs y and r_true; CL needs y and sigma2; C_p needs y; exact MASE
    needs trend and sigma2; D_n needs trend, sigma2 and kernel moments.
    """
    kind = CriterionKind(kind)
    if len(grid) != len(bank):
        raise ValidationError("grid and smoother bank differ in length")
    u = w.values(make_design(bank.n))

    def need(value, name):
        if value is None:
            raise ValidationError(f"criterion {kind.value} needs {name}")
        return value

    if kind is CriterionKind.DN:
        values = dn_curve(need(trend, "a trend"), w, need(moments, "kernel moments"),
                          need(sigma2, "sigma2"), 0.0, bank.n, grid).values
    elif kind is CriterionKind.MASE_EXACT:
        values = mase_values(bank, need(trend, "a trend"), w, need(sigma2, "sigma2"))
    else:
        y = np.asarray(need(y, "data"), dtype=float)
        fits = bank.apply(y)
        if kind is CriterionKind.ASE:
            values = ase_values(fits, np.asarray(need(r_true, "true trend values"), dtype=float), u)
        else:
            trace_ul, _ = bank_traces(bank, w)
            if kind is CriterionKind.CL:
                values = cl_values(fits, y, u, need(sigma2, "sigma2"), trace_ul)
            else:
                values = cp_values(fits, y, u, trace_ul)
    return CriterionCurve(grid, values, kind)


def select(curve: CriterionCurve) -> SelectionResult:
    """
    Grid minimiser of a curve; the smallest bandwidth wins ties.

    Raises:
        ValidationError: If the curve is empty
    """
    if len(curve.values) == 0:
        raise ValidationError("cannot select from an empty grid")
    index = int(np.argmin(curve.values))
    return SelectionResult(h_star=curve.grid.values[index], index=index, curve=curve)
