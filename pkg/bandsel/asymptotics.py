"""
Closed-form asymptotics of the selected bandwidths.

The gap h_M - h_n between the CL and ASE minimisers, scaled by n^(3/10),
is asymptotically N(0, Sigma^2). Sigma^2 follows from the CLT for the
quadratic form sum_i Y_{i,n}(h_n) with variance V. All integrals come from
the kernels and trend modules; nothing here integrates numerically.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy import stats

from .criteria import dn_second_from_constants, optimal_bandwidth
from .errors import DegenerateSetupError, ValidationError
from .kernels import KernelSpec
from .trend import TrendSpec, WeightSpec, curvature_integral, weight_integral

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-10


@dataclass(frozen=True)
class AsymptoticInputs:
    """
    Every constant entering Sigma^2 and V.

    sigma2 is the noise variance; the Sigma^2 formula raises it to 3/5.
    kg_sq is int (K - G)^2 over the whole line and kg_sq_half over the
    positive half line. u_int, u_curv and k_sq are the parts of A and B;
    when given, A and B are checked against them.
    """

    sigma2: float
    A: float
    B: float
    second_moment: float
    kg_sq: float
    u_sq_int: float
    u_sq_curv: float
    c: float
    kg_sq_half: Optional[float] = None
    u_int: Optional[float] = None
    u_curv: Optional[float] = None
    k_sq: Optional[float] = None

    def __post_init__(self):
        if self.kg_sq_half is None:
            object.__setattr__(self, "kg_sq_half", self.kg_sq / 2.0)
        if self.u_curv is not None:
            _check_part("A", self.A, self.u_curv * self.second_moment ** 2)
        if self.u_int is not None and self.k_sq is not None:
            _check_part("B", self.B, self.u_int * self.k_sq)

    @classmethod
    def from_setup(cls, trend: TrendSpec, weight: WeightSpec, kernel: KernelSpec,
                   sigma2: float) -> "AsymptoticInputs":
        """
        Gather the integrals for a (trend, weight, kernel, sigma2) setup.

        Raises:
            DegenerateSetupError: If the trend has no curvature under the weight
        """
        if not sigma2 > 0:
            raise ValidationError(f"noise variance must be positive, got {sigma2}")
        moments = kernel.moments
        u_int = weight_integral(weight)
        u_curv = curvature_integral(trend, weight)
        opt = optimal_bandwidth(trend, weight, moments, sigma2, 0.0, 1)
        inputs = cls(
            sigma2=sigma2,
            A=u_curv * moments.second_moment ** 2,
            B=u_int * moments.k_sq,
            second_moment=moments.second_moment,
            kg_sq=moments.kg_sq,
            kg_sq_half=moments.kg_sq_half,
            u_sq_int=weight_integral(weight, squared=True),
            u_sq_curv=curvature_integral(trend, weight, squared_weight=True),
            c=opt.c,
            u_int=u_int,
            u_curv=u_curv,
            k_sq=moments.k_sq,
        )
        logger.debug("Asymptotic inputs for %s/%s/%s: %s", trend.name, weight.name, kernel.name, inputs)
        return inputs


def _check_part(name: str, stored: float, recomputed: float) -> None:
    if abs(stored - recomputed) > CONSISTENCY_TOL * max(1.0, abs(recomputed)):
        raise ValidationError(f"{name}={stored!r} disagrees with its parts ({recomputed!r})")


def gap_variance_sigma2(inputs: AsymptoticInputs) -> float:
    """
    Limit variance Sigma^2 of n^(3/10) (h_n - h_M).

    Args:
        inputs: Asymptotic constants

    Returns:
        Sigma^2

    Raises:
        DegenerateSetupError: If A or B is not positive
    """
    A, B = inputs.A, inputs.B
    if A <= 0 or B <= 0:
        raise DegenerateSetupError(f"Sigma^2 needs A > 0 and B > 0 (A={A:g}, B={B:g})")
    s = inputs.sigma2 ** 0.6
    bias_part = 4.0 * s / (25.0 * A ** 1.6 * B ** 0.4) * inputs.second_moment ** 2 * inputs.u_sq_curv
    noise_part = 8.0 * s / (25.0 * A ** 0.6 * B ** 1.4) * inputs.u_sq_int * inputs.kg_sq
    return bias_part + noise_part


def gap_standardizer(inputs: AsymptoticInputs, n: int) -> float:
    """Standard deviation of h_M - h_n at sample size n: Sigma n^(-3/10)."""
    if n < 1:
        raise ValidationError(f"sample size must be positive, got {n}")
    return math.sqrt(gap_variance_sigma2(inputs)) * n ** (-0.3)


def clt_variance_V(inputs: AsymptoticInputs) -> float:
    """
    Limit variance of n^(7/10) sum_i Y_{i,n}(c n^(-1/5)).

    V = c^2 C_K^2 sigma2 int u^2 r''^2 + (4 / c^3) sigma2^2 int u^2 int_0 (K - G)^2
    """
    c = inputs.c
    if not c > 0:
        raise ValidationError(f"bandwidth constant must be positive, got {c}")
    first = c * c * inputs.second_moment ** 2 * inputs.sigma2 * inputs.u_sq_curv
    second = 4.0 / c ** 3 * inputs.sigma2 ** 2 * inputs.u_sq_int * inputs.kg_sq_half
    return first + second


def quadform_variance_expansion(inputs: AsymptoticInputs, n: int, h: float) -> float:
    """
    Two leading terms of Var(sum_i Y_{i,n}(h)) at finite n.

    Args:
        inputs: Asymptotic constants
        n: Sample size
        h: Bandwidth

    Returns:
        (h^2 sigma2 / n) C_K^2 int u^2 r''^2 + (4 sigma2^2 / (n^2 h^3)) int u^2 int_0 (K - G)^2
    """
    if n < 1:
        raise ValidationError(f"sample size must be positive, got {n}")
    if not h > 0:
        raise ValidationError(f"bandwidth must be positive, got {h}")
    first = h * h * inputs.sigma2 / n * inputs.second_moment ** 2 * inputs.u_sq_curv
    second = 4.0 * inputs.sigma2 ** 2 / (n * n * h ** 3) * inputs.u_sq_int * inputs.kg_sq_half
    return first + second


def gap_sigma_from_V(inputs: AsymptoticInputs) -> float:
    """Sigma obtained from V and the curvature of D_n at its minimum: 2 sqrt(V) / (5 A c^2)."""
    if inputs.A <= 0 or not inputs.c > 0:
        raise DegenerateSetupError("gap scale needs A > 0 and c > 0")
    return 2.0 * math.sqrt(clt_variance_V(inputs)) / (5.0 * inputs.A * inputs.c ** 2)


def gap_density(x, inputs: AsymptoticInputs, n: int) -> np.ndarray:
    """N(0, Sigma^2 n^(-3/5)) density of the gap, evaluated at x."""
    return stats.norm.pdf(np.asarray(x, dtype=float), loc=0.0, scale=gap_standardizer(inputs, n))


def theory_report(inputs: AsymptoticInputs, n: int) -> Dict[str, float]:
    """
    Closed-form summary for sample size n.

    Args:
        inputs: Asymptotic constants
        n: Sample size

    Returns:
        Dictionary with A, B, c, h_star, Sigma2, gap_sd, V and related values
    """
    h_star = inputs.c * n ** (-0.2)
    sigma2_gap = gap_variance_sigma2(inputs)
    return {
        "n": int(n),
        "sigma2": inputs.sigma2,
        "A": inputs.A,
        "B": inputs.B,
        "c": inputs.c,
        "h_star": h_star,
        "Sigma2": sigma2_gap,
        "gap_sd": math.sqrt(sigma2_gap) * n ** (-0.3),
        "V": clt_variance_V(inputs),
        "Sigma_from_V": gap_sigma_from_V(inputs),
        "dn_second_at_h_star": dn_second_from_constants(h_star, inputs.A, inputs.B, inputs.sigma2, n),
        "quadform_variance": quadform_variance_expansion(inputs, n, h_star),
    }
