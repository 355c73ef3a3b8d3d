"""
Martingale-difference noise: i.i.d. Gaussian and stationary ARCH(1).

ARCH(1) follows eps_t = eta_t * sqrt(sigma2 (1 - alpha) + alpha eps_{t-1}^2)
with eta_t i.i.d. N(0, 1), so that the stationary variance is sigma2.
Random numbers come from a counter-based Philox generator; normals are
obtained by the inverse normal CDF, which consumes exactly one uniform
per draw on every platform.
"""

import abc
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
from scipy import special

from .errors import MomentNotFiniteError, ValidationError

logger = logging.getLogger(__name__)

BURN_IN = 1024
MAX_MOMENT_R = 32

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replicate_seed(base_seed: int, *indices: int) -> int:
    """
    Derive a 64-bit stream seed from a base seed and replicate coordinates.

    The rule is a splitmix64 fold: state = mix(base); state = mix(state ^ index)
    for every index in order. It is part of the output format: changing it
    changes every simulated number.

    Args:
        base_seed: User seed
        *indices: Stream coordinates, e.g. (alpha_index, replicate_index)

    Returns:
        Seed in [0, 2^64)
    """
    state = _splitmix64(int(base_seed) & _MASK64)
    for index in indices:
        state = _splitmix64(state ^ (int(index) & _MASK64))
    return state


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & _MASK64))


def standard_normals(seed: int, size: int) -> np.ndarray:
    """Draw `size` N(0, 1) values by inverse-CDF transform of Philox uniforms."""
    uniforms = make_generator(seed).random(size)
    uniforms[uniforms == 0.0] = 2.0 ** -54
    return special.ndtri(uniforms)


@dataclass(frozen=True)
class ArchParams:
    """
    ARCH(1) parameters.

    Attributes:
        alpha: Persistence, in [0, 1)
        sigma2: Stationary variance E eps^2
    """

    alpha: float
    sigma2: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError(f"ARCH alpha must lie in [0, 1), got {self.alpha}")
        if not self.sigma2 > 0.0:
            raise ValidationError(f"noise variance must be positive, got {self.sigma2}")

    @property
    def omega(self) -> float:
        return self.sigma2 * (1.0 - self.alpha)


@dataclass(frozen=True)
class NoisePath:
    """A simulated noise sequence eps_1..eps_n."""

    values: np.ndarray = field(repr=False)
    seed: int
    params: ArchParams

    def __len__(self) -> int:
        return len(self.values)

    def to_columns(self) -> Dict[str, np.ndarray]:
        return {"index": np.arange(1, len(self.values) + 1), "value": self.values}


def moment_threshold(r: int) -> float:
    """
    Supremum of alpha for which E eps^{2r} is finite.

    The 2r-th moment exists iff alpha^r * prod_{i=1..r}(2i - 1) < 1.

    Args:
        r: Half the moment order, 1..32

    Returns:
        (prod_{i=1..r}(2i - 1))^(-1/r)
    """
    if int(r) != r or not 1 <= r <= MAX_MOMENT_R:
        raise ValidationError(f"moment index r must be an integer in 1..{MAX_MOMENT_R}, got {r}")
    r = int(r)
    odd_product = float(special.factorial2(2 * r - 1, exact=True))
    return odd_product ** (-1.0 / r)


def moment_exists(alpha: float, r: int) -> bool:
    """True when E eps^{2r} is finite for ARCH(1) with persistence alpha."""
    r = int(r)
    return alpha ** r * float(special.factorial2(2 * r - 1, exact=True)) < 1.0


def max_finite_moment_order(alpha: float) -> int:
    """Largest even moment order 2r (r <= 32) that exists; 0 if none does."""
    order = 0
    for r in range(1, MAX_MOMENT_R + 1):
        if not moment_exists(alpha, r):
            break
        order = 2 * r
    return order


def arch_fourth_moment(p: ArchParams) -> float:
    """
    E eps^4 = 3 sigma^4 (1 - alpha^2) / (1 - 3 alpha^2).

    Raises:
        MomentNotFiniteError: If 3 alpha^2 >= 1
    """
    if 3.0 * p.alpha ** 2 >= 1.0:
        raise MomentNotFiniteError(f"fourth moment does not exist for alpha={p.alpha:g} (needs 3 alpha^2 < 1)")
    return 3.0 * p.sigma2 ** 2 * (1.0 - p.alpha ** 2) / (1.0 - 3.0 * p.alpha ** 2)


def simulate_arch(p: ArchParams, n: int, seed: int, burn_in: int = BURN_IN) -> NoisePath:
    """
    Simulate n values of a stationary ARCH(1) sequence.

    The recursion starts from eps_0 = sigma * eta_0 and discards `burn_in`
    steps before recording.

    Args:
        p: ARCH parameters
        n: Path length
        seed: Stream seed
        burn_in: Discarded warm-up steps

    Returns:
        NoisePath
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"path length must be a positive integer, got {n}")
    n = int(n)
    eta: List[float] = standard_normals(seed, n + burn_in + 1).tolist()
    omega, alpha = p.omega, p.alpha
    sqrt = math.sqrt

    prev = sqrt(p.sigma2) * eta[0]
    for t in range(1, burn_in + 1):
        prev = eta[t] * sqrt(omega + alpha * prev * prev)
    values = [0.0] * n
    for t in range(n):
        prev = eta[burn_in + 1 + t] * sqrt(omega + alpha * prev * prev)
        values[t] = prev
    return NoisePath(values=np.array(values), seed=int(seed), params=p)


def sample_acf(x: np.ndarray, lags: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..lags."""
    x = np.asarray(x, dtype=float)
    centered = x - x.mean()
    denom = float(np.dot(centered, centered))
    return np.array([np.dot(centered[k:], centered[:-k]) / denom for k in range(1, lags + 1)])


def squared_acf(alpha: float, lags: int) -> np.ndarray:
    """Theoretical autocorrelations alpha^k of eps^2 (finite fourth moment)."""
    return alpha ** np.arange(1, lags + 1, dtype=float)


class NoiseSource(abc.ABC):
    """Producer of stationary MDS noise paths."""

    @property
    @abc.abstractmethod
    def variance(self) -> float:
        """Marginal variance sigma^2."""

    @abc.abstractmethod
    def sample(self, n: int, seed: int) -> NoisePath:
        """Return a reproducible path of length n."""


class GaussianNoise(NoiseSource):
    """i.i.d. N(0, sigma2) noise."""

    def __init__(self, sigma2: float):
        self.params = ArchParams(0.0, sigma2)

    @property
    def variance(self) -> float:
        return self.params.sigma2

    def sample(self, n: int, seed: int) -> NoisePath:
        if int(n) != n or n < 1:
            raise ValidationError(f"path length must be a positive integer, got {n}")
        values = math.sqrt(self.params.sigma2) * standard_normals(seed, int(n))
        return NoisePath(values=values, seed=int(seed), params=self.params)


class ArchNoise(NoiseSource):
    """Stationary ARCH(1) noise."""

    def __init__(self, params: ArchParams, burn_in: int = BURN_IN):
        self.params = params
        self.burn_in = burn_in

    @property
    def variance(self) -> float:
        return self.params.sigma2

    def sample(self, n: int, seed: int) -> NoisePath:
        return simulate_arch(self.params, n, seed, burn_in=self.burn_in)


def make_noise(alpha: float, sigma2: float, iid: bool = False) -> NoiseSource:
    """Build the noise source for a study cell."""
    if iid:
        return GaussianNoise(sigma2)
    return ArchNoise(ArchParams(alpha, sigma2))
