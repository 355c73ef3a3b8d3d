"""
Monte Carlo acceptance checks.

These run the seeded study machinery at desk scale and compare with the
exact finite-n and asymptotic references. Each takes seconds to minutes;
all are marked `slow`.
"""

import numpy as np
import pytest
from scipy import integrate

from bandsel.config import default_config
from bandsel.criteria import BandwidthGrid, neighborhood_grid, optimal_bandwidth
from bandsel.kernels import get_kernel
from bandsel.montecarlo import StudyConfig, run_quadform_study, run_study
from bandsel.noise import ArchParams, sample_acf, simulate_arch
from bandsel.trend import benchmark_trend, uniform_weight

pytestmark = pytest.mark.slow

SIGMA = 0.32


def explicit_study(alpha, grid, replicates, n=512):
    return StudyConfig(n=n, alphas=(alpha,), sigma=SIGMA, replicates=replicates, base_seed=20240607,
                       grid=grid, store_curves=False, threads=-1)


def auto_study(n, alpha, replicates, seed=12345):
    settings = default_config()["study"]
    settings.update({"n": n, "alphas": [alpha], "replicates": replicates, "seed": seed, "threads": -1})
    return StudyConfig.from_mapping(settings)


def test_mean_ase_matches_exact_mase():
    cell = run_study(explicit_study(0.01, BandwidthGrid((0.12,)), 2000)).cells[0]
    error = abs(cell.empirical_mase[0] - cell.mase_exact[0])
    assert error < 4.0 * cell.empirical_mase_se[0]


def test_empirical_mase_tracks_exact_mase_over_the_grid():
    cell = run_study(auto_study(512, 0.01, 2000)).cells[0]
    assert len(cell.mase_exact) == 200
    error = np.abs(cell.empirical_mase - cell.mase_exact)
    assert np.all(error < 4.0 * cell.empirical_mase_se)


@pytest.mark.parametrize("alpha", [0.01, 0.162, 0.577])
def test_centred_cl_is_unbiased_for_mase(alpha):
    kernel = get_kernel("biweight")
    opt = optimal_bandwidth(benchmark_trend(), uniform_weight(), kernel.moments, SIGMA ** 2, 0.0, 512)
    grid = neighborhood_grid(opt.c, 512, a=0.3, b=1.8, size=10)
    cell = run_study(explicit_study(alpha, grid, 2000)).cells[0]
    error = np.abs(cell.cl_centered_mean - cell.mase_exact)
    assert np.all(error < 4.0 * cell.cl_centered_se)


def test_selected_bandwidths_are_consistent():
    cell = run_study(auto_study(4096, 0.162, 500)).cells[0]
    assert 0.95 <= cell.ratio_cl_ase_mean <= 1.05
    assert 0.9 <= cell.ratio_ase_mase_mean <= 1.1


@pytest.mark.parametrize("n, replicates, bound, seeds", [
    (4096, 1000, 0.08, (1, 2, 12345)),
    (32768, 300, 0.10, (12345,)),
])
def test_standardized_gaps_are_normal(n, replicates, bound, seeds):
    # Single-seed KS values at n=4096 spread from about 0.06 to 0.09, so the
    # median over seeds is compared with the bound
    cells = [run_study(auto_study(n, 0.577, replicates, seed=seed)).cells[0] for seed in seeds]
    assert np.median([cell.ks for cell in cells]) < bound
    # Finite-n gaps are wider than the limit law, but not grossly so
    sd_ratio = np.median([cell.gap_sd / cell.gap_sd_theory for cell in cells])
    assert 0.9 < sd_ratio < 1.35


def test_arch_simulator_moments():
    eps = simulate_arch(ArchParams(0.577, SIGMA ** 2), 1_000_000, 777).values
    assert np.var(eps) == pytest.approx(SIGMA ** 2, rel=0.01)
    assert abs(sample_acf(eps, 1)[0]) < 0.005

    squares = simulate_arch(ArchParams(0.3, SIGMA ** 2), 1_000_000, 778).values ** 2
    assert sample_acf(squares, 1)[0] == pytest.approx(0.30, abs=0.02)


@pytest.mark.parametrize("alpha, seed", [(0.0, 779), (0.162, 780), (0.577, 777)])
def test_arch_noise_is_uncorrelated(alpha, seed):
    n = 1_000_000
    eps = simulate_arch(ArchParams(alpha, SIGMA ** 2), n, seed).values
    assert np.all(np.abs(sample_acf(eps, 5)) < 4.0 / np.sqrt(n))


def test_bandwidth_constant_from_independent_quadrature():
    kernel = get_kernel("biweight")
    t = benchmark_trend()

    def biweight(x):
        return 1.875 * (1.0 - 4.0 * x * x) ** 2

    curvature, _ = integrate.quad(lambda x: float(t.r2(np.array([x]))[0]) ** 2, 0.0, 1.0)
    second_moment, _ = integrate.quad(lambda x: x * x * biweight(x), -0.5, 0.5)
    k_sq, _ = integrate.quad(lambda x: biweight(x) ** 2, -0.5, 0.5)
    c = (k_sq * SIGMA ** 2 / (curvature * second_moment ** 2)) ** 0.2

    opt = optimal_bandwidth(t, uniform_weight(), kernel.moments, SIGMA ** 2, 0.0, 32768)
    assert opt.c == pytest.approx(c, abs=1e-6)
    assert opt.h_star == pytest.approx(0.108, abs=1e-3)


def test_quadform_variance_matches_expansion():
    result = run_quadform_study(benchmark_trend(), uniform_weight(), get_kernel("biweight"), SIGMA ** 2,
                                0.01, 4096, 5000, 99, threads=-1)
    assert result.relative_error < 0.05
