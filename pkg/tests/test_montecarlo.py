"""
Tests for the seeded Monte Carlo study and the quadratic-form check.
"""

import filecmp
import os

import numpy as np
import pytest
from scipy import stats

from bandsel.config import default_config
from bandsel.criteria import ase
from bandsel.errors import ReplicateError, ValidationError
from bandsel.kernels import get_kernel
from bandsel.montecarlo import (
    StudyConfig,
    boxplot_indices,
    boxplot_stats,
    empirical_mase,
    ks_statistic,
    quadform_sum,
    quadform_weights,
    run_cell,
    run_quadform_study,
    run_replicate,
    run_study,
    study_context,
    write_study_outputs,
)
from bandsel.noise import ArchParams, replicate_seed, simulate_arch
from bandsel.smoother import make_plan
from bandsel.trend import benchmark_trend, bump_weight, make_design, uniform_weight
from bandsel.utils import read_table


def study_config(**changes):
    settings = default_config()["study"]
    settings.update({"alphas": [0.01, 0.577], "replicates": 6, "grid_size": 40})
    settings.update(changes)
    return StudyConfig.from_mapping(settings)


def test_config_from_defaults():
    cfg = study_config()
    assert cfg.n == 512
    assert cfg.sigma2 == pytest.approx(0.1024)
    assert len(cfg.grid) == 40
    assert cfg.grid_kind == "auto"
    assert cfg.alpha_index(0.577) == 1
    with pytest.raises(ValidationError):
        cfg.alpha_index(0.3)


@pytest.mark.parametrize("changes", [
    {"alphas": [1.0]},
    {"alphas": []},
    {"alphas": [0.1, 0.1]},
    {"replicates": 0},
    {"sigma": 0.0},
    {"threads": 0},
    {"periodic": False},
    {"kernel": "gaussian"},
    {"n": "many"},
])
def test_config_validation(changes):
    with pytest.raises(ValidationError):
        study_config(**changes)


def test_config_missing_key():
    settings = default_config()["study"]
    del settings["seed"]
    with pytest.raises(ValidationError, match="seed"):
        StudyConfig.from_mapping(settings)


def test_non_periodic_study_with_bump_weight():
    cfg = study_config(periodic=False, weight="bump", alphas=[0.162], replicates=2, grid_size=10)
    record = run_replicate(cfg, 0.162, 0)
    assert record.h_ase in cfg.grid.values


def test_replicate_is_deterministic():
    cfg = study_config()
    first = run_replicate(cfg, 0.577, 3)
    second = run_replicate(cfg, 0.577, 3)
    assert first == second
    np.testing.assert_array_equal(first.ase_curve, second.ase_curve)
    assert first.seed == replicate_seed(cfg.base_seed, 1, 3)


def test_replicate_record_fields():
    cfg = study_config()
    record = run_replicate(cfg, 0.01, 0)
    assert record.h_ase in cfg.grid.values
    assert record.h_cl in cfg.grid.values
    assert record.gap == record.h_cl - record.h_ase
    assert record.ase_min <= record.ase_at_cl
    assert record.ase_min == pytest.approx(record.ase_curve.min())
    assert record.h_cl == cfg.grid.values[int(np.argmin(record.cl_curve))]
    stripped = record.without_curves()
    assert stripped.ase_curve is None and stripped.cl_curve is None and stripped.cl_centered_curve is None


def test_replicate_matches_direct_computation():
    """The selected h_ASE is the grid minimiser of the pointwise ASE."""
    cfg = study_config(alphas=[0.577], replicates=1)
    record = run_replicate(cfg, 0.577, 0)
    design = make_design(cfg.n)
    r = benchmark_trend().values(design)
    eps = simulate_arch(ArchParams(0.577, cfg.sigma2), cfg.n, record.seed).values
    kernel = get_kernel("biweight")
    values = [ase(r + eps, r, make_plan(cfg.n, h, kernel), uniform_weight()) for h in cfg.grid.values]
    assert record.h_ase == cfg.grid.values[int(np.argmin(values))]
    np.testing.assert_allclose(record.ase_curve, values, rtol=1e-10)


def test_tiny_noise_selects_the_bias_minimiser():
    cfg = study_config(sigma=1e-6, grid="fixed", alphas=[0.01], replicates=1)
    record = run_replicate(cfg, 0.01, 0)
    ctx = study_context(cfg)
    assert record.h_ase == cfg.grid.values[int(np.argmin(ctx.mase))]


def test_cell_is_sorted_and_thread_invariant():
    cfg = study_config(replicates=30)
    serial = run_cell(cfg, 0.577)
    assert [r.index for r in serial] == list(range(30))
    parallel = run_cell(StudyConfig(**{**cfg.__dict__, "threads": 2}), 0.577)
    assert [r.to_row() for r in serial] == [r.to_row() for r in parallel]


def test_single_replicate_study():
    cfg = study_config(alphas=[0.162], replicates=1, store_curves=True)
    summary = run_study(cfg)
    cell = summary.cells[0]
    record = cell.records[0]
    assert cell.gap_mean == record.gap
    assert cell.gap_sd == 0.0
    np.testing.assert_array_equal(cell.empirical_mase, record.ase_curve)
    np.testing.assert_array_equal(cell.empirical_mase_se, np.zeros(len(cfg.grid)))
    assert cell.ks is not None
    assert cell.moment_order == 16


def test_curves_are_dropped_unless_stored():
    cfg = study_config(alphas=[0.01], replicates=3)
    cell = run_study(cfg).cells[0]
    assert all(r.ase_curve is None for r in cell.records)
    assert cell.empirical_mase.shape == (len(cfg.grid),)
    with pytest.raises(ValidationError):
        empirical_mase(cell.records)


def test_progress_callback():
    seen = []
    run_study(study_config(replicates=2), progress=lambda cell: seen.append(cell.alpha))
    assert seen == [0.01, 0.577]


def test_study_outputs_are_byte_identical(tmp_path):
    cfg = study_config(replicates=5, store_curves=True)
    first = write_study_outputs(run_study(cfg), str(tmp_path / "a"))
    study_context.cache_clear()
    second = write_study_outputs(run_study(cfg), str(tmp_path / "b"))

    names = sorted(os.path.basename(p) for p in first)
    assert names == sorted(os.path.basename(p) for p in second)
    assert "summary.json" in names
    assert "gaps_0.577.csv" in names
    assert "curves_0.01.csv" in names
    match, mismatch, errors = filecmp.cmpfiles(str(tmp_path / "a"), str(tmp_path / "b"), names, shallow=False)
    assert mismatch == [] and errors == []


def test_gap_table_round_trips(tmp_path):
    cfg = study_config(alphas=[0.577], replicates=4)
    summary = run_study(cfg)
    write_study_outputs(summary, str(tmp_path))
    table = read_table(str(tmp_path / "gaps_0.577.csv"))
    np.testing.assert_array_equal(table["gap"].to_numpy(), [r.gap for r in summary.cells[0].records])
    emase = read_table(str(tmp_path / "emase_0.577.csv"))
    assert list(emase.columns) == ["h", "empirical_mase", "empirical_mase_se", "mase_exact", "dn",
                                   "cl_centered_mean", "cl_centered_se"]
    np.testing.assert_array_equal(emase["h"].to_numpy(), cfg.grid.array)


def test_curve_table_holds_raw_and_centred_cl(tmp_path):
    cfg = study_config(alphas=[0.577], replicates=3, store_curves=True)
    summary = run_study(cfg)
    write_study_outputs(summary, str(tmp_path))
    table = read_table(str(tmp_path / "curves_0.577.csv"))
    assert list(table.columns) == ["index", "h", "ase", "cl", "cl_centered"]
    assert len(table) == 3 * len(cfg.grid)

    for record in summary.cells[0].records:
        rows = table[table["index"] == record.index]
        np.testing.assert_array_equal(rows["cl"].to_numpy(), record.cl_curve)
        assert rows["h"].to_numpy()[int(np.argmin(rows["cl"].to_numpy()))] == record.h_cl
        # The centring term is n^-1 ||U^1/2 eps||^2, the same at every bandwidth
        eps = simulate_arch(ArchParams(0.577, cfg.sigma2), cfg.n, record.seed).values
        shift = rows["cl"].to_numpy() - rows["cl_centered"].to_numpy()
        np.testing.assert_allclose(shift, np.mean(eps ** 2), rtol=1e-10)


def test_json_tables(tmp_path):
    cfg = study_config(alphas=[0.01], replicates=2)
    written = write_study_outputs(run_study(cfg), str(tmp_path), fmt="json")
    assert all(p.endswith(".json") for p in written)


def test_replicate_failure_names_the_replicate(monkeypatch):
    cfg = study_config(alphas=[0.01], replicates=3)

    def broken(*args, **kwargs):
        raise FloatingPointError("overflow")

    monkeypatch.setattr("bandsel.montecarlo.run_replicate", broken)
    with pytest.raises(ReplicateError, match="index=0"):
        run_cell(cfg, 0.01)


def test_ks_statistic_examples():
    assert ks_statistic([0.5], stats.uniform.cdf) == pytest.approx(0.5)
    quantiles = (np.arange(1, 101) - 0.5) / 100
    assert ks_statistic(quantiles, stats.uniform.cdf) == pytest.approx(0.005)
    with pytest.raises(ValidationError):
        ks_statistic([], stats.norm.cdf)


def test_boxplot_positions_and_stats():
    np.testing.assert_array_equal(boxplot_indices(200, 5), [0, 50, 100, 149, 199])
    np.testing.assert_array_equal(boxplot_indices(3, 21), [0, 1, 2])
    box = boxplot_stats(np.array([1.0, 2.0, 3.0, 4.0, 100.0]))
    assert box["median"] == 3.0
    assert box["outliers"] == 1
    assert box["upper_whisker"] == 4.0


def brute_force_quadform(eps, a, b_profile, u, periodic):
    n = len(eps)
    total = float(np.dot(a, eps))
    for i in range(n):
        for j in range(i):
            d = i - j
            if periodic:
                d = min(d, n - d)
            if d < len(b_profile):
                total += (u[i] + u[j]) * b_profile[d] * eps[i] * eps[j]
    return total


@pytest.mark.parametrize("weight, periodic", [(uniform_weight(), True), (bump_weight(), True), (bump_weight(), False)])
def test_quadform_sum_matches_double_loop(weight, periodic):
    kernel = get_kernel("biweight")
    w = quadform_weights(benchmark_trend(), weight, kernel, 16, 0.4, periodic)
    eps = np.random.default_rng(5).standard_normal(16)
    expected = brute_force_quadform(eps, w.a, w.b_profile, w.u, periodic)
    assert quadform_sum(eps, w.a, w.b_profile, w.u, periodic) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_quadform_study_is_reproducible():
    args = (benchmark_trend(), uniform_weight(), get_kernel("biweight"), 0.1024, 0.01, 256, 20, 7)
    first = run_quadform_study(*args)
    second = run_quadform_study(*args)
    assert first == second
    assert first.variance > 0
    assert first.to_record()["relative_error"] == first.relative_error


def test_quadform_study_validation():
    args = (benchmark_trend(), uniform_weight(), get_kernel("biweight"), 0.1024)
    with pytest.raises(ValidationError):
        run_quadform_study(*args, 0.01, 256, 1, 7)
    with pytest.raises(ValidationError):
        run_quadform_study(*args, 1.2, 256, 20, 7)
