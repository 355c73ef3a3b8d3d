"""
Seeded Monte Carlo study of the CL-selected bandwidth.

Each replicate draws a noise path, forms Y = r(x) + eps and records the
ASE and CL minimisers over the bandwidth grid. Replicates are independent
given (base_seed, alpha index, replicate index), so they can run on any
number of workers; aggregation always follows replicate index order.
"""

import logging
import math
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from .asymptotics import (
    AsymptoticInputs,
    gap_density,
    gap_standardizer,
    quadform_variance_expansion,
    theory_report,
)
from .criteria import (
    BandwidthGrid,
    OptimalBandwidth,
    ase_values,
    bank_traces,
    cl_values,
    dn_curve,
    make_grid,
    mase_values,
    optimal_bandwidth,
)
from .errors import DegenerateSetupError, ReplicateError, ValidationError
from .kernels import KernelSpec, get_kernel
from .noise import ArchParams, make_noise, max_finite_moment_order, replicate_seed
from .smoother import SmootherBank, banded_apply, circular_layout, make_plan
from .trend import Design, TrendSpec, WeightSpec, get_trend, get_weight, make_design
from .utils import alpha_tag, write_json, write_table

logger = logging.getLogger(__name__)

# Replicates handed to one worker call
CHUNK_SIZE = 25
# Stream coordinate that keeps quadratic-form seeds apart from study seeds
QUADFORM_STREAM = 1 << 32


@dataclass(frozen=True)
class StudyConfig:
    """
    A fully resolved simulation setup.

    Attributes:
        n: Sample size
        alphas: ARCH persistence values, one study cell each
        sigma: Noise standard deviation
        replicates: Replicates per cell
        base_seed: Seed all replicate streams derive from
        grid: Bandwidth grid shared by every cell
        kernel, trend, weight: Registry names
        periodic: Circular smoothing
        grid_kind: How the grid was built ("auto", "fixed" or "explicit")
        store_curves: Keep per-replicate ASE and centred CL curves
        threads: joblib worker count
        boxplot_points: Number of grid bandwidths carrying boxplots
        iid: Use i.i.d. Gaussian noise instead of ARCH(1)
    """

    n: int
    alphas: Tuple[float, ...]
    sigma: float
    replicates: int
    base_seed: int
    grid: BandwidthGrid
    kernel: str = "biweight"
    trend: str = "benchmark"
    weight: str = "uniform"
    periodic: bool = True
    grid_kind: str = "explicit"
    store_curves: bool = False
    threads: int = 1
    boxplot_points: int = 21
    iid: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if int(self.n) != self.n or self.n < 4:
            raise ValidationError(f"n must be an integer >= 4, got {self.n}")
        if not self.alphas:
            raise ValidationError("at least one alpha is required")
        if len(set(self.alphas)) != len(self.alphas):
            raise ValidationError("alphas must be distinct")
        for alpha in self.alphas:
            if not 0.0 <= alpha < 1.0:
                raise ValidationError(f"alpha must lie in [0, 1), got {alpha}")
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if self.replicates < 1:
            raise ValidationError(f"replicates must be >= 1, got {self.replicates}")
        if self.threads == 0 or self.threads < -1:
            raise ValidationError(f"threads must be >= 1 (or -1 for all cores), got {self.threads}")
        if self.boxplot_points < 1:
            raise ValidationError(f"boxplot_points must be >= 1, got {self.boxplot_points}")
        if not self.periodic and get_weight(self.weight).is_uniform:
            raise ValidationError("non-periodic smoothing needs a weight vanishing near the boundary (u == 1 refused)")
        get_kernel(self.kernel)
        get_trend(self.trend)

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def kernel_spec(self) -> KernelSpec:
        return get_kernel(self.kernel)

    @property
    def trend_spec(self) -> TrendSpec:
        return get_trend(self.trend)

    @property
    def weight_spec(self) -> WeightSpec:
        return get_weight(self.weight)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "StudyConfig":
        """
        Build a config from the resolved `study` section.

        Args:
            mapping: Dictionary with the keys of the `study` config section

        Returns:
            Validated StudyConfig with its grid built
        """
        try:
            n = int(mapping["n"])
            sigma = float(mapping["sigma"])
            kernel = str(mapping.get("kernel", "biweight"))
            trend = str(mapping.get("trend", "benchmark"))
            weight = str(mapping.get("weight", "uniform"))
            grid_kind = str(mapping.get("grid", "auto"))
            grid_size = int(mapping.get("grid_size", 200))
            alphas = tuple(float(a) for a in mapping["alphas"])
            replicates = int(mapping["replicates"])
            seed = int(mapping["seed"])
        except KeyError as e:
            raise ValidationError(f"study configuration is missing '{e.args[0]}'") from None
        except (TypeError, ValueError) as e:
            raise ValidationError(f"invalid study configuration: {e}") from None
        grid = make_grid(grid_kind, n, get_trend(trend), get_weight(weight), get_kernel(kernel),
                         sigma * sigma, size=grid_size)
        return cls(
            n=n,
            alphas=alphas,
            sigma=sigma,
            replicates=replicates,
            base_seed=seed,
            grid=grid,
            kernel=kernel,
            trend=trend,
            weight=weight,
            periodic=bool(mapping.get("periodic", True)),
            grid_kind=grid_kind,
            store_curves=bool(mapping.get("store_curves", False)),
            threads=int(mapping.get("threads", 1)),
            boxplot_points=int(mapping.get("boxplot_points", 21)),
            iid=bool(mapping.get("iid", False)),
        )

    def to_mapping(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "alphas": list(self.alphas),
            "sigma": self.sigma,
            "replicates": self.replicates,
            "seed": self.base_seed,
            "grid": self.grid_kind,
            "grid_size": len(self.grid),
            "grid_min": self.grid.values[0],
            "grid_max": self.grid.values[-1],
            "kernel": self.kernel,
            "trend": self.trend,
            "weight": self.weight,
            "periodic": self.periodic,
            "store_curves": self.store_curves,
            "threads": self.threads,
            "boxplot_points": self.boxplot_points,
            "iid": self.iid,
        }

    def alpha_index(self, alpha: float) -> int:
        try:
            return self.alphas.index(float(alpha))
        except ValueError:
            raise ValidationError(f"alpha {alpha} is not part of this study") from None


class StudyContext:
    """Quantities shared by every replicate of a study: design, fits bank, traces and exact curves."""

    def __init__(self, cfg: StudyConfig):
        self.design: Design = make_design(cfg.n)
        self.r = cfg.trend_spec.values(self.design)
        self.u = cfg.weight_spec.values(self.design)
        self.bank = SmootherBank.for_grid(cfg.n, cfg.grid.values, cfg.kernel_spec, cfg.periodic)
        self.trace_ul, self.trace_ullt = bank_traces(self.bank, cfg.weight_spec)
        self.mase = mase_values(self.bank, cfg.trend_spec, cfg.weight_spec, cfg.sigma2)
        self.dn = dn_curve(cfg.trend_spec, cfg.weight_spec, cfg.kernel_spec.moments, cfg.sigma2, 0.0,
                           cfg.n, cfg.grid).values
        self.h_mase = cfg.grid.values[int(np.argmin(self.mase))]
        try:
            self.optimum: Optional[OptimalBandwidth] = optimal_bandwidth(
                cfg.trend_spec, cfg.weight_spec, cfg.kernel_spec.moments, cfg.sigma2, 0.0, cfg.n)
            self.inputs: Optional[AsymptoticInputs] = AsymptoticInputs.from_setup(
                cfg.trend_spec, cfg.weight_spec, cfg.kernel_spec, cfg.sigma2)
        except DegenerateSetupError as e:
            logger.warning("No asymptotic reference for this setup: %s", e)
            self.optimum = None
            self.inputs = None


@lru_cache(maxsize=4)
def study_context(cfg: StudyConfig) -> StudyContext:
    return StudyContext(cfg)


@dataclass(frozen=True)
class ReplicateRecord:
    """
    Outcome of one replicate.

    h_ase is the ASE minimiser and h_cl the CL minimiser; gap = h_cl - h_ase.
    """

    alpha: float
    index: int
    seed: int
    h_ase: float
    h_cl: float
    gap: float
    ase_min: float
    ase_at_cl: float
    ase_curve: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    cl_curve: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    cl_centered_curve: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def without_curves(self) -> "ReplicateRecord":
        return replace(self, ase_curve=None, cl_curve=None, cl_centered_curve=None)

    def to_row(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "seed": self.seed,
            "h_ase": self.h_ase,
            "h_cl": self.h_cl,
            "gap": self.gap,
            "ase_min": self.ase_min,
            "ase_at_cl": self.ase_at_cl,
        }


def run_replicate(cfg: StudyConfig, alpha: float, index: int) -> ReplicateRecord:
    """
    Simulate one data set and select both bandwidths.

    Args:
        cfg: Study configuration
        alpha: ARCH persistence (one of cfg.alphas)
        index: Replicate index

    Returns:
        ReplicateRecord with the ASE, raw CL and centred CL curves attached
    """
    ctx = study_context(cfg)
    seed = replicate_seed(cfg.base_seed, cfg.alpha_index(alpha), index)
    eps = make_noise(alpha, cfg.sigma2, iid=cfg.iid).sample(cfg.n, seed).values
    y = ctx.r + eps

    fits = ctx.bank.apply(y)
    ase_curve = ase_values(fits, ctx.r, ctx.u)
    cl_curve = cl_values(fits, y, ctx.u, cfg.sigma2, ctx.trace_ul)
    i_ase = int(np.argmin(ase_curve))
    i_cl = int(np.argmin(cl_curve))
    h_ase = cfg.grid.values[i_ase]
    h_cl = cfg.grid.values[i_cl]
    return ReplicateRecord(
        alpha=float(alpha),
        index=int(index),
        seed=seed,
        h_ase=h_ase,
        h_cl=h_cl,
        gap=h_cl - h_ase,
        ase_min=float(ase_curve[i_ase]),
        ase_at_cl=float(ase_curve[i_cl]),
        ase_curve=ase_curve,
        cl_curve=cl_curve,
        cl_centered_curve=cl_curve - float(np.mean(ctx.u * eps * eps)),
    )


def _run_chunk(cfg: StudyConfig, alpha: float, indices: Sequence[int]) -> List[ReplicateRecord]:
    records = []
    for index in indices:
        try:
            records.append(run_replicate(cfg, alpha, index))
        except ReplicateError:
            raise
        except Exception as e:
            raise ReplicateError(alpha, index, e) from e
    return records


def _chunks(count: int, size: int = CHUNK_SIZE) -> List[range]:
    return [range(start, min(start + size, count)) for start in range(0, count, size)]


def run_cell(cfg: StudyConfig, alpha: float) -> List[ReplicateRecord]:
    """All replicates of one alpha, sorted by replicate index."""
    cfg.alpha_index(alpha)
    batches = Parallel(n_jobs=cfg.threads)(
        delayed(_run_chunk)(cfg, alpha, chunk) for chunk in _chunks(cfg.replicates)
    )
    records = [record for batch in batches for record in batch]
    return sorted(records, key=lambda record: record.index)


def ks_statistic(sample: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    One-sample Kolmogorov-Smirnov distance sup |F_m - F|.

    Args:
        sample: Observations
        cdf: Reference CDF

    Returns:
        The two-sided KS statistic

    Raises:
        ValidationError: If the sample is empty
    """
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ValidationError("KS statistic needs a nonempty sample")
    return float(stats.kstest(sample, cdf).statistic)


def empirical_mase(records: Sequence[ReplicateRecord]) -> np.ndarray:
    """
    Pointwise mean of the replicate ASE curves.

    Raises:
        ValidationError: If there are no records or a record has no stored curve
    """
    return _curve_stack(records, "ase_curve").mean(axis=0)


def _curve_stack(records: Sequence[ReplicateRecord], attribute: str) -> np.ndarray:
    if not records:
        raise ValidationError("no replicate records")
    curves = [getattr(record, attribute) for record in records]
    if any(curve is None for curve in curves):
        raise ValidationError(f"replicate records carry no {attribute}; rerun with curves stored")
    return np.stack(curves)


def _standard_error(stack: np.ndarray) -> np.ndarray:
    if stack.shape[0] < 2:
        return np.zeros(stack.shape[1])
    return stack.std(axis=0, ddof=1) / math.sqrt(stack.shape[0])


def boxplot_indices(grid_size: int, points: int) -> np.ndarray:
    """Evenly spaced grid indices, including both ends."""
    return np.unique(np.round(np.linspace(0, grid_size - 1, min(points, grid_size))).astype(int))


def boxplot_stats(values: np.ndarray) -> Dict[str, float]:
    """Quartiles, Tukey whiskers at 1.5 IQR, mean and outlier count."""
    q1, median, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    inside = values[(values >= q1 - 1.5 * iqr) & (values <= q3 + 1.5 * iqr)]
    return {
        "q1": float(q1),
        "median": float(median),
        "q3": float(q3),
        "lower_whisker": float(inside.min()),
        "upper_whisker": float(inside.max()),
        "mean": float(values.mean()),
        "outliers": int(values.size - inside.size),
    }


def gap_histogram(gaps: np.ndarray, inputs: Optional[AsymptoticInputs], n: int) -> Dict[str, np.ndarray]:
    """Density-normalised histogram of the gaps with the predicted normal density at bin centres."""
    bins = max(1, int(math.ceil(math.sqrt(gaps.size))))
    density, edges = np.histogram(gaps, bins=bins, density=True)
    centres = 0.5 * (edges[:-1] + edges[1:])
    if inputs is not None:
        predicted = gap_density(centres, inputs, n)
    else:
        predicted = np.full(centres.shape, np.nan)
    return {"left": edges[:-1], "right": edges[1:], "centre": centres, "density": density,
            "predicted": predicted}


@dataclass
class AlphaSummary:
    """Aggregates of one study cell."""

    alpha: float
    moment_order: int
    records: List[ReplicateRecord]
    grid: BandwidthGrid
    h_mase: float
    h_star: Optional[float]
    ratio_cl_ase_mean: float
    ratio_cl_ase_median: float
    ratio_ase_mase_mean: float
    ratio_cl_mase_mean: float
    efficiency_mean: float
    gap_mean: float
    gap_sd: float
    gap_sd_theory: Optional[float]
    ks: Optional[float]
    empirical_mase: np.ndarray = field(repr=False)
    empirical_mase_se: np.ndarray = field(repr=False)
    mase_exact: np.ndarray = field(repr=False)
    dn: np.ndarray = field(repr=False)
    cl_centered_mean: np.ndarray = field(repr=False)
    cl_centered_se: np.ndarray = field(repr=False)
    boxplots: List[Dict[str, float]] = field(repr=False)
    histogram: Dict[str, np.ndarray] = field(repr=False)

    def to_record(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "moment_order": self.moment_order,
            "replicates": len(self.records),
            "h_mase": self.h_mase,
            "h_star": self.h_star,
            "h_star_over_h_mase": None if self.h_star is None else self.h_star / self.h_mase,
            "mean_h_cl_over_h_ase": self.ratio_cl_ase_mean,
            "median_h_cl_over_h_ase": self.ratio_cl_ase_median,
            "mean_h_ase_over_h_mase": self.ratio_ase_mase_mean,
            "mean_h_cl_over_h_mase": self.ratio_cl_mase_mean,
            "mean_ase_ratio": self.efficiency_mean,
            "gap_mean": self.gap_mean,
            "gap_sd": self.gap_sd,
            "gap_sd_theory": self.gap_sd_theory,
            "ks": self.ks,
        }


@dataclass
class StudySummary:
    """Summary of a whole study: one AlphaSummary per alpha, in config order."""

    config: StudyConfig
    cells: List[AlphaSummary]
    theory: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_mapping(),
            "theory": self.theory,
            "cells": [cell.to_record() for cell in self.cells],
        }


def summarize_cell(cfg: StudyConfig, alpha: float, records: List[ReplicateRecord]) -> AlphaSummary:
    """
    Aggregate the records of one alpha.

    Args:
        cfg: Study configuration
        alpha: Cell's alpha
        records: Replicate records with curves, sorted by index

    Returns:
        AlphaSummary
    """
    ctx = study_context(cfg)
    h_ase = np.array([r.h_ase for r in records])
    h_cl = np.array([r.h_cl for r in records])
    gaps = np.array([r.gap for r in records])
    efficiency = np.array([r.ase_at_cl / r.ase_min if r.ase_min > 0 else 1.0 for r in records])

    ase_stack = _curve_stack(records, "ase_curve")
    cl_stack = _curve_stack(records, "cl_centered_curve")
    positions = boxplot_indices(len(cfg.grid), cfg.boxplot_points)
    boxplots = [dict(h=cfg.grid.values[i], **boxplot_stats(cl_stack[:, i])) for i in positions]

    gap_sd_theory = None
    ks = None
    if ctx.inputs is not None:
        gap_sd_theory = gap_standardizer(ctx.inputs, cfg.n)
        ks = ks_statistic((h_ase - h_cl) / gap_sd_theory, stats.norm.cdf)

    return AlphaSummary(
        alpha=alpha,
        moment_order=max_finite_moment_order(alpha),
        records=records if cfg.store_curves else [r.without_curves() for r in records],
        grid=cfg.grid,
        h_mase=ctx.h_mase,
        h_star=None if ctx.optimum is None else ctx.optimum.h_star,
        ratio_cl_ase_mean=float(np.mean(h_cl / h_ase)),
        ratio_cl_ase_median=float(np.median(h_cl / h_ase)),
        ratio_ase_mase_mean=float(np.mean(h_ase) / ctx.h_mase),
        ratio_cl_mase_mean=float(np.mean(h_cl) / ctx.h_mase),
        efficiency_mean=float(np.mean(efficiency)),
        gap_mean=float(np.mean(gaps)),
        gap_sd=float(np.std(gaps, ddof=1)) if gaps.size > 1 else 0.0,
        gap_sd_theory=gap_sd_theory,
        ks=ks,
        empirical_mase=ase_stack.mean(axis=0),
        empirical_mase_se=_standard_error(ase_stack),
        mase_exact=ctx.mase,
        dn=ctx.dn,
        cl_centered_mean=cl_stack.mean(axis=0),
        cl_centered_se=_standard_error(cl_stack),
        boxplots=boxplots,
        histogram=gap_histogram(gaps, ctx.inputs, cfg.n),
    )


def run_study(cfg: StudyConfig, progress: Optional[Callable[[AlphaSummary], None]] = None) -> StudySummary:
    """
    Run every cell of the study.

    Args:
        cfg: Study configuration
        progress: Called with each finished cell

    Returns:
        StudySummary

    Raises:
        ReplicateError: Naming the first failing (alpha, index)
    """
    ctx = study_context(cfg)
    theory = None
    if ctx.inputs is not None:
        theory = theory_report(ctx.inputs, cfg.n)

    cells = []
    for alpha in cfg.alphas:
        logger.info("Running %d replicates for alpha=%g", cfg.replicates, alpha)
        cell = summarize_cell(cfg, alpha, run_cell(cfg, alpha))
        cells.append(cell)
        if progress is not None:
            progress(cell)
    return StudySummary(config=cfg, cells=cells, theory=theory)


def write_study_outputs(summary: StudySummary, outdir: str, fmt: str = "csv") -> List[str]:
    """
    Write summary.json and the per-alpha tables.

    Args:
        summary: Study summary
        outdir: Output directory (created if missing)
        fmt: Table format, "csv" or "json"

    Returns:
        Paths written
    """
    os.makedirs(outdir, exist_ok=True)
    ext = "csv" if fmt == "csv" else "json"
    written = []

    path = os.path.join(outdir, "summary.json")
    write_json(path, summary.to_dict())
    written.append(path)

    grid = np.asarray(summary.config.grid.values)
    for cell in summary.cells:
        tag = alpha_tag(cell.alpha)
        rows = [r.to_row() for r in cell.records]
        tables = {
            f"gaps_{tag}": {key: [row[key] for row in rows] for key in rows[0]},
            f"emase_{tag}": {
                "h": grid,
                "empirical_mase": cell.empirical_mase,
                "empirical_mase_se": cell.empirical_mase_se,
                "mase_exact": cell.mase_exact,
                "dn": cell.dn,
                "cl_centered_mean": cell.cl_centered_mean,
                "cl_centered_se": cell.cl_centered_se,
            },
            f"boxplot_{tag}": {key: [b[key] for b in cell.boxplots] for key in cell.boxplots[0]},
            f"hist_{tag}": cell.histogram,
        }
        if summary.config.store_curves:
            tables[f"curves_{tag}"] = {
                "index": np.repeat([r.index for r in cell.records], len(grid)),
                "h": np.tile(grid, len(cell.records)),
                "ase": np.concatenate([r.ase_curve for r in cell.records]),
                "cl": np.concatenate([r.cl_curve for r in cell.records]),
                "cl_centered": np.concatenate([r.cl_centered_curve for r in cell.records]),
            }
        for name, columns in tables.items():
            path = os.path.join(outdir, f"{name}.{ext}")
            write_table(path, columns, fmt)
            written.append(path)
    return written


# -- quadratic form check ---------------------------------------------------------

@dataclass(frozen=True)
class QuadformWeights:
    """Coefficients of sum_i Y_{i,n}: a_i, the (K - G) profile b(k) and u at the design points."""

    a: np.ndarray = field(repr=False)
    b_profile: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    periodic: bool = True


def quadform_weights(trend: TrendSpec, weight: WeightSpec, kernel: KernelSpec, n: int, h: float,
                     periodic: bool = True) -> QuadformWeights:
    """
    Tabulate a_i = C_K (h/n) r''(x_i) u(x_i) and b(k) = (K - G)(k/(nh)) / (n h)^2.
    """
    plan = make_plan(n, h, kernel, periodic)
    design = make_design(n)
    u = weight.values(design)
    a = kernel.moments.second_moment * h / n * trend.r2(design.points) * u
    nh = n * h
    offsets = np.arange(plan.reach + 1, dtype=float)
    b_profile = kernel.k_minus_g(offsets / nh) / (nh * nh)
    return QuadformWeights(a=a, b_profile=b_profile, u=u, periodic=periodic)


def quadform_sum(eps: np.ndarray, weights_a: np.ndarray, b_profile: np.ndarray, u: np.ndarray,
                 periodic: bool = True) -> float:
    """
    sum_i Y_{i,n} = sum_i a_i eps_i + sum_{j<i} (u_i + u_j) b(|i - j|) eps_i eps_j.

    The pair sum equals sum_{i != j} u_i eps_i b(|i - j|) eps_j, i.e. v . (B eps)
    with v = u * eps and B the banded (circulant when periodic) matrix with a
    zero diagonal.
    """
    eps = np.asarray(eps, dtype=float)
    off_diagonal = np.array(b_profile, dtype=float)
    off_diagonal[0] = 0.0
    if periodic:
        spectrum = np.fft.rfft(circular_layout(off_diagonal, len(eps)))
        b_eps = np.fft.irfft(np.fft.rfft(eps) * spectrum, len(eps))
    else:
        b_eps = banded_apply(off_diagonal, eps, periodic=False)
    return float(np.dot(weights_a, eps) + np.dot(u * eps, b_eps))


@dataclass(frozen=True)
class QuadformResult:
    n: int
    h: float
    alpha: float
    replicates: int
    variance: float
    variance_se: float
    expansion: float

    @property
    def relative_error(self) -> float:
        return abs(self.variance - self.expansion) / self.expansion

    def to_record(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "h": self.h,
            "alpha": self.alpha,
            "replicates": self.replicates,
            "variance": self.variance,
            "variance_se": self.variance_se,
            "expansion": self.expansion,
            "relative_error": self.relative_error,
        }


def _quadform_chunk(weights: QuadformWeights, alpha: float, sigma2: float, n: int, base_seed: int,
                    indices: Sequence[int]) -> List[float]:
    noise = make_noise(alpha, sigma2)
    values = []
    for index in indices:
        eps = noise.sample(n, replicate_seed(base_seed, QUADFORM_STREAM, index)).values
        values.append(quadform_sum(eps, weights.a, weights.b_profile, weights.u, weights.periodic))
    return values


def run_quadform_study(trend: TrendSpec, weight: WeightSpec, kernel: KernelSpec, sigma2: float,
                       alpha: float, n: int, replicates: int, seed: int, h: Optional[float] = None,
                       periodic: bool = True, threads: int = 1) -> QuadformResult:
    """
    Sample variance of sum_i Y_{i,n}(h) over ARCH(1) replicates, next to its two-term expansion.

    Args:
        trend: Trend
        weight: Weight function
        kernel: Kernel
        sigma2: Noise variance
        alpha: ARCH persistence
        n: Sample size
        replicates: Number of noise paths (>= 2)
        seed: Base seed
        h: Bandwidth; defaults to h_n*
        periodic: Circular design distances
        threads: joblib worker count

    Returns:
        QuadformResult
    """
    if replicates < 2:
        raise ValidationError(f"a variance needs at least 2 replicates, got {replicates}")
    ArchParams(alpha, sigma2)
    inputs = AsymptoticInputs.from_setup(trend, weight, kernel, sigma2)
    if h is None:
        h = inputs.c * n ** (-0.2)
    weights = quadform_weights(trend, weight, kernel, n, h, periodic)
    batches = Parallel(n_jobs=threads)(
        delayed(_quadform_chunk)(weights, alpha, sigma2, n, seed, chunk) for chunk in _chunks(replicates)
    )
    sums = np.array([value for batch in batches for value in batch])
    variance = float(np.var(sums, ddof=1))
    centred = sums - sums.mean()
    fourth = float(np.mean(centred ** 4))
    variance_se = math.sqrt(max(fourth - variance ** 2, 0.0) / replicates)
    return QuadformResult(
        n=n,
        h=float(h),
        alpha=float(alpha),
        replicates=replicates,
        variance=variance,
        variance_se=variance_se,
        expansion=quadform_variance_expansion(inputs, n, h),
    )
