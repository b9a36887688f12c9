"""OLS on subdata, synthetic data generators and experiment runners.

Runners are replay-deterministic: every repetition derives its RNG seed
as base seed + repetition index, so parallel or re-ordered execution
cannot change the results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import exchange, metrics, seeding
from .linalg import SingularMomentError, as_indices, augment


class ConfigError(ValueError):
    """An experiment configuration field failed validation."""


METHODS = ("uniform", "iboss", "oss", "alg1", "valg1")


@dataclass
class ModelParams:
    beta0: float
    beta1: np.ndarray
    sigma2: float

    def __post_init__(self):
        self.beta1 = np.asarray(self.beta1, dtype=float)
        if self.sigma2 < 0:
            raise ConfigError("sigma2 must be >= 0")

    @property
    def beta(self):
        return np.concatenate(([self.beta0], self.beta1))


@dataclass
class OutlierSpec:
    count: int
    mean_shift: np.ndarray

    def __post_init__(self):
        self.mean_shift = np.asarray(self.mean_shift, dtype=float)


@dataclass
class ExperimentConfig:
    n: int
    p: int
    k: int
    K: int
    rho: float = 0.5
    repetitions: int = 100
    alg1_iterations: int = 5
    methods: tuple = ("uniform", "iboss", "oss", "alg1", "valg1")
    rng_seed: int = 0
    outliers: OutlierSpec | None = None
    seed_method: str = "oss"       # what alg1/valg1 start from
    beta0: float = 1.0
    beta1: np.ndarray | None = None   # defaults to all ones
    sigma2: float = 3.0

    def validate(self):
        if self.k > self.n:
            raise ConfigError(f"k={self.k} exceeds n={self.n}")
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if not 0.0 <= self.rho < 1.0:
            raise ConfigError(f"rho must be in [0, 1), got {self.rho}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.alg1_iterations < 1:
            raise ConfigError("alg1_iterations must be >= 1")
        if not self.methods:
            raise ConfigError("methods must be a nonempty list")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}")
        if self.seed_method not in ("uniform", "iboss", "oss"):
            raise ConfigError(f"invalid seed_method {self.seed_method!r}")
        if self.outliers is not None and self.outliers.count > self.n:
            raise ConfigError("outliers.count exceeds n")
        return self

    def model_params(self):
        beta1 = np.ones(self.p) if self.beta1 is None else self.beta1
        return ModelParams(self.beta0, beta1, self.sigma2)


@dataclass
class RunRecord:
    method: str
    repetition: int
    seed: int
    k: int
    K: int
    iterations: int
    mse: metrics.MseReport | None
    eff: metrics.EfficiencyReport | None
    seconds: float
    selection: np.ndarray | None = None
    outliers_selected: int = 0
    error: str | None = None


@dataclass
class ExperimentReport:
    config: object
    records: list[RunRecord] = field(default_factory=list)

    def by_method(self, method):
        return [r for r in self.records if r.method == method and not r.error]

    def aggregates(self):
        out = {}
        methods = []
        for r in self.records:
            if r.method not in methods:
                methods.append(r.method)
        for m in methods:
            recs = self.by_method(m)
            if not recs:
                out[m] = {"failed": True}
                continue
            agg = {"count": len(recs)}
            for name, get in (
                    ("mse_intercept", lambda r: r.mse.mse_intercept),
                    ("mse_slopes", lambda r: r.mse.mse_slopes),
                    ("gen_variance", lambda r: r.eff.gen_variance),
                    ("d_eff", lambda r: r.eff.d_eff),
                    ("a_eff", lambda r: r.eff.a_eff)):
                vals = np.array([get(r) for r in recs
                                 if r.mse is not None and r.eff is not None])
                if vals.size:
                    agg[name] = {
                        "mean": float(vals.mean()),
                        "median": float(np.median(vals)),
                        "q25": float(np.quantile(vals, 0.25)),
                        "q75": float(np.quantile(vals, 0.75)),
                    }
            agg["mean_seconds"] = float(
                np.mean([r.seconds for r in recs]))
            out[m] = agg
        return out


def ols_fit(x, y, sel):
    """Least-squares fit on the selected rows via the normal equations.

    Returns (full coefficient vector with intercept first, slopes).
    """
    idx = as_indices(sel)
    z = augment(np.asarray(x, dtype=float)[idx])
    ys = np.asarray(y, dtype=float)[idx]
    q = z.T @ z
    try:
        factor = cho_factor(q, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularMomentError("selection is singular") from exc
    beta = cho_solve(factor, z.T @ ys)
    return beta, beta[1:]


def adjusted_intercept(y_bar_full, x_bar_full, slopes):
    """Intercept from full-data means paired with subdata slopes."""
    x_bar_full = np.asarray(x_bar_full, dtype=float)
    slopes = np.asarray(slopes, dtype=float)
    if x_bar_full.shape != slopes.shape:
        raise ValueError("x_bar_full and slopes dimensions differ")
    return float(y_bar_full - x_bar_full @ slopes)


def _equicorr_rows(rng, n, p, rho):
    g = rng.standard_normal((n, p))
    if rho == 0.0:
        return g
    g0 = rng.standard_normal((n, 1))
    return math.sqrt(1.0 - rho) * g + math.sqrt(rho) * g0


def gen_mvn_equicorr(n, p, rho, rng_seed):
    """Rows i.i.d. N(0, (1-rho) I + rho J)."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must be in [0, 1), got {rho}")
    rng = np.random.default_rng(rng_seed)
    return _equicorr_rows(rng, n, p, rho)


def gen_outlier_scenario(n, p, count, mean_shift, rho, rng_seed):
    """Equicorrelated normal rows with `count` mean-shifted rows at the end."""
    if count > n:
        raise ValueError(f"count={count} exceeds n={n}")
    x = gen_mvn_equicorr(n, p, rho, rng_seed)
    if count > 0:
        x[n - count:] += np.asarray(mean_shift, dtype=float)
    return x


def gen_response(x, params, rng_seed):
    """y_i = beta0 + x_i . beta1 + eps_i with i.i.d. normal errors."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(rng_seed)
    eps = rng.standard_normal(x.shape[0]) * math.sqrt(params.sigma2)
    return params.beta0 + x @ params.beta1 + eps


def select_subdata(x_scaled, method, k, K, iterations=5, rng_seed=0,
                   seed_method="oss"):
    """Dispatch one selection method; returns (Selection, seconds).

    alg1/valg1 are seeded from a `seed_method` selection computed first;
    its time is included, matching how the exchange is deployed.
    """
    t0 = time.perf_counter()
    if method == "uniform":
        sel = seeding.uniform_seed(x_scaled, k, rng_seed)
    elif method == "iboss":
        sel = seeding.iboss_seed(x_scaled, k)
    elif method == "oss":
        sel = seeding.oss_seed(x_scaled, k)
    elif method in ("alg1", "valg1"):
        seed, _ = select_subdata(x_scaled, seed_method, k, K,
                                 rng_seed=rng_seed)
        if method == "alg1":
            sel, _ = exchange.alg1(x_scaled, seed, K, iterations)
        else:
            sel, _ = exchange.valg1(x_scaled, seed, K)
    else:
        raise ValueError(f"unknown method {method!r}")
    return sel, time.perf_counter() - t0


def _run_one(x, y, x_scaled, method, cfg, rep_seed, rep, params,
             seed_cache, keep_selection=False):
    try:
        t0 = time.perf_counter()
        if method in ("alg1", "valg1"):
            seed = seed_cache["seed_sel"]
            if method == "alg1":
                sel, _ = exchange.alg1(x_scaled, seed, cfg.K,
                                       cfg.alg1_iterations)
            else:
                sel, _ = exchange.valg1(x_scaled, seed, cfg.K)
            seconds = time.perf_counter() - t0 + seed_cache["seed_seconds"]
        else:
            sel, seconds = select_subdata(x_scaled, method, cfg.k, cfg.K,
                                          cfg.alg1_iterations, rep_seed)
        beta, slopes = ols_fit(x, y, sel)
        b0 = adjusted_intercept(y.mean(), x.mean(axis=0), slopes)
        msr = metrics.mse(np.concatenate(([b0], slopes)), params.beta)
        eff = metrics.efficiency(x_scaled, sel)
        n_out = 0
        if cfg.outliers is not None and cfg.outliers.count > 0:
            n_out = int(np.count_nonzero(
                sel.indices >= cfg.n - cfg.outliers.count))
        return RunRecord(method, rep, rep_seed, cfg.k, cfg.K,
                         cfg.alg1_iterations, msr, eff, seconds,
                         sel.indices.copy() if keep_selection else None,
                         n_out)
    except (SingularMomentError, seeding.ConstantColumnError,
            np.linalg.LinAlgError) as exc:
        return RunRecord(method, rep, rep_seed, cfg.k, cfg.K,
                         cfg.alg1_iterations, None, None, 0.0,
                         error=str(exc))


def run_experiment(config, keep_selections=False):
    """Simulation protocol: generate, select, fit, score, repeat."""
    cfg = config.validate()
    params = cfg.model_params()
    report = ExperimentReport(cfg)
    for rep in range(cfg.repetitions):
        rep_seed = cfg.rng_seed + rep
        if cfg.outliers is not None:
            x = gen_outlier_scenario(cfg.n, cfg.p, cfg.outliers.count,
                                     cfg.outliers.mean_shift, cfg.rho,
                                     rep_seed)
        else:
            x = gen_mvn_equicorr(cfg.n, cfg.p, cfg.rho, rep_seed)
        y = gen_response(x, params, rep_seed + 10 ** 9)
        x_scaled, _ = seeding.scale_to_unit_cube(x)
        seed_cache = {}
        if any(m in cfg.methods for m in ("alg1", "valg1")):
            seed_sel, secs = select_subdata(x_scaled, cfg.seed_method,
                                            cfg.k, cfg.K,
                                            rng_seed=rep_seed)
            seed_cache = {"seed_sel": seed_sel, "seed_seconds": secs}
        for method in cfg.methods:
            report.records.append(
                _run_one(x, y, x_scaled, method, cfg, rep_seed, rep,
                         params, seed_cache, keep_selections))
    return report


def bootstrap_mse(x, y, B, method, k, K, rng_seed=0, iterations=5,
                  seed_method="oss", resample=True):
    """Bootstrap the subdata-selection MSE on a fixed dataset.

    Each of the B resamples draws n rows with replacement, runs the
    selection method, fits OLS on the selected rows, and scores the fit
    against the full-data OLS coefficients of the *original* dataset.
    """
    if B < 1:
        raise ConfigError("B must be >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = x.shape
    beta_ref, _ = ols_fit(x, y, np.arange(n))
    cfg = ExperimentConfig(n=n, p=p, k=k, K=K, repetitions=B,
                           alg1_iterations=iterations,
                           methods=(method,), rng_seed=rng_seed,
                           seed_method=seed_method).validate()
    report = ExperimentReport(cfg)
    for b in range(B):
        rep_seed = rng_seed + b
        if resample:
            rows = np.random.default_rng(rep_seed).integers(0, n, size=n)
            xb, yb = x[rows], y[rows]
        else:
            xb, yb = x, y
        try:
            xb_scaled, _ = seeding.scale_to_unit_cube(xb)
            sel, seconds = select_subdata(xb_scaled, method, k, K,
                                          iterations, rep_seed,
                                          seed_method)
            beta, slopes = ols_fit(xb, yb, sel)
            b0 = adjusted_intercept(yb.mean(), xb.mean(axis=0), slopes)
            msr = metrics.mse(np.concatenate(([b0], slopes)), beta_ref)
            eff = metrics.efficiency(xb_scaled, sel)
            report.records.append(RunRecord(
                method, b, rep_seed, k, K, iterations, msr, eff, seconds))
        except (SingularMomentError, seeding.ConstantColumnError,
                np.linalg.LinAlgError) as exc:
            report.records.append(RunRecord(
                method, b, rep_seed, k, K, iterations, None, None, 0.0,
                error=str(exc)))
    return report


@dataclass
class TimingCell:
    k: int
    K: int
    iterations: int
    mean_seconds: float
    mean_pct_v_gain: float   # percent increase of V over the seed


def timing_study(ks, Ks, iteration_counts, n=1000, p=7, rho=0.5,
                 repetitions=50, rng_seed=0, seed_method="oss"):
    """Mean exchange wall time and V gain per (k, K, iterations) cell.

    Every cell re-runs the exchange from the same per-repetition data and
    seed selection, so timings across iteration counts are comparable.
    """
    if not (ks and Ks and iteration_counts):
        raise ConfigError("timing grid must be nonempty")
    datasets = []
    for rep in range(repetitions):
        x = gen_mvn_equicorr(n, p, rho, rng_seed + rep)
        datasets.append(seeding.scale_to_unit_cube(x)[0])
    cells = []
    for k in ks:
        for K in Ks:
            seeds = [select_subdata(xs, seed_method, k, K,
                                    rng_seed=rng_seed + rep)[0]
                     for rep, xs in enumerate(datasets)]
            for iters in iteration_counts:
                secs = np.empty(repetitions)
                gains = np.empty(repetitions)
                for rep, xs in enumerate(datasets):
                    _, trace = exchange.alg1(xs, seeds[rep], K, iters)
                    secs[rep] = trace.seconds
                    gains[rep] = 100.0 * math.expm1(
                        trace.final_log_v - trace.initial_log_v)
                cells.append(TimingCell(k, K, iters, float(secs.mean()),
                                        float(gains.mean())))
    return cells
