"""Orchestration of bootstrap draws across model backends.

Each draw k samples its weights on stream k and solves one reweighted
optimization; results are therefore independent of worker count and
completion order. A failed draw is retried once with tightened solver
settings and otherwise recorded with a failure flag; the run itself only
fails when more than 10% of draws do.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from joblib import Parallel, delayed

from .lasso import SolverOptions, fit_weighted_lasso
from .mlp import MlpParams, SgdSchedule, sgd_fit
from .objectives import Dataset
from .rng import RngConfig, WeightDraw, sample_weights
from .trendfilter import AdmmOptions, fit_trend_filter
from .univariate import soft_threshold_wbb
from .validation import check_positive_int

MAX_FAILURE_FRACTION = 0.10


@dataclass(frozen=True)
class DrawResult:
    """One bootstrap optimum with its stream identity and solver metrics."""

    draw_id: int
    parameters: Any
    stream_id: int
    diagnostics: dict = field(default_factory=dict)
    failed: bool = False


@dataclass(frozen=True)
class PosteriorSummary:
    """Per-coordinate sample statistics over the successful draws."""

    names: list[str]
    mean: np.ndarray
    sd: np.ndarray
    q025: np.ndarray
    q50: np.ndarray
    q975: np.ndarray
    zero_fraction: np.ndarray
    draw_count: int

    def to_records(self) -> list[dict]:
        return [
            {
                "coordinate": self.names[j],
                "mean": float(self.mean[j]),
                "sd": float(self.sd[j]),
                "q025": float(self.q025[j]),
                "q50": float(self.q50[j]),
                "q975": float(self.q975[j]),
                "zero_fraction": float(self.zero_fraction[j]),
            }
            for j in range(len(self.names))
        ]


class UnivariateBackend:
    """Scalar normal-means problem with the closed-form solution."""

    def __init__(self, y: float, lam: float):
        self.y = float(y)
        self.lam = float(lam)
        self.n_obs = 1

    def solve(self, w: WeightDraw, rng: RngConfig, strict: bool = False):
        theta = soft_threshold_wbb(self.y, self.lam, float(w.obs_weights[0]), w.prior_weight)
        return np.array([theta]), {"converged": True}

    def coordinate_names(self) -> list[str]:
        return ["theta"]


class LassoBackend:
    """Weighted lasso regression on a fixed dataset."""

    def __init__(self, data: Dataset, lam: float, opts: SolverOptions | None = None):
        self.data = data
        self.lam = float(lam)
        self.opts = opts or SolverOptions()
        self.n_obs = data.n_obs

    def solve(self, w: WeightDraw, rng: RngConfig, strict: bool = False):
        opts = self.opts.tightened() if strict else self.opts
        fit = fit_weighted_lasso(self.data, w, self.lam, opts)
        diagnostics = {
            "converged": fit.converged,
            "iterations": fit.iterations,
            "objective": fit.objective,
            "max_kkt_violation": fit.max_kkt_violation,
        }
        return fit.coefficients, diagnostics

    def coordinate_names(self) -> list[str]:
        return list(self.data.feature_names)


class TrendFilterBackend:
    """Weighted trend filtering of an ordered signal."""

    def __init__(self, y: np.ndarray, order: int, lam: float, opts: AdmmOptions | None = None):
        self.y = np.asarray(y, dtype=np.float64)
        self.order = int(order)
        self.lam = float(lam)
        self.opts = opts or AdmmOptions()
        self.n_obs = self.y.size

    def solve(self, w: WeightDraw, rng: RngConfig, strict: bool = False):
        opts = self.opts.tightened() if strict else self.opts
        fit = fit_trend_filter(self.y, w, self.order, self.lam, opts)
        diagnostics = {
            "converged": fit.converged,
            "iterations": fit.iterations,
            "primal_residual": fit.primal_residual,
            "dual_residual": fit.dual_residual,
        }
        return fit.beta, diagnostics

    def coordinate_names(self) -> list[str]:
        return [f"beta{i + 1}" for i in range(self.n_obs)]


class MlpBackend:
    """Weighted network training; parameters are the full MlpParams payload."""

    def __init__(
        self,
        X: np.ndarray,
        labels: np.ndarray,
        lam: float,
        schedule: SgdSchedule | None = None,
        layer_sizes: tuple[int, ...] | None = None,
    ):
        self.X = np.asarray(X, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int64)
        self.lam = float(lam)
        self.schedule = schedule or SgdSchedule()
        self.layer_sizes = layer_sizes
        self.n_obs = self.X.shape[0]

    def solve(self, w: WeightDraw, rng: RngConfig, strict: bool = False):
        schedule = self.schedule
        if strict:
            # Divergence retry: a tenth of the step size, same budget.
            schedule = SgdSchedule(
                schedule.kind, schedule.lr * 0.1, schedule.decay,
                schedule.batch_size, schedule.epochs,
            )
        params = sgd_fit(
            self.X, self.labels, w.obs_weights, self.lam, schedule, rng,
            w_p=w.prior_weight, layer_sizes=self.layer_sizes,
        )
        return params, {"converged": True, "steps": schedule.epochs * int(np.ceil(self.n_obs / schedule.batch_size))}

    def coordinate_names(self) -> list[str]:
        return ["params"]


def _run_one(
    backend,
    draw_id: int,
    rng: RngConfig,
    prior_mode: str,
    weights_fn: Callable[[int], WeightDraw] | None,
) -> DrawResult:
    stream = rng.with_stream(draw_id)
    if weights_fn is not None:
        w = weights_fn(draw_id)
    else:
        w = sample_weights(backend.n_obs, stream, prior_mode)
    try:
        params, diagnostics = backend.solve(w, stream)
        if diagnostics.get("converged", True):
            return DrawResult(draw_id, params, stream.stream_id, diagnostics)
    except Exception as exc:  # retried below with tightened settings
        diagnostics = {"error": repr(exc)}
    try:
        params, retry_diag = backend.solve(w, stream, strict=True)
        retry_diag["retried"] = True
        failed = not retry_diag.get("converged", True)
        return DrawResult(draw_id, params, stream.stream_id, retry_diag, failed=failed)
    except Exception as exc:
        diagnostics = dict(diagnostics)
        diagnostics.update({"retried": True, "error": repr(exc)})
        return DrawResult(draw_id, None, stream.stream_id, diagnostics, failed=True)


def run_wbb(
    backend,
    n_draws: int,
    prior_mode: str = "weighted",
    n_jobs: int = 1,
    rng: RngConfig | None = None,
    weights_fn: Callable[[int], WeightDraw] | None = None,
) -> list[DrawResult]:
    """Run n_draws independent reweighted optimizations.

    Draw k samples its weights on stream k of the master seed, so the
    result list is identical for any ``n_jobs``. ``weights_fn`` overrides
    weight sampling (used to inject deterministic weights in tests and for
    the unweighted center fit). Raises RuntimeError when more than 10% of
    draws fail after their retry.
    """
    check_positive_int(n_draws, "n_draws")
    check_positive_int(n_jobs, "n_jobs")
    rng = rng or RngConfig(0)
    if n_jobs == 1:
        results = [_run_one(backend, k, rng, prior_mode, weights_fn) for k in range(n_draws)]
    else:
        results = Parallel(n_jobs=n_jobs)(
            delayed(_run_one)(backend, k, rng, prior_mode, weights_fn)
            for k in range(n_draws)
        )
    results = sorted(results, key=lambda r: r.draw_id)
    n_failed = sum(r.failed for r in results)
    if n_failed > MAX_FAILURE_FRACTION * n_draws:
        raise RuntimeError(
            f"{n_failed} of {n_draws} draws failed (above the "
            f"{MAX_FAILURE_FRACTION:.0%} tolerance)"
        )
    return results


def draws_matrix(draws: list[DrawResult]) -> np.ndarray:
    """Stack successful vector-valued draws into a (K, d) matrix."""
    good = [r for r in draws if not r.failed and r.parameters is not None]
    if not good:
        raise ValueError("all draws failed; nothing to stack")
    return np.vstack([np.asarray(r.parameters, dtype=np.float64) for r in good])


def summarize(draws, names: list[str] | None = None) -> PosteriorSummary:
    """Sample statistics of the draws (type-7 quantiles, sd with K-1).

    Accepts a list of DrawResults with vector payloads or a (K, d) array.
    Failed draws are excluded; the sd is NaN when only one draw remains.
    """
    values = draws if isinstance(draws, np.ndarray) else draws_matrix(draws)
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    k, d = values.shape
    if names is None:
        names = [f"c{j}" for j in range(d)]
    sd = values.std(axis=0, ddof=1) if k > 1 else np.full(d, np.nan)
    q025, q50, q975 = np.quantile(values, [0.025, 0.5, 0.975], axis=0)
    return PosteriorSummary(
        names=list(names),
        mean=values.mean(axis=0),
        sd=sd,
        q025=q025,
        q50=q50,
        q975=q975,
        zero_fraction=(values == 0.0).mean(axis=0),
        draw_count=k,
    )


def credible_interval(draws, level: float = 0.95) -> tuple[np.ndarray, np.ndarray]:
    """Equal-tailed interval from the draw quantiles."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    values = draws if isinstance(draws, np.ndarray) else draws_matrix(draws)
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if values.shape[0] < 2:
        raise ValueError("need at least two draws for an interval")
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(values, [alpha, 1.0 - alpha], axis=0)
    return lower, upper


def histogram_density(values: np.ndarray, bins: int = 30) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of one coordinate normalized to integrate to 1."""
    density, edges = np.histogram(np.asarray(values, dtype=np.float64), bins=bins, density=True)
    return edges, density
