"""Weighted Bayesian bootstrap: approximate posterior sampling by solving
randomly reweighted regularized optimization problems.

Draw exponential weights for the observations and the prior, minimize the
reweighted objective, and treat the collection of optima as posterior
samples with the usual quantile/sd summaries.
"""

from .engine import (
    DrawResult,
    LassoBackend,
    MlpBackend,
    PosteriorSummary,
    TrendFilterBackend,
    UnivariateBackend,
    credible_interval,
    draws_matrix,
    histogram_density,
    run_wbb,
    summarize,
)
from .estimators import WBBLasso, WBBNeuralClassifier, WBBTrendFilter
from .lasso import (
    LassoFit,
    SolverOptions,
    check_kkt,
    cross_validate_lambda,
    cv_error_curve,
    default_lambda_grid,
    fit_weighted_lasso,
    lambda_max,
)
from .mlp import (
    MlpParams,
    SgdSchedule,
    backward,
    evaluate_accuracy,
    forward,
    init_params,
    loss,
    one_hot,
    sgd_fit,
)
from .objectives import Dataset, weighted_objective
from .penalties import DiffMatrix, PenaltySpec, build_diff_matrix, penalty_value
from .rng import RngConfig, WeightDraw, exp_from_uniform, ones_weight_draw, sample_weights
from .trendfilter import (
    AdmmOptions,
    TrendFilterFit,
    fit_trend_filter,
    fourier_signal,
    reweight_transform,
    simulate_fourier,
)
from .univariate import (
    exact_posterior_mean,
    soft_threshold,
    soft_threshold_wbb,
    wbb_mean_oracle,
    zero_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AdmmOptions",
    "Dataset",
    "DiffMatrix",
    "DrawResult",
    "LassoBackend",
    "LassoFit",
    "MlpBackend",
    "MlpParams",
    "PenaltySpec",
    "PosteriorSummary",
    "RngConfig",
    "SgdSchedule",
    "SolverOptions",
    "TrendFilterBackend",
    "TrendFilterFit",
    "UnivariateBackend",
    "WBBLasso",
    "WBBNeuralClassifier",
    "WBBTrendFilter",
    "WeightDraw",
    "backward",
    "build_diff_matrix",
    "check_kkt",
    "credible_interval",
    "cross_validate_lambda",
    "cv_error_curve",
    "default_lambda_grid",
    "draws_matrix",
    "evaluate_accuracy",
    "exact_posterior_mean",
    "exp_from_uniform",
    "fit_trend_filter",
    "fit_weighted_lasso",
    "forward",
    "fourier_signal",
    "histogram_density",
    "init_params",
    "lambda_max",
    "loss",
    "one_hot",
    "ones_weight_draw",
    "penalty_value",
    "reweight_transform",
    "run_wbb",
    "sample_weights",
    "sgd_fit",
    "simulate_fourier",
    "soft_threshold",
    "soft_threshold_wbb",
    "summarize",
    "wbb_mean_oracle",
    "weighted_objective",
    "zero_probability",
]
