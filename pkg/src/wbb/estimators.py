"""Scikit-learn style estimators wrapping the bootstrap engine.

These expose the solvers through fit/predict with get_params/set_params so
they compose with pipelines and model selection; the numerical work lives
in the solver modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.exceptions import NotFittedError

from .engine import (
    LassoBackend,
    MlpBackend,
    TrendFilterBackend,
    credible_interval,
    draws_matrix,
    run_wbb,
    summarize,
)
from .lasso import SolverOptions, cross_validate_lambda, default_lambda_grid
from .mlp import SgdSchedule, evaluate_accuracy
from .objectives import Dataset
from .rng import RngConfig, ones_weight_draw
from .trendfilter import AdmmOptions
from .validation import check_matrix, check_vector


def standardize_dataset(data: Dataset) -> tuple[Dataset, np.ndarray, np.ndarray, float]:
    """Unit-variance columns, centered response.

    Returns the transformed dataset plus (column means, column scales,
    response mean) for mapping coefficients back to the original units.
    """
    X, y = data.design, data.response
    mu = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    y_mean = float(y.mean())
    std = Dataset((X - mu) / scale, y - y_mean, data.feature_names)
    return std, mu, scale, y_mean


class WBBLasso(RegressorMixin, BaseEstimator):
    """Posterior sampling for lasso regression via reweighted fits.

    ``lam='cv'`` selects the penalty by unweighted cross-validation before
    drawing. Coefficient draws are reported on the original feature scale.
    """

    def __init__(
        self,
        lam="cv",
        n_draws: int = 1000,
        prior: str = "weighted",
        cv_folds: int = 10,
        standardize: bool = True,
        seed: int = 0,
        n_jobs: int = 1,
        tolerance: float = 1e-8,
        max_sweeps: int = 10_000,
    ):
        self.lam = lam
        self.n_draws = n_draws
        self.prior = prior
        self.cv_folds = cv_folds
        self.standardize = standardize
        self.seed = seed
        self.n_jobs = n_jobs
        self.tolerance = tolerance
        self.max_sweeps = max_sweeps

    def fit(self, X, y):
        data = Dataset(check_matrix(X), check_vector(y, "y"))
        rng = RngConfig(self.seed)
        if self.standardize:
            work, mu, scale, y_mean = standardize_dataset(data)
        else:
            work, mu, scale, y_mean = data, np.zeros(data.n_features), np.ones(data.n_features), 0.0
        opts = SolverOptions(tolerance=self.tolerance, max_sweeps=self.max_sweeps)
        if self.lam == "cv":
            lam = cross_validate_lambda(
                work, self.cv_folds, default_lambda_grid(work), rng, opts=opts
            )
        else:
            lam = float(self.lam)
        backend = LassoBackend(work, lam, opts)
        draws = run_wbb(backend, self.n_draws, self.prior, self.n_jobs, rng)
        self.lambda_ = lam
        self.coef_draws_ = draws_matrix(draws) / scale
        self.summary_ = summarize(self.coef_draws_, data.feature_names)
        self.coef_ = self.coef_draws_.mean(axis=0)
        self.intercept_ = y_mean - float(mu @ self.coef_)
        self.feature_names_ = list(data.feature_names)
        return self

    def predict(self, X):
        if not hasattr(self, "coef_"):
            raise NotFittedError("call fit before predict")
        return check_matrix(X) @ self.coef_ + self.intercept_

    def credible_interval(self, level: float = 0.95):
        if not hasattr(self, "coef_draws_"):
            raise NotFittedError("call fit before credible_interval")
        return credible_interval(self.coef_draws_, level)


class WBBTrendFilter(BaseEstimator):
    """Posterior bands for trend filtering of an ordered signal.

    ``poly_order`` is the degree of the piecewise polynomial (the penalty
    differences one order higher). The center line is the unweighted fit;
    bands are the pointwise draw mean +- 2 sd.
    """

    def __init__(
        self,
        poly_order: int = 3,
        lam: float = 1000.0,
        n_draws: int = 200,
        seed: int = 0,
        n_jobs: int = 1,
        tolerance: float = 1e-6,
        max_iterations: int = 5_000,
    ):
        self.poly_order = poly_order
        self.lam = lam
        self.n_draws = n_draws
        self.seed = seed
        self.n_jobs = n_jobs
        self.tolerance = tolerance
        self.max_iterations = max_iterations

    def fit(self, y):
        y = check_vector(y, "y")
        rng = RngConfig(self.seed)
        order = int(self.poly_order) + 1
        opts = AdmmOptions(tolerance=self.tolerance, max_iterations=self.max_iterations)
        backend = TrendFilterBackend(y, order, self.lam, opts)
        center = run_wbb(backend, 1, rng=rng, weights_fn=lambda k: ones_weight_draw(y.size, k))
        draws = run_wbb(backend, self.n_draws, "weighted", self.n_jobs, rng)
        matrix = draws_matrix(draws)
        self.center_ = np.asarray(center[0].parameters)
        self.draws_ = matrix
        self.mean_ = matrix.mean(axis=0)
        self.sd_ = matrix.std(axis=0, ddof=1)
        self.lower_ = self.mean_ - 2.0 * self.sd_
        self.upper_ = self.mean_ + 2.0 * self.sd_
        return self

    def transform(self, y=None):
        if not hasattr(self, "center_"):
            raise NotFittedError("call fit before transform")
        return self.center_


class WBBNeuralClassifier(ClassifierMixin, BaseEstimator):
    """Accuracy posterior for a small ReLU network under bootstrap weights."""

    def __init__(
        self,
        hidden: tuple[int, int] = (128, 64),
        lam: float = 1e-4,
        epochs: int = 20,
        batch_size: int = 32,
        lr: float = 1e-4,
        n_draws: int = 30,
        seed: int = 0,
        n_jobs: int = 1,
    ):
        self.hidden = hidden
        self.lam = lam
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.n_draws = n_draws
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X = check_matrix(X)
        labels = np.asarray(y, dtype=np.int64)
        n_classes = int(labels.max()) + 1
        schedule = SgdSchedule(
            "constant", lr=self.lr, batch_size=self.batch_size, epochs=self.epochs
        )
        layers = (X.shape[1], self.hidden[0], self.hidden[1], n_classes)
        backend = MlpBackend(X, labels, self.lam, schedule, layers)
        self.draws_ = run_wbb(backend, self.n_draws, "weighted", self.n_jobs, RngConfig(self.seed))
        self.n_classes_ = n_classes
        return self

    def predict_proba(self, X):
        if not hasattr(self, "draws_"):
            raise NotFittedError("call fit before predict_proba")
        X = check_matrix(X)
        good = [r for r in self.draws_ if not r.failed]
        proba = np.mean([r.parameters.predict_proba(X) for r in good], axis=0)
        return proba

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def accuracy_draws(self, X_test, y_test) -> np.ndarray:
        """Per-draw test accuracy, the coordinate summarized as the posterior."""
        if not hasattr(self, "draws_"):
            raise NotFittedError("call fit before accuracy_draws")
        X_test = check_matrix(X_test)
        labels = np.asarray(y_test, dtype=np.int64)
        return np.array(
            [
                evaluate_accuracy(r.parameters, X_test, labels)
                for r in self.draws_
                if not r.failed
            ]
        )
