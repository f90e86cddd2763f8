"""Datasets and the randomly weighted regularized objective."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .penalties import PenaltySpec, penalty_value
from .rng import WeightDraw
from .validation import check_matrix, check_option, check_vector

SQUARED_ERROR = "squared_error"
CROSS_ENTROPY = "cross_entropy"
LOSSES = (SQUARED_ERROR, CROSS_ENTROPY)


@dataclass(frozen=True)
class Dataset:
    """Design matrix, response vector, and feature names."""

    design: np.ndarray
    response: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        X = check_matrix(self.design, "design")
        y = check_vector(self.response, "response")
        object.__setattr__(self, "design", X)
        object.__setattr__(self, "response", y)
        if X.shape[0] != y.size:
            raise ValueError(
                f"design has {X.shape[0]} rows but response has {y.size} entries"
            )
        if not self.feature_names:
            object.__setattr__(
                self, "feature_names", [f"x{j}" for j in range(X.shape[1])]
            )
        if len(self.feature_names) != X.shape[1]:
            raise ValueError("feature_names length must equal the column count")

    @property
    def n_obs(self) -> int:
        return self.design.shape[0]

    @property
    def n_features(self) -> int:
        return self.design.shape[1]


def weighted_objective(
    data: Dataset,
    w: WeightDraw,
    theta,
    loss: str = SQUARED_ERROR,
    spec: PenaltySpec | None = None,
) -> float:
    """Evaluate sum_i w_i * l_i(theta) + lam * w_p * phi(theta).

    ``squared_error`` uses l_i = (y_i - x_i' theta)^2 / 2 with a coefficient
    vector theta. ``cross_entropy`` expects integer class labels in the
    response and a theta exposing ``predict_log_proba(design)``; l_i is the
    negative log-probability of the observed label.
    """
    check_option(loss, LOSSES, "loss")
    if w.n_obs != data.n_obs:
        raise ValueError(
            f"weight draw has {w.n_obs} observation weights for {data.n_obs} rows"
        )
    if loss == SQUARED_ERROR:
        beta = check_vector(theta, "theta")
        if beta.size != data.n_features:
            raise ValueError(
                f"theta has {beta.size} entries for {data.n_features} features"
            )
        resid = data.response - data.design @ beta
        data_term = 0.5 * float(np.dot(w.obs_weights, resid * resid))
        penalty_arg = beta
    else:
        log_proba = theta.predict_log_proba(data.design)
        labels = data.response.astype(np.int64)
        if np.any(labels < 0) or np.any(labels >= log_proba.shape[1]):
            raise ValueError("labels outside the class range of the predictor")
        per_example = -log_proba[np.arange(data.n_obs), labels]
        data_term = float(np.dot(w.obs_weights, per_example))
        penalty_arg = theta.weight_matrices()
    if spec is None or spec.lam == 0.0:
        return data_term
    return data_term + spec.lam * w.prior_weight * penalty_value(spec, penalty_arg)
