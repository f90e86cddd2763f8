"""Synthetic dataset generators used by the tests and examples."""

from __future__ import annotations

import numpy as np

from .objectives import Dataset
from .rng import RngConfig, SIM_SALT
from .validation import check_positive_int

DIABETES_FEATURES = ["age", "sex", "bmi", "map", "tc", "ldl", "hdl", "tch", "ltg", "glu"]


def simulate_regression(
    n: int = 442,
    d: int = 10,
    n_relevant: int = 4,
    noise_sd: float = 1.0,
    rng: RngConfig | None = None,
) -> Dataset:
    """Standardized sparse linear-regression data, diabetes-shaped by default.

    The first ``n_relevant`` coefficients are nonzero; columns are centered
    and scaled to unit variance and the response is centered, matching the
    preprocessing the CLI applies to real data.
    """
    check_positive_int(n, "n")
    check_positive_int(d, "d")
    gen = (rng or RngConfig(0)).generator(SIM_SALT)
    X = gen.standard_normal((n, d))
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    beta = np.zeros(d)
    beta[:n_relevant] = gen.uniform(1.0, 3.0, n_relevant) * gen.choice([-1.0, 1.0], n_relevant)
    y = X @ beta + noise_sd * gen.standard_normal(n)
    y -= y.mean()
    names = DIABETES_FEATURES[:d] if d <= len(DIABETES_FEATURES) else [f"x{j}" for j in range(d)]
    return Dataset(X, y, names)


def simulate_image_classes(
    n_train: int,
    n_test: int,
    n_classes: int = 10,
    side: int = 28,
    separation: float = 0.55,
    rng: RngConfig | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Gaussian class-template images in [0, 1], MNIST-shaped by default.

    Each class has a smooth random template; examples are the template plus
    pixel noise, clipped to [0, 1]. ``separation`` scales the template
    contrast relative to the noise. Returns (X_train, y_train, X_test,
    y_test) with flattened rows.
    """
    gen = (rng or RngConfig(0)).generator(SIM_SALT)
    pixels = side * side
    # Smooth templates: low-frequency random fields, zero mean.
    grid = np.linspace(0.0, 1.0, side)
    xx, yy = np.meshgrid(grid, grid)
    templates = np.zeros((n_classes, pixels))
    for c in range(n_classes):
        phase = gen.uniform(0.0, 2.0 * np.pi, size=4)
        freq = gen.uniform(1.0, 3.0, size=4)
        img = sum(
            np.sin(2.0 * np.pi * freq[i] * xx + phase[i])
            * np.cos(2.0 * np.pi * freq[(i + 1) % 4] * yy + phase[(i + 2) % 4])
            for i in range(4)
        )
        templates[c] = (img / np.abs(img).max()).ravel()

    def draw(count: int) -> tuple[np.ndarray, np.ndarray]:
        labels = gen.integers(0, n_classes, size=count)
        noise = gen.standard_normal((count, pixels))
        raw = 0.5 + 0.25 * separation * templates[labels] + 0.25 * noise
        return np.clip(raw, 0.0, 1.0), labels

    X_train, y_train = draw(n_train)
    X_test, y_test = draw(n_test)
    return X_train, y_train, X_test, y_test
