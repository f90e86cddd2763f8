"""Two-hidden-layer ReLU network trained by minibatch SGD with backprop.

The training objective for one bootstrap draw is
    sum_i w_i * ce(y_i, yhat(x_i)) + lam * w_p * sum_l ||W_l||_F^2
with softmax outputs and standard cross-entropy. The minibatch gradient
scales both the data term and the penalty by n/b, and minibatches cycle
through consecutive examples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .penalties import PenaltySpec, SQUARED_L2_MATRICES, penalty_value
from .rng import INIT_SALT, RngConfig
from .validation import TrainingDivergedError, check_nonnegative, check_positive, check_positive_int

_PENALTY = PenaltySpec(SQUARED_L2_MATRICES)

DEFAULT_LAYERS = (784, 128, 64, 10)


@dataclass(frozen=True)
class MlpParams:
    """Weights and biases of the two-hidden-layer network.

    Also serves as the container for gradients, which share the shapes.
    """

    W0: np.ndarray
    b0: np.ndarray
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        shapes_ok = (
            self.W0.ndim == 2
            and self.W1.ndim == 2
            and self.W2.ndim == 2
            and self.b0.shape == (self.W0.shape[0],)
            and self.b1.shape == (self.W1.shape[0],)
            and self.b2.shape == (self.W2.shape[0],)
            and self.W1.shape[1] == self.W0.shape[0]
            and self.W2.shape[1] == self.W1.shape[0]
        )
        if not shapes_ok:
            raise ValueError("inconsistent layer shapes")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.W0.shape[1], self.W0.shape[0], self.W1.shape[0], self.W2.shape[0])

    def weight_matrices(self) -> list[np.ndarray]:
        return [self.W0, self.W1, self.W2]

    def predict_log_proba(self, X: np.ndarray) -> np.ndarray:
        return _log_softmax(_logits(self, np.atleast_2d(X)))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return np.exp(self.predict_log_proba(X))


@dataclass(frozen=True)
class SgdSchedule:
    """Step-size rule, minibatch size, and epoch count.

    ``constant`` uses step t_k = lr for every step; ``exp_decay`` uses
    t_k = lr * exp(-decay * k) with k the 0-based step index.
    """

    kind: str = "constant"
    lr: float = 1e-4
    decay: float = 0.0
    batch_size: int = 32
    epochs: int = 20

    def __post_init__(self):
        if self.kind not in ("constant", "exp_decay"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        check_positive(self.lr, "lr")
        check_nonnegative(self.decay, "decay")
        check_positive_int(self.batch_size, "batch_size")
        check_positive_int(self.epochs, "epochs")

    def step_size(self, k: int) -> float:
        if self.kind == "constant":
            return self.lr
        return self.lr * float(np.exp(-self.decay * k))


def init_params(rng: RngConfig, layer_sizes: tuple[int, ...] = DEFAULT_LAYERS) -> MlpParams:
    """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases, seeded per draw."""
    gen = rng.generator(INIT_SALT)
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) != 4:
        raise ValueError("layer_sizes must be (input, hidden1, hidden2, classes)")
    mats = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        mats.append(gen.uniform(-bound, bound, size=(fan_out, fan_in)))
    return MlpParams(
        W0=mats[0], b0=np.zeros(sizes[1]),
        W1=mats[1], b1=np.zeros(sizes[2]),
        W2=mats[2], b2=np.zeros(sizes[3]),
    )


def _logits(params: MlpParams, X: np.ndarray) -> np.ndarray:
    a1 = X @ params.W0.T + params.b0
    z1 = np.maximum(a1, 0.0)
    a2 = z1 @ params.W1.T + params.b1
    z2 = np.maximum(a2, 0.0)
    return z2 @ params.W2.T + params.b2


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Class probabilities for one input vector or a batch of rows."""
    X = np.atleast_2d(np.asarray(x, dtype=np.float64))
    proba = np.exp(_log_softmax(_logits(params, X)))
    assert np.all(proba > 0.0) and np.allclose(proba.sum(axis=1), 1.0, atol=1e-12)
    return proba[0] if np.asarray(x).ndim == 1 else proba


def _check_one_hot(Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise ValueError("labels must be a 2-d one-hot array")
    if not np.all((Y == 0.0) | (Y == 1.0)) or not np.all(Y.sum(axis=1) == 1.0):
        raise ValueError("labels must be one-hot rows")
    return Y


def one_hot(labels: np.ndarray, n_classes: int = 10) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise ValueError(f"labels must lie in 0..{n_classes - 1}")
    return np.eye(n_classes)[labels]


def loss(
    params: MlpParams,
    X: np.ndarray,
    Y: np.ndarray,
    w_batch: np.ndarray,
    lam: float = 0.0,
    w_p: float = 1.0,
) -> float:
    """Weighted cross-entropy plus the squared-Frobenius penalty.

    X is (b, d_in), Y is one-hot (b, classes), w_batch the per-example
    weights. An empty batch contributes a zero data term.
    """
    Y = _check_one_hot(Y) if len(Y) else np.zeros((0, params.W2.shape[0]))
    check_nonnegative(lam, "lam")
    if len(X):
        log_proba = _log_softmax(_logits(params, np.atleast_2d(X)))
        per_example = -np.sum(Y * log_proba, axis=1)
        data_term = float(np.dot(w_batch, per_example))
    else:
        data_term = 0.0
    return data_term + lam * w_p * penalty_value(_PENALTY, params.weight_matrices())


def backward(
    params: MlpParams,
    X: np.ndarray,
    Y: np.ndarray,
    w_batch: np.ndarray,
    lam: float = 0.0,
    w_p: float = 1.0,
) -> MlpParams:
    """Exact gradient of :func:`loss`, returned in an MlpParams container.

    The penalty contributes 2*lam*w_p*W_l to each weight matrix and nothing
    to the biases.
    """
    reg = 2.0 * lam * w_p
    if not len(X):
        return MlpParams(
            W0=reg * params.W0, b0=np.zeros_like(params.b0),
            W1=reg * params.W1, b1=np.zeros_like(params.b1),
            W2=reg * params.W2, b2=np.zeros_like(params.b2),
        )
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = _check_one_hot(Y)
    w_batch = np.asarray(w_batch, dtype=np.float64)

    a1 = X @ params.W0.T + params.b0
    z1 = np.maximum(a1, 0.0)
    a2 = z1 @ params.W1.T + params.b1
    z2 = np.maximum(a2, 0.0)
    logits = z2 @ params.W2.T + params.b2
    shifted = logits - logits.max(axis=1, keepdims=True)
    proba = np.exp(shifted)
    proba /= proba.sum(axis=1, keepdims=True)

    d_logits = (proba - Y) * w_batch[:, None]
    dW2 = d_logits.T @ z2 + reg * params.W2
    db2 = d_logits.sum(axis=0)
    d_z2 = d_logits @ params.W2
    d_a2 = d_z2 * (a2 > 0.0)
    dW1 = d_a2.T @ z1 + reg * params.W1
    db1 = d_a2.sum(axis=0)
    d_z1 = d_a2 @ params.W1
    d_a1 = d_z1 * (a1 > 0.0)
    dW0 = d_a1.T @ X + reg * params.W0
    db0 = d_a1.sum(axis=0)
    return MlpParams(W0=dW0, b0=db0, W1=dW1, b1=db1, W2=dW2, b2=db2)


def _step(params: MlpParams, grad: MlpParams, t: float) -> MlpParams:
    return MlpParams(
        W0=params.W0 - t * grad.W0, b0=params.b0 - t * grad.b0,
        W1=params.W1 - t * grad.W1, b1=params.b1 - t * grad.b1,
        W2=params.W2 - t * grad.W2, b2=params.b2 - t * grad.b2,
    )


def sgd_fit(
    X: np.ndarray,
    labels: np.ndarray,
    w_obs: np.ndarray,
    lam: float,
    schedule: SgdSchedule,
    rng: RngConfig,
    w_p: float = 1.0,
    layer_sizes: tuple[int, ...] | None = None,
    init: MlpParams | None = None,
) -> MlpParams:
    """Run the weighted SGD loop for epochs * ceil(n/b) steps.

    The step-k gradient is (n/b) * [sum_{i in batch} w_i grad ce_i +
    lam * w_p * grad penalty], with consecutive minibatches cycling through
    the data. Raises TrainingDivergedError on a non-finite gradient.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    w_obs = np.asarray(w_obs, dtype=np.float64)
    n = X.shape[0]
    b = schedule.batch_size
    if b > n:
        raise ValueError(f"batch_size {b} exceeds the {n} training examples")
    if layer_sizes is None:
        layer_sizes = (X.shape[1],) + DEFAULT_LAYERS[1:]
    n_classes = layer_sizes[-1]
    Y = one_hot(labels, n_classes)

    params = init if init is not None else init_params(rng, layer_sizes)
    scale = n / b
    steps_per_epoch = int(np.ceil(n / b))
    pos = 0
    k = 0
    for _ in range(schedule.epochs):
        for _ in range(steps_per_epoch):
            idx = np.arange(pos, pos + b) % n
            grad = backward(params, X[idx], Y[idx], w_obs[idx], lam, w_p)
            if not all(np.all(np.isfinite(g)) for g in (grad.W0, grad.W1, grad.W2)):
                raise TrainingDivergedError(
                    f"non-finite gradient at step {k} (step size too large)"
                )
            params = _step(params, grad, schedule.step_size(k) * scale)
            pos = (pos + b) % n
            k += 1
    return params


def evaluate_accuracy(params: MlpParams, X: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of examples whose argmax class matches the label.

    Ties resolve to the lowest class index.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("test set must be non-empty")
    predicted = np.argmax(_logits(params, X), axis=1)
    return float(np.mean(predicted == labels))
