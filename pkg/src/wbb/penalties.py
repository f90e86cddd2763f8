"""Penalty specifications and discrete-derivative penalty matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .validation import check_nonnegative, check_positive_int, check_vector

L1 = "l1"
GENERALIZED_L1 = "generalized_l1"
SQUARED_L2_MATRICES = "squared_l2_matrices"
FAMILIES = (L1, GENERALIZED_L1, SQUARED_L2_MATRICES)


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family and regularization strength (lambda applied by caller).

    ``order`` is the difference order of the generalized-L1 family and is
    ignored by the other families.
    """

    family: str
    lam: float = 0.0
    order: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        check_nonnegative(self.lam, "lam")
        if self.family == GENERALIZED_L1:
            if self.order is None:
                raise ValueError("generalized_l1 requires a difference order")
            check_positive_int(self.order, "order")


@dataclass(frozen=True)
class DiffMatrix:
    """Banded discrete-difference operator of a given order.

    Rows are the same integer stencil shifted across the coordinates, so the
    matrix is stored as that stencil (exact integers) and expanded on demand.
    """

    order: int
    p: int
    stencil: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.p - self.order, self.p)

    def apply(self, beta: np.ndarray) -> np.ndarray:
        """D @ beta via correlation with the stencil."""
        return np.convolve(beta, self.stencil[::-1].astype(np.float64), mode="valid")

    def apply_t(self, v: np.ndarray) -> np.ndarray:
        """D.T @ v via convolution with the stencil."""
        return np.convolve(v, self.stencil.astype(np.float64), mode="full")

    def to_sparse(self) -> sparse.spmatrix:
        rows, p = self.shape
        return sparse.diags(
            [float(c) for c in self.stencil],
            offsets=np.arange(self.order + 1),
            shape=(rows, p),
            format="csr",
        )

    def toarray(self) -> np.ndarray:
        return self.to_sparse().toarray()


def diff_stencil(order: int) -> np.ndarray:
    """Integer stencil of the order-m difference: (-1)^(m-j) C(m, j), j=0..m.

    Built by repeated convolution with (-1, 1), i.e. the row pattern of the
    product recursion that defines higher-order difference matrices.
    """
    check_positive_int(order, "order")
    stencil = np.array([-1, 1], dtype=np.int64)
    for _ in range(order - 1):
        stencil = np.convolve(stencil, np.array([-1, 1], dtype=np.int64))
    return stencil


def build_diff_matrix(order: int, p: int) -> DiffMatrix:
    """Discrete difference operator of the given order on length-p signals."""
    check_positive_int(order, "order")
    check_positive_int(p, "p")
    if p <= order:
        raise ValueError(f"p must exceed order (got p={p}, order={order}); the penalty is empty")
    return DiffMatrix(order=order, p=p, stencil=diff_stencil(order))


def penalty_value(spec: PenaltySpec, theta) -> float:
    """Unscaled penalty phi(theta); the caller multiplies by lambda.

    L1 takes a coefficient vector, generalized L1 an ordered signal vector,
    and the squared-L2 family a list of weight matrices (sum of squared
    Frobenius norms).
    """
    if spec.family == SQUARED_L2_MATRICES:
        if not isinstance(theta, (list, tuple)):
            raise ValueError("squared_l2_matrices expects a list of weight matrices")
        return float(sum(np.sum(np.square(np.asarray(w, dtype=np.float64))) for w in theta))
    beta = check_vector(theta, "theta")
    if spec.family == L1:
        return float(np.sum(np.abs(beta)))
    D = build_diff_matrix(spec.order, beta.size)
    return float(np.sum(np.abs(D.apply(beta))))
