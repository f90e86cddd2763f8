"""Closed forms for the normal-means lasso problem under random reweighting.

The scalar problem min_theta w1*(y-theta)^2/2 + lam*w2*|theta| has an exact
soft-threshold solution, which makes it the reference case for validating
the bootstrap machinery: the Monte Carlo mean and the exact zero-mass law
both have independent quadrature/analytic counterparts here.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import log_ndtr

from .validation import QuadratureError, check_positive

_QUAD_ABS_TOL = 1e-10


def soft_threshold(z: float, threshold: float) -> float:
    """Scalar soft-thresholding: shrink z toward zero by the threshold."""
    if z > threshold:
        return z - threshold
    if z < -threshold:
        return z + threshold
    return 0.0


def soft_threshold_wbb(y: float, lam: float, w1: float, w2: float) -> float:
    """Exact minimizer of w1*(y-theta)^2/2 + lam*w2*|theta|.

    The boundary |y| == lam*w2/w1 maps to 0 (ties go to the shrunk branch).
    """
    check_positive(lam, "lam")
    check_positive(w1, "w1")
    check_positive(w2, "w2")
    return soft_threshold(float(y), lam * w2 / w1)


def exact_posterior_mean(y: float, lam: float) -> float:
    """Posterior mean under N(theta, 1) likelihood and Laplace(0, 1/lam) prior.

    Uses E(theta|y) = y + lam * (F(y) - F(-y)) / (F(y) + F(-y)) with
    F(y) = exp(y) * Phi(-y - lam), evaluated in log space so it stays
    accurate for |y| well beyond the overflow point of the direct form:
    the ratio equals tanh((log F(y) - log F(-y)) / 2).
    """
    check_positive(lam, "lam")
    y = float(y)
    log_f_pos = y + log_ndtr(-y - lam)
    log_f_neg = -y + log_ndtr(y - lam)
    return y + lam * float(np.tanh(0.5 * (log_f_pos - log_f_neg)))


def wbb_mean_oracle(y: float, lam: float) -> float:
    """Expected bootstrap solution E[s(y, lam * w2/w1)] by adaptive quadrature.

    The ratio r = w2/w1 of two independent Exp(1) weights has density
    1/(1+r)^2 on (0, inf). Substituting r = t/(1-t) turns the heavy-tailed
    integral into int_0^1 s(y, lam * t/(1-t)) dt, which is integrated with
    a breakpoint at the soft-threshold kink. Odd symmetry in y is applied
    exactly.
    """
    check_positive(lam, "lam")
    y = float(y)
    if y == 0.0:
        return 0.0
    a = abs(y)

    def integrand(t: float) -> float:
        return soft_threshold(a, lam * t / (1.0 - t))

    kink = a / (a + lam)
    value, abserr = quad(
        integrand, 0.0, 1.0, points=[kink], epsabs=_QUAD_ABS_TOL, epsrel=0.0, limit=200
    )
    if abserr > 100 * _QUAD_ABS_TOL:
        raise QuadratureError(
            f"bootstrap mean quadrature at (y={y}, lam={lam}) reached abserr={abserr:g}"
        )
    return float(np.copysign(value, y))


def zero_probability(y: float, lam: float) -> float:
    """Exact P(bootstrap draw is 0) = lam / (lam + |y|).

    Follows from the threshold condition |y| <= lam * w2/w1 and the ratio
    law P(w2/w1 >= t) = 1/(1+t).
    """
    check_positive(lam, "lam")
    return lam / (lam + abs(float(y)))
