"""Jitted inner loop for the trend-filter operator splitting.

One call runs up to ``max_iter`` fixed-rho iterations in place on the
(beta_t, z, u) state: banded SPD solve of (I + rho D~' D~) via the
precomputed Cholesky band, elementwise soft-threshold of the auxiliary
variable at lam/rho, scaled dual update, and the residual norms.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def admm_iterations(y_t, inv_w, st, cb, inv_diag, rho, lam, beta_t, z, u, ptol, dtol, max_iter):
    p = y_t.shape[0]
    mband = cb.shape[0] - 1
    m = z.shape[0]
    order = p - m
    thr = lam / rho
    q = np.empty(p)
    rhs = np.empty(p)
    dz = np.empty(m)
    primal = np.inf
    dual = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        # rhs = y_t + rho * D'(z - u) / w
        for j in range(p):
            acc = 0.0
            i0 = j - order if j - order > 0 else 0
            i1 = j if j < m - 1 else m - 1
            for i in range(i0, i1 + 1):
                acc += st[j - i] * (z[i] - u[i])
            rhs[j] = y_t[j] + rho * acc * inv_w[j]
        # (I + rho D~'D~) beta_t = rhs via the banded Cholesky factor U'U
        for i in range(p):
            acc = rhs[i]
            j0 = i - mband if i - mband > 0 else 0
            for j in range(j0, i):
                acc -= cb[mband + j - i, i] * q[j]
            q[i] = acc * inv_diag[i]
        for i in range(p - 1, -1, -1):
            acc = q[i]
            j1 = i + mband if i + mband < p - 1 else p - 1
            for j in range(i + 1, j1 + 1):
                acc -= cb[mband + i - j, j] * beta_t[j]
            beta_t[i] = acc * inv_diag[i]
        # soft-threshold z, dual step, primal residual
        primal_sq = 0.0
        for i in range(m):
            acc = 0.0
            for j in range(order + 1):
                acc += st[j] * beta_t[i + j] * inv_w[i + j]
            v = acc + u[i]
            if v > thr:
                z_new = v - thr
            elif v < -thr:
                z_new = v + thr
            else:
                z_new = 0.0
            dz[i] = z_new - z[i]
            z[i] = z_new
            u[i] = u[i] + acc - z_new
            r = acc - z_new
            primal_sq += r * r
        # dual residual = || rho * D'(z - z_old) / w ||
        dual_sq = 0.0
        for j in range(p):
            acc = 0.0
            i0 = j - order if j - order > 0 else 0
            i1 = j if j < m - 1 else m - 1
            for i in range(i0, i1 + 1):
                acc += st[j - i] * dz[i]
            t = rho * acc * inv_w[j]
            dual_sq += t * t
        primal = np.sqrt(primal_sq)
        dual = np.sqrt(dual_sq)
        if primal <= ptol and dual <= dtol:
            return it, primal, dual, True
    return it, primal, dual, False
