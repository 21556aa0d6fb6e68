"""Pure numpy implementation of the product-integration kernels.

Every function here has a twin in ``_kernels.pyx`` with identical
semantics; :mod:`katufrac.kernels` picks one at import time.

All weights are *unscaled*: they integrate ``(u_j - u)**(alpha - 1)``
against the piecewise-linear interpolant of the samples, without the
``rho**-alpha / Gamma(alpha)`` prefactor.
"""

import numpy as np

# cells thinner than this fraction of their distance to the target use the
# power series; 0.125**19 < 1e-17 so NTERMS terms reach round-off
SERIES_CUT = 0.125
NTERMS = 20
TINY = 1e-300


def _series_coefficients(alpha):
    c = np.empty(NTERMS)
    c[0] = 1.0
    for m in range(NTERMS - 1):
        c[m + 1] = c[m] * (m + 1 - alpha) / (m + 1)
    m = np.arange(NTERMS)
    # (left-node coefficient, right-node coefficient) of x**(m+1)
    return c / ((m + 1) * (m + 2)), c / (m + 2)


def cell_moments(far, near, width, alpha):
    """Moments of the Abel kernel over cells ``[u_i, u_{i+1}]``.

    ``far = u_j - u_i``, ``near = u_j - u_{i+1}``, ``width = u_{i+1} - u_i``.
    Returns ``(left, right)``: the weights landing on ``u_i`` and
    ``u_{i+1}`` respectively.
    """
    far = np.asarray(far, dtype=float)
    near = np.asarray(near, dtype=float)
    width = np.asarray(width, dtype=float)
    left = np.zeros_like(far)
    right = np.zeros_like(far)
    live = far >= TINY
    if not live.any():
        return left, right

    A = far[live]
    x = np.minimum(width[live] / A, 1.0)
    scale = A**alpha
    lw = np.empty_like(A)
    rw = np.empty_like(A)

    small = x < SERIES_CUT
    if small.any():
        cl, cr = _series_coefficients(alpha)
        xs = x[small]
        # Horner in x, then one extra factor x for the x**(m+1) offset
        pl = np.zeros_like(xs)
        pr = np.zeros_like(xs)
        for m in range(NTERMS - 1, -1, -1):
            pl = pl * xs + cl[m]
            pr = pr * xs + cr[m]
        lw[small] = scale[small] * xs * pl
        rw[small] = scale[small] * xs * pr

    big = ~small
    if big.any():
        xb = x[big]
        r = np.maximum(near[live][big], 0.0) / A[big]
        with np.errstate(divide="ignore"):
            E = np.expm1(alpha * np.log(r))
        denom = alpha * (alpha + 1.0)
        lw[big] = scale[big] / xb * (alpha * xb + r * E) / denom
        rw[big] = scale[big] / xb * (-E * (1.0 + alpha * xb) - alpha * xb) / denom

    left[live] = lw
    right[live] = rw
    return left, right


def weight_row(u, j, alpha):
    """Unscaled weights ``w_0..w_j`` for the target node ``u[j]``."""
    u = np.asarray(u, dtype=float)
    w = np.zeros(j + 1)
    if j == 0:
        return w
    target = u[j]
    left, right = cell_moments(target - u[:j], target - u[1 : j + 1], np.diff(u[: j + 1]), alpha)
    w[:j] += left
    w[1:] += right
    return w


def weight_matrix(u, alpha):
    """Dense lower-triangular matrix whose row ``j`` is ``weight_row(u, j)``."""
    u = np.asarray(u, dtype=float)
    n1 = u.size
    W = np.zeros((n1, n1))
    for j in range(1, n1):
        W[j, : j + 1] = weight_row(u, j, alpha)
    return W


def integrate_all(u, values, alpha):
    """Unscaled product-integration sums at every node of ``u``."""
    u = np.asarray(u, dtype=float)
    values = np.asarray(values, dtype=float)
    out = np.zeros(u.size)
    for j in range(1, u.size):
        out[j] = weight_row(u, j, alpha) @ values[: j + 1]
    return out
