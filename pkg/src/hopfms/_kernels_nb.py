"""Numba implementations of the hot numeric loops.

The public surface (re-exported through :mod:`hopfms.kernels`) is:
``field_eval_batch``, ``integrate_phi_batch``, ``integrate_phi_dense``,
``min_pair_ratio``, ``min_segment_clearance``.  The pure-numpy twin lives
in ``_kernels_np`` with identical signatures.
"""

import numpy as np
from numba import njit

HALF_PI = np.pi / 2.0


@njit(cache=True, inline="always")
def _cutoff(rho, ci, co):
    # quintic smoothstep, 1 for rho <= ci, 0 for rho >= co
    if rho <= ci:
        return 1.0
    if rho >= co:
        return 0.0
    s = (rho - ci) / (co - ci)
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


@njit(cache=True, inline="always")
def _phi_rhs(x1, x2, x3, raw, ci, co):
    r = np.sqrt(x1 * x1 + x2 * x2 + x3 * x3)
    if r <= 4.0:
        v1 = 1.0 - (r - 4.0) ** 2 / 9.0
    else:
        v1 = 1.0
    if r <= 2.0:
        v2 = -x2
        v3 = x3
    elif r <= 4.0:
        w = 0.5 * (np.sin(HALF_PI * (r - 3.0)) - 1.0)
        v2 = x2 * w
        v3 = -x3 * w
    else:
        v2 = 0.0
        v3 = 0.0
    if not raw:
        chi = _cutoff(np.sqrt(x2 * x2 + x3 * x3), ci, co)
        v1 = 1.0 + chi * (v1 - 1.0)
        v2 = chi * v2
        v3 = chi * v3
    return v1, v2, v3


@njit(cache=True)
def field_eval_batch(X, raw, ci, co):
    n = X.shape[0]
    out = np.empty((n, 3))
    for k in range(n):
        v1, v2, v3 = _phi_rhs(X[k, 0], X[k, 1], X[k, 2], raw, ci, co)
        out[k, 0] = v1
        out[k, 1] = v2
        out[k, 2] = v3
    return out


@njit(cache=True, inline="always")
def _rk4(x1, x2, x3, dt, raw, ci, co):
    a1, a2, a3 = _phi_rhs(x1, x2, x3, raw, ci, co)
    b1, b2, b3 = _phi_rhs(x1 + 0.5 * dt * a1, x2 + 0.5 * dt * a2, x3 + 0.5 * dt * a3, raw, ci, co)
    c1, c2, c3 = _phi_rhs(x1 + 0.5 * dt * b1, x2 + 0.5 * dt * b2, x3 + 0.5 * dt * b3, raw, ci, co)
    d1, d2, d3 = _phi_rhs(x1 + dt * c1, x2 + dt * c2, x3 + dt * c3, raw, ci, co)
    s = dt / 6.0
    return (
        x1 + s * (a1 + 2.0 * (b1 + c1) + d1),
        x2 + s * (a2 + 2.0 * (b2 + c2) + d2),
        x3 + s * (a3 + 2.0 * (b3 + c3) + d3),
    )


@njit(cache=True)
def integrate_phi_batch(X, t, h, raw, ci, co):
    n_steps = max(1, int(round(abs(t) / h)))
    dt = t / n_steps
    n = X.shape[0]
    out = np.empty((n, 3))
    for k in range(n):
        x1, x2, x3 = X[k, 0], X[k, 1], X[k, 2]
        for _ in range(n_steps):
            x1, x2, x3 = _rk4(x1, x2, x3, dt, raw, ci, co)
        out[k, 0] = x1
        out[k, 1] = x2
        out[k, 2] = x3
    return out


@njit(cache=True)
def integrate_phi_dense(x0, t, n_save, h, raw, ci, co):
    steps_per_save = max(1, int(round(abs(t) / (n_save * h))))
    dt = t / (n_save * steps_per_save)
    out = np.empty((n_save + 1, 3))
    x1, x2, x3 = x0[0], x0[1], x0[2]
    out[0, 0], out[0, 1], out[0, 2] = x1, x2, x3
    for k in range(n_save):
        for _ in range(steps_per_save):
            x1, x2, x3 = _rk4(x1, x2, x3, dt, raw, ci, co)
        out[k + 1, 0], out[k + 1, 1], out[k + 1, 2] = x1, x2, x3
    return out


@njit(cache=True)
def min_pair_ratio(P, cum, w, ratio):
    """Minimum of d_ij / (w_i + w_j) over candidate station pairs.

    A pair is a candidate when its straight distance is below ``ratio``
    times its arc separation along the curve; that filters out pairs that
    are close simply because they are consecutive stations.
    """
    n = P.shape[0]
    best = np.inf
    bi, bj = -1, -1
    for i in range(n):
        for j in range(i + 2, n):
            dx = P[i, 0] - P[j, 0]
            dy = P[i, 1] - P[j, 1]
            dz = P[i, 2] - P[j, 2]
            d = np.sqrt(dx * dx + dy * dy + dz * dz)
            if d >= ratio * (cum[j] - cum[i]):
                continue
            q = d / (w[i] + w[j])
            if q < best:
                best = q
                bi, bj = i, j
    return best, bi, bj


@njit(cache=True, inline="always")
def _seg_seg_dist(P, i, j, dim):
    # closest distance between segments [P_i, P_{i+1}] and [P_j, P_{j+1}]
    a2 = 0.0
    e2 = 0.0
    f = 0.0
    c = 0.0
    b = 0.0
    for k in range(dim):
        d1 = P[i + 1, k] - P[i, k]
        d2 = P[j + 1, k] - P[j, k]
        r = P[i, k] - P[j, k]
        a2 += d1 * d1
        e2 += d2 * d2
        f += d2 * r
        c += d1 * r
        b += d1 * d2
    if a2 == 0.0 and e2 == 0.0:
        s = 0.0
        t = 0.0
    elif a2 == 0.0:
        s = 0.0
        t = min(1.0, max(0.0, f / e2))
    else:
        if e2 == 0.0:
            t = 0.0
            s = min(1.0, max(0.0, -c / a2))
        else:
            denom = a2 * e2 - b * b
            if denom > 0.0:
                s = min(1.0, max(0.0, (b * f - c * e2) / denom))
            else:
                s = 0.0
            t = (b * s + f) / e2
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a2))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a2))
    dd = 0.0
    for k in range(dim):
        d1 = P[i + 1, k] - P[i, k]
        d2 = P[j + 1, k] - P[j, k]
        diff = P[i, k] + s * d1 - P[j, k] - t * d2
        dd += diff * diff
    return np.sqrt(dd)


@njit(cache=True)
def min_segment_clearance(E, cum, ratio):
    """Minimum clearance between non-adjacent segments of a closed polyline.

    ``E`` holds N+1 points (last = first) in a Euclidean embedding, ``cum``
    the N+1 cumulative arc lengths.  Pairs whose straight distance is at
    least ``ratio`` times their along-curve separation are skipped; a round
    curve therefore reports +inf.  The reported value is a sampling-scale
    certificate: the segment distance minus half the two segment lengths,
    so an under-resolved clasp shows up as negative clearance.
    Returns (min_clearance, i, j).
    """
    n = E.shape[0] - 1
    total = cum[n]
    dim = E.shape[1]
    best = np.inf
    bi, bj = -1, -1
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            d = _seg_seg_dist(E, i, j, dim)
            sep = cum[j] - cum[i + 1]
            back = total - (cum[j + 1] - cum[i])
            if back < sep:
                sep = back
            if d >= ratio * sep:
                continue
            cert = d - 0.5 * ((cum[i + 1] - cum[i]) + (cum[j + 1] - cum[j]))
            if cert < best:
                best = cert
                bi, bj = i, j
    return best, bi, bj
