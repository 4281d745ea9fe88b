"""Pure-numpy fallback for the hot loops in ``_kernels_nb``.

Same signatures and semantics; selected by setting the environment
variable ``HOPFMS_DISABLE_NUMBA=1`` before import.
"""

import numpy as np

HALF_PI = np.pi / 2.0


def _cutoff_arr(rho, ci, co):
    s = np.clip((rho - ci) / (co - ci), 0.0, 1.0)
    return 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


def field_eval_batch(X, raw, ci, co):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    r = np.linalg.norm(X, axis=1)
    x2 = X[:, 1]
    x3 = X[:, 2]
    v1 = np.where(r <= 4.0, 1.0 - (r - 4.0) ** 2 / 9.0, 1.0)
    w = 0.5 * (np.sin(HALF_PI * (r - 3.0)) - 1.0)
    v2 = np.where(r <= 2.0, -x2, np.where(r <= 4.0, x2 * w, 0.0))
    v3 = np.where(r <= 2.0, x3, np.where(r <= 4.0, -x3 * w, 0.0))
    if not raw:
        chi = _cutoff_arr(np.hypot(x2, x3), ci, co)
        v1 = 1.0 + chi * (v1 - 1.0)
        v2 = chi * v2
        v3 = chi * v3
    return np.stack([v1, v2, v3], axis=1)


def _rk4_step(X, dt, raw, ci, co):
    k1 = field_eval_batch(X, raw, ci, co)
    k2 = field_eval_batch(X + 0.5 * dt * k1, raw, ci, co)
    k3 = field_eval_batch(X + 0.5 * dt * k2, raw, ci, co)
    k4 = field_eval_batch(X + dt * k3, raw, ci, co)
    return X + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def integrate_phi_batch(X, t, h, raw, ci, co):
    X = np.atleast_2d(np.asarray(X, dtype=float)).copy()
    n_steps = max(1, int(round(abs(t) / h)))
    dt = t / n_steps
    for _ in range(n_steps):
        X = _rk4_step(X, dt, raw, ci, co)
    return X


def integrate_phi_dense(x0, t, n_save, h, raw, ci, co):
    steps_per_save = max(1, int(round(abs(t) / (n_save * h))))
    dt = t / (n_save * steps_per_save)
    out = np.empty((n_save + 1, 3))
    X = np.asarray(x0, dtype=float).reshape(1, 3).copy()
    out[0] = X[0]
    for k in range(n_save):
        for _ in range(steps_per_save):
            X = _rk4_step(X, dt, raw, ci, co)
        out[k + 1] = X[0]
    return out


def min_pair_ratio(P, cum, w, ratio):
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    best = np.inf
    bi, bj = -1, -1
    for i in range(n - 2):
        d = np.linalg.norm(P[i + 2 :] - P[i], axis=1)
        cand = d < ratio * (cum[i + 2 :] - cum[i])
        if not np.any(cand):
            continue
        q = d[cand] / (w[i] + w[i + 2 :][cand])
        k = int(np.argmin(q))
        if q[k] < best:
            best = float(q[k])
            bi = i
            bj = i + 2 + int(np.nonzero(cand)[0][k])
    return best, bi, bj


def _seg_seg_dist_vec(p1, d1, p2, d2):
    # clamped closest distance between segment (p1, p1+d1) and rows (p2, p2+d2)
    r = p1 - p2
    a = float(d1 @ d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = r @ d1
    b = d2 @ d1
    e_safe = np.where(e > 0.0, e, 1.0)
    if a == 0.0:
        s = np.zeros_like(e)
        t = np.clip(f / e_safe, 0.0, 1.0)
    else:
        denom = a * e - b * b
        s = np.where(denom > 0.0, np.clip((b * f - c * e) / np.where(denom > 0, denom, 1.0), 0.0, 1.0), 0.0)
        t = (b * s + f) / e_safe
        s = np.where(t < 0.0, np.clip(-c / a, 0.0, 1.0), np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s))
        t = np.clip(t, 0.0, 1.0)
    diff = p1[None, :] + np.outer(s, d1) - p2 - t[:, None] * d2
    return np.linalg.norm(diff, axis=1)


def min_segment_clearance(E, cum, ratio):
    E = np.asarray(E, dtype=float)
    n = E.shape[0] - 1
    total = cum[n]
    best = np.inf
    bi, bj = -1, -1
    D = np.diff(E, axis=0)
    for i in range(n - 2):
        j0 = i + 2
        j1 = n - 1 if i == 0 else n
        if j0 >= j1:
            continue
        d = _seg_seg_dist_vec(E[i], D[i], E[j0:j1], D[j0:j1])
        sep = cum[j0:j1] - cum[i + 1]
        back = total - (cum[j0 + 1 : j1 + 1] - cum[i])
        sep = np.minimum(sep, back)
        cand = d < ratio * sep
        if not np.any(cand):
            continue
        seg_i = cum[i + 1] - cum[i]
        seg_j = cum[j0 + 1 : j1 + 1] - cum[j0:j1]
        cert = np.where(cand, d - 0.5 * (seg_i + seg_j), np.inf)
        k = int(np.argmin(cert))
        if cert[k] < best:
            best = float(cert[k])
            bi, bj = i, j0 + k
    return best, bi, bj
