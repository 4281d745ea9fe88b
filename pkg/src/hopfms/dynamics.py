"""Model dynamics on the cylinder C = {x2^2 + x3^2 <= 4}.

Contains the linear saddle models with their product neighborhoods and
foliations, the unit translation flow g^t, and the two-saddle flow phi^t
whose time-1 map drives the realization.

The published piecewise vector field is not the pure translation (1, 0, 0)
near the cylinder boundary (e.g. its value at (0, 2, 0) is (5/9, -2, 0)),
so gluing its time-1 map into the ambient contraction along the tube wall
would be discontinuous.  The field used for realization therefore damps
the deviation from (1, 0, 0) with a radial quintic cutoff that is 1 for
rho <= cutoff_inner and 0 for rho >= cutoff_outer.  Both saddles, their
linearizations and the heteroclinic axis segment live at rho = 0 and are
untouched; the raw field stays available for the negative-control mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from hopfms import kernels
from hopfms.geometry import DomainError

P1 = np.array([-1.0, 0.0, 0.0])
P2 = np.array([1.0, 0.0, 0.0])

#: analytic Jacobians of the field at the saddles (diagonal)
SADDLE_JACOBIAN = {"P1": np.array([-2.0 / 3.0, -1.0, 1.0]), "P2": np.array([2.0 / 3.0, -1.0, 1.0])}


def linear_saddle(i, x):
    """The linear saddle models: a_1 = (2x1, x2/2, x3/2), a_2 its inverse."""
    x = np.asarray(x, dtype=float)
    if i == 1:
        return np.array([2.0 * x[0], 0.5 * x[1], 0.5 * x[2]])
    if i == 2:
        return np.array([0.5 * x[0], 2.0 * x[1], 2.0 * x[2]])
    raise ValueError(f"saddle model index must be 1 or 2, got {i}")


@dataclass(frozen=True)
class ModelNeighborhood:
    """Saddle model neighborhood, defined by a literal product inequality."""

    index: int
    size: float = 1.0

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ValueError("index must be 1 or 2")
        if not 0.0 < self.size <= 1.0:
            raise ValueError("size must lie in (0, 1]")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if self.index == 1:
            return bool(x[0] ** 2 * (x[1] ** 2 + x[2] ** 2) < self.size)
        return bool((x[0] ** 2 + x[1] ** 2) * x[2] ** 2 < self.size)


@dataclass(frozen=True)
class FoliationLeaf:
    """A leaf of one of the transversal model foliations, fixed by its anchors."""

    index: int
    kind: str  # "u" or "s"
    anchors: tuple

    def contains(self, x, tol=0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if self.index == 1:
            coords = (x[1], x[2]) if self.kind == "u" else (x[0],)
        else:
            coords = (x[2],) if self.kind == "u" else (x[0], x[1])
        return all(abs(c - a) <= tol for c, a in zip(coords, self.anchors))


def leaf_through(i, kind, x) -> FoliationLeaf:
    """The unique model-foliation leaf through x."""
    if kind not in ("u", "s"):
        raise ValueError("kind must be 'u' or 's'")
    x = np.asarray(x, dtype=float)
    if i == 1:
        anchors = (x[1], x[2]) if kind == "u" else (x[0],)
    elif i == 2:
        anchors = (x[2],) if kind == "u" else (x[0], x[1])
    else:
        raise ValueError("index must be 1 or 2")
    return FoliationLeaf(i, kind, tuple(float(a) for a in anchors))


def flow_g(x, t):
    """Unit-speed translation flow along the cylinder axis."""
    x = np.asarray(x, dtype=float)
    return x + np.array([float(t), 0.0, 0.0])


@dataclass(frozen=True)
class PhiField:
    """The two-saddle field on C, with the radial cutoff gap-fix.

    ``raw=True`` evaluates the published piecewise formulas verbatim;
    realization always uses the smoothed variant.
    """

    cutoff_inner: float = 1.2
    cutoff_outer: float = 1.8
    raw: bool = False

    def __post_init__(self):
        if not 0.0 < self.cutoff_inner < self.cutoff_outer < 2.0:
            raise ValueError("cutoffs must satisfy 0 < inner < outer < 2")


def in_cylinder(x, tol=1e-9) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x[1] ** 2 + x[2] ** 2 <= 4.0 + tol)


def phi_velocity(field: PhiField, x, raw=None):
    """Field value at a single cylinder point."""
    x = np.asarray(x, dtype=float)
    if not in_cylinder(x):
        raise DomainError("point outside the cylinder")
    use_raw = field.raw if raw is None else raw
    return kernels.field_eval_batch(x.reshape(1, 3), use_raw, field.cutoff_inner, field.cutoff_outer)[0]


def phi_velocity_many(field: PhiField, X, raw=None):
    use_raw = field.raw if raw is None else raw
    return kernels.field_eval_batch(np.asarray(X, dtype=float), use_raw, field.cutoff_inner, field.cutoff_outer)


def flow_phi(field: PhiField, x, t, h=1e-3):
    """Time-t map of the flow by fixed-step 4th-order integration."""
    x = np.asarray(x, dtype=float)
    if not in_cylinder(x):
        raise DomainError("point outside the cylinder")
    if t == 0.0:
        return x.copy()
    return kernels.integrate_phi_batch(x.reshape(1, 3), float(t), h, field.raw, field.cutoff_inner, field.cutoff_outer)[0]


def flow_phi_many(field: PhiField, X, t, h=1e-3):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if t == 0.0:
        return X.copy()
    return kernels.integrate_phi_batch(X, float(t), h, field.raw, field.cutoff_inner, field.cutoff_outer)


def flow_phi_dense(field: PhiField, x, t, n_save, h=1e-3):
    """Trajectory with n_save+1 equispaced samples, start and end included."""
    x = np.asarray(x, dtype=float)
    return kernels.integrate_phi_dense(x, float(t), int(n_save), h, field.raw, field.cutoff_inner, field.cutoff_outer)


def phi(field: PhiField, x, h=1e-3):
    """Time-1 map."""
    return flow_phi(field, x, 1.0, h)


def phi_inverse(field: PhiField, x, h=1e-3):
    """Inverse of the time-1 map, by backward integration."""
    return flow_phi(field, x, -1.0, h)


def saddle_linearization(field: PhiField, which: str):
    """Analytic eigenvalues of the time-1 map differential at a saddle.

    The field is diagonal to first order on the axis (diag(-2/3, -1, 1) at
    P1 and diag(2/3, -1, 1) at P2, unchanged by the cutoff), so the time-1
    map eigenvalues are the exponentials of those rates.
    """
    if which not in SADDLE_JACOBIAN:
        raise ValueError("which must be 'P1' or 'P2'")
    return np.exp(SADDLE_JACOBIAN[which])


def grid_zero_census(field: PhiField, resolution=0.05, x1_max=6.0):
    """Count connected clusters of grid cells that may contain a field zero.

    A cell is a candidate when each velocity component attains both signs
    (or zero) on its eight corners; candidates are restricted to cells
    inside the cylinder.  Returns (number of clusters, cluster centers).
    """
    n1 = int(round(2 * x1_max / resolution)) + 1
    n23 = int(round(4.0 / resolution)) + 1
    g1 = np.linspace(-x1_max, x1_max, n1)
    g23 = np.linspace(-2.0, 2.0, n23)
    X1, X2, X3 = np.meshgrid(g1, g23, g23, indexing="ij")
    pts = np.stack([X1.ravel(), X2.ravel(), X3.ravel()], axis=1)
    V = kernels.field_eval_batch(pts, field.raw, field.cutoff_inner, field.cutoff_outer)
    V = V.reshape(n1, n23, n23, 3)

    def corner_reduce(A, op):
        B = op(A[:-1], A[1:])
        B = op(B[:, :-1], B[:, 1:])
        return op(B[:, :, :-1], B[:, :, 1:])

    cand = np.ones((n1 - 1, n23 - 1, n23 - 1), dtype=bool)
    for comp in range(3):
        lo = corner_reduce(V[..., comp], np.minimum)
        hi = corner_reduce(V[..., comp], np.maximum)
        cand &= (lo <= 0.0) & (hi >= 0.0)
    rho2 = X2[:-1, :-1, :-1] ** 2 + X3[:-1, :-1, :-1] ** 2
    cand &= rho2 <= 4.0

    labels, n_clusters = ndimage.label(cand)
    centers = []
    for k in range(1, n_clusters + 1):
        idx = np.argwhere(labels == k).mean(axis=0)
        centers.append(
            np.array(
                [
                    g1[0] + (idx[0] + 0.5) * resolution,
                    g23[0] + (idx[1] + 0.5) * resolution,
                    g23[0] + (idx[2] + 0.5) * resolution,
                ]
            )
        )
    return n_clusters, centers


def branch_continuity_residual(field: PhiField, n_samples=1000, seed=0):
    """Worst mismatch of the raw piecewise branches across the seams r=2, r=4."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for r_seam in (2.0, 4.0):
        u = rng.normal(size=(n_samples, 3))
        u /= np.linalg.norm(u, axis=1)[:, None]
        pts = r_seam * u
        # keep samples inside the cylinder
        pts = pts[np.hypot(pts[:, 1], pts[:, 2]) <= 2.0]
        inner = _branch_value(pts, r_seam, side=-1)
        outer = _branch_value(pts, r_seam, side=+1)
        if len(pts):
            worst = max(worst, float(np.max(np.abs(inner - outer))))
    return worst


def _branch_value(pts, r_seam, side):
    x2, x3 = pts[:, 1], pts[:, 2]
    r = np.full(len(pts), r_seam)
    if r_seam == 2.0:
        if side < 0:
            v1 = 1.0 - (r - 4.0) ** 2 / 9.0
            v2 = -x2
            v3 = x3
        else:
            w = 0.5 * (np.sin(np.pi / 2.0 * (r - 3.0)) - 1.0)
            v1 = 1.0 - (r - 4.0) ** 2 / 9.0
            v2 = x2 * w
            v3 = -x3 * w
    else:
        if side < 0:
            w = 0.5 * (np.sin(np.pi / 2.0 * (r - 3.0)) - 1.0)
            v1 = 1.0 - (r - 4.0) ** 2 / 9.0
            v2 = x2 * w
            v3 = -x3 * w
        else:
            v1 = np.ones(len(pts))
            v2 = np.zeros(len(pts))
            v3 = np.zeros(len(pts))
    return np.stack([v1, v2, v3], axis=1)
