"""Elementary maps: the contraction of R^3, the orbit-space projection to
S^2 x S^1, stereographic charts of S^3, and the product metric.

All functions accept plain length-3 numpy arrays (or anything array-like)
and are pure; batch variants take (N, 3) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: default tolerance for closed-form maps
TOL = 1e-12

NORTH_POLE = np.array([0.0, 0.0, 0.0, 1.0])


class DomainError(ValueError):
    """Input outside the mathematical domain of a map."""


@dataclass(frozen=True)
class OrbitSpacePoint:
    """A point of S^2 x S^1: unit vector ``u`` and circle coordinate ``c`` in [0, 1)."""

    u: np.ndarray
    c: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise DomainError(f"sphere factor not unit: |u| = {np.linalg.norm(u)}")
        if not (0.0 <= self.c < 1.0):
            raise DomainError(f"circle coordinate {self.c} outside [0, 1)")
        object.__setattr__(self, "u", u)

    def __iter__(self):
        yield self.u
        yield self.c


def contract_a(x):
    """The global contraction x -> x/2."""
    return np.asarray(x, dtype=float) / 2.0


def expand_a(x):
    """Inverse of the contraction, x -> 2x."""
    return 2.0 * np.asarray(x, dtype=float)


def project_p(x) -> OrbitSpacePoint:
    """Project a nonzero point of R^3 to the orbit space S^2 x S^1.

    The sphere factor is the full unit vector x/|x|; the circle factor is
    log2|x| mod 1, so the projection is constant on orbits of the
    contraction.
    """
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if r == 0.0 or not np.isfinite(r):
        raise DomainError("projection undefined at the origin")
    return OrbitSpacePoint(x / r, float(np.log2(r) % 1.0))


def project_p_many(X):
    """Vectorized projection: (N, 3) -> ((N, 3) unit vectors, (N,) circle coords)."""
    X = np.asarray(X, dtype=float)
    r = np.linalg.norm(X, axis=-1)
    if np.any(r == 0.0):
        raise DomainError("projection undefined at the origin")
    return X / r[..., None], np.log2(r) % 1.0


def stereographic(x):
    """Chart of S^3 minus the north pole: x -> (2x, |x|^2 - 1) / (|x|^2 + 1)."""
    x = np.asarray(x, dtype=float)
    s = x @ x
    return np.append(2.0 * x, s - 1.0) / (s + 1.0)


def stereographic_inv(y):
    """Inverse chart; rejected at the north pole."""
    y = np.asarray(y, dtype=float)
    if 1.0 - y[3] <= 0.0:
        raise DomainError("inverse stereographic projection undefined at the north pole")
    return y[:3] / (1.0 - y[3])


def inverted_chart(y):
    """Coordinate near the north pole: w = (y1, y2, y3) / (1 + y4).

    Equals x / |x|^2 for x the stereographic preimage of y; the north pole
    itself maps to w = 0.
    """
    y = np.asarray(y, dtype=float)
    if 1.0 + y[3] <= 0.0:
        raise DomainError("inverted chart undefined at the south pole")
    return y[:3] / (1.0 + y[3])


def inverted_chart_inv(w):
    """Sphere point from the inverted-chart coordinate."""
    w = np.asarray(w, dtype=float)
    s = w @ w
    return np.append(2.0 * w, 1.0 - s) / (1.0 + s)


def circle_distance(c1, c2):
    """Shorter-arc distance on the unit-circumference circle, in [0, 1/2]."""
    d = np.abs(np.asarray(c1, dtype=float) - np.asarray(c2, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def sphere_angle(u, v):
    """Great-circle angle between unit vectors.

    Computed from the chord length, which stays accurate for nearly equal
    vectors where the arccos of the dot product loses half the digits.
    """
    chord = np.linalg.norm(np.asarray(u, dtype=float) - np.asarray(v, dtype=float), axis=-1)
    return 2.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0))


def orbit_space_distance(p: OrbitSpacePoint, q: OrbitSpacePoint) -> float:
    """Product metric on S^2 x S^1."""
    return float(np.hypot(sphere_angle(p.u, q.u), circle_distance(p.c, q.c)))
