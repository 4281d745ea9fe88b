"""Assembly of the global diffeomorphism on R^3 — the ambient contraction
outside an equivariant tube around the lifted knot, the conjugated time-1
flow map inside — and its transfer to the 3-sphere.

The lift is rescaled by a power of 2 (which projects to the same knot)
so the fundamental period sits at norm >= 2; that keeps the extracted
separatrix knots within the tube-radius band demanded by the verification
criteria and keeps the chart well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hopfms import dynamics
from hopfms.dynamics import PhiField
from hopfms.geometry import (
    inverted_chart,
    inverted_chart_inv,
    stereographic,
    stereographic_inv,
)
from hopfms.knots import HopfKnotCurve, lift_to_r3, validate_embedding
from hopfms.tube import TubeChart, build_chart

#: chart axial window whose forward unit-time trajectories can meet the
#: deviation region |x_chart| <= 4 (leftward drift is confined to that ball)
_FWD_WINDOW = (-5.0, 4.0)
_BWD_WINDOW = (-4.0, 5.0)


class RealizationError(RuntimeError):
    """A pipeline stage failed during construction."""


@dataclass
class RealizedMap:
    """The glued diffeomorphism of R^3 with its evaluation policy."""

    chart: TubeChart
    phi_field: PhiField
    knot_name: str
    step: float = 1e-3
    norm_cut: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        m_lo, m_hi = self.chart.norm_bounds()
        r0 = self.chart.r0
        self.active_norms = (np.exp2(-6.0) * (m_lo - r0), np.exp2(6.0) * (m_hi + r0))
        if self.norm_cut is None:
            self.norm_cut = (0.5 * self.active_norms[0], 2.0 * self.active_norms[1])
        self.safe_radius = 0.5 * self.norm_cut[0]

    # -- evaluation ------------------------------------------------------

    def _eval(self, x, direction: int):
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        scale = 0.5 if direction > 0 else 2.0
        if nx == 0.0:
            return np.zeros(3)
        if not (self.norm_cut[0] <= nx <= self.norm_cut[1]):
            return scale * x
        q = self.chart.invert(x)
        if q is None:
            return scale * x
        lo, hi = _FWD_WINDOW if direction > 0 else _BWD_WINDOW
        in_window = lo - 1e-9 <= q[0] <= hi + 1e-9
        rho = float(np.hypot(q[1], q[2]))
        if not in_window:
            return scale * x
        if not self.phi_field.raw and rho >= self.phi_field.cutoff_outer:
            # smoothed field is the pure translation there; the in-tube
            # branch agrees with the contraction exactly
            return scale * x
        p1 = dynamics.flow_phi(self.phi_field, q, float(direction), h=self.step)
        return self.chart.map_Z(p1)

    def eval_forward(self, x):
        return self._eval(x, +1)

    def eval_inverse(self, x):
        return self._eval(x, -1)

    def eval_forward_many(self, X):
        return np.array([self._eval(x, +1) for x in np.atleast_2d(X)])

    def eval_inverse_many(self, X):
        return np.array([self._eval(x, -1) for x in np.atleast_2d(X)])

    # -- distinguished points -------------------------------------------

    def saddle_point(self, which: str):
        """Ambient position of the glued saddle (chart image of P1/P2)."""
        p = dynamics.P1 if which == "P1" else dynamics.P2
        return self.chart.map_Z(p)

    def report(self) -> dict:
        m_lo, m_hi = self.chart.norm_bounds()
        return {
            "knot": self.knot_name,
            "r0": self.chart.r0,
            "clearance": self.chart.clearance,
            "holonomy": self.chart.holonomy,
            "scale_power": self.chart.scale_power,
            "period_norm_bounds": [m_lo, m_hi],
            "active_norms": list(self.active_norms),
            "norm_cut": list(self.norm_cut),
            "safe_radius": self.safe_radius,
            "integrator_step": self.step,
            "field": {
                "cutoff_inner": self.phi_field.cutoff_inner,
                "cutoff_outer": self.phi_field.cutoff_outer,
                "raw": self.phi_field.raw,
            },
        }


def realize(
    knot: HopfKnotCurve,
    phi_field: PhiField | None = None,
    r0: float | None = None,
    safety: float = 0.8,
    step: float = 1e-3,
    clearance_tol: float = 0.01,
) -> RealizedMap:
    """Full pipeline: validate, lift, rescale, frame, pick a radius, glue."""
    report = validate_embedding(knot, clearance_tol)
    if not report.ok:
        raise RealizationError(
            f"knot {knot.name!r} failed embeddedness: clearance {report.min_clearance:.3e} "
            f"at segments {report.offending_pair}"
        )
    try:
        lift = lift_to_r3(knot)
    except ValueError as exc:
        raise RealizationError(f"knot {knot.name!r} cannot be lifted: {exc}") from exc
    m_lo, _ = lift.norm_bounds()
    k = int(np.ceil(1.0 - np.log2(m_lo)))
    if k > 0:
        lift = lift.rescaled(k)
    try:
        chart = build_chart(lift, r0=r0, safety=safety)
    except ValueError as exc:
        raise RealizationError(f"tube construction failed for {knot.name!r}: {exc}") from exc
    return RealizedMap(chart, phi_field or PhiField(), knot.name, step=step)


def tube_boundary_continuity(m: RealizedMap, n_samples: int = 200, rho: float = 1.95, seed: int = 0) -> float:
    """Worst mismatch between the in-tube branch and the contraction on a
    shell just inside the tube wall.

    With the smoothed field the two branches agree there (the field is the
    unit translation for rho beyond the outer cutoff); with the raw field
    the published piecewise formulas still move the shell and the glued
    map tears.
    """
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-3.0, 3.0, n_samples)
    ang = rng.uniform(0.0, 2.0 * np.pi, n_samples)
    P = np.column_stack([x1, rho * np.cos(ang), rho * np.sin(ang)])
    X = m.chart.map_Z_many(P)
    P1 = dynamics.flow_phi_many(m.phi_field, P, 1.0, h=m.step)
    inside = m.chart.map_Z_many(P1)
    return float(np.max(np.linalg.norm(inside - X / 2.0, axis=1)))


# ---------------------------------------------------------------------------
# transfer to the 3-sphere
# ---------------------------------------------------------------------------

@dataclass
class SphereMap:
    """The induced diffeomorphism of S^3, fixing the north pole.

    Away from the pole the map is the stereographic conjugate of the
    realized map; in a polar cap (where the realized map is the plain
    contraction) evaluation switches to the inverted chart, in which the
    map is exactly w -> 2w.
    """

    realized: RealizedMap

    def __post_init__(self):
        r = self.realized.norm_cut[1]
        self.y4_threshold = (r * r - 1.0) / (r * r + 1.0)

    def _eval(self, y, direction: int):
        y = np.asarray(y, dtype=float)
        if y[3] >= self.y4_threshold:
            w = inverted_chart(y)
            return inverted_chart_inv(2.0 * w if direction > 0 else 0.5 * w)
        x = stereographic_inv(y)
        x1 = self.realized._eval(x, direction)
        return stereographic(x1)

    def eval(self, y):
        return self._eval(y, +1)

    def eval_inverse(self, y):
        return self._eval(y, -1)


def to_sphere_map(m: RealizedMap) -> SphereMap:
    return SphereMap(m)


def sphere_eval(sm: SphereMap, y):
    return sm.eval(y)
