"""Equivariant tubular-neighborhood chart Z from the model cylinder
C = {x2^2 + x3^2 <= 4} onto a neighborhood of a lifted knot in R^3\\{O}.

The chart is built from one fundamental period of the lifted curve
lambda: a rotation-minimizing normal frame is transported along the
period (double-reflection method), closed up by distributing the negative
holonomy angle linearly in the parameter, and combined with the radius
profile r(t) = r0 * 2^{-t}.  Everything is stored in the periodic normal
form mu(t) = 2^t lambda(t), so the extension rule Z(x1+1, .) = Z(x1, .)/2
holds exactly and the chart conjugates the unit translation with the
ambient contraction by construction.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from hopfms import kernels
from hopfms.geometry import DomainError
from hopfms.knots import EquivariantCurve

LN2 = np.log(2.0)


class FrameError(ValueError):
    """Frame transport failed (vanishing or discontinuous tangent)."""


class RadiusError(ValueError):
    """No positive tube radius certifies embeddedness."""


class TubeInversionError(RuntimeError):
    """Newton refinement of the chart inverse did not converge."""


def _periodic_spline(values: np.ndarray) -> CubicSpline:
    n = values.shape[0] - 1
    t = np.arange(n + 1) / n
    vals = values.copy()
    vals[-1] = vals[0]
    return CubicSpline(t, vals, bc_type="periodic")


@dataclass
class TubeChart:
    """Immutable after construction; evaluation is pure.

    ``mu``, ``e1``, ``e2`` are periodic samples over one period (seam
    included); ``holonomy`` is the distributed closing rotation already
    baked into the frames; ``r0`` the base radius of the profile
    r(t) = r0 * 2^{-t}; ``clearance`` the certified margin.
    """

    mu: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    holonomy: float
    r0: float
    clearance: float
    source_name: str = ""
    scale_power: int = 0
    _mu_spl: CubicSpline = field(init=False, repr=False)
    _e1_spl: CubicSpline = field(init=False, repr=False)
    _e2_spl: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        self._mu_spl = _periodic_spline(self.mu)
        self._e1_spl = _periodic_spline(self.e1)
        self._e2_spl = _periodic_spline(self.e2)

    @property
    def resolution(self) -> int:
        return self.mu.shape[0] - 1

    def norm_bounds(self) -> tuple[float, float]:
        norms = np.linalg.norm(self.mu, axis=1)
        return float(norms.min()), float(norms.max())

    # -- curve evaluation ------------------------------------------------

    def curve(self, t):
        """lambda(t) = 2^{-t} mu(t mod 1), any real t."""
        t = np.asarray(t, dtype=float)
        return np.exp2(-t)[..., None] * self._mu_spl(t % 1.0)

    def curve_tangent(self, t):
        """lambda'(t) = 2^{-t} (mu'(t) - ln2 * mu(t))."""
        t = np.asarray(t, dtype=float)
        tau = t % 1.0
        return np.exp2(-t)[..., None] * (self._mu_spl(tau, 1) - LN2 * self._mu_spl(tau))

    def frames(self, t):
        """Interpolated frames, re-orthogonalized against the tangent.

        The correction keeps the offset plane exactly normal to the curve
        between samples, which makes the chart inverse (built on the
        orthogonality condition) consistent with the forward map.
        """
        tau = np.atleast_1d(np.asarray(t, dtype=float)) % 1.0
        mu = self._mu_spl(tau)
        tang = self._mu_spl(tau, 1) - LN2 * mu
        T = tang / np.linalg.norm(tang, axis=-1, keepdims=True)
        e1 = self._e1_spl(tau)
        e1 = e1 - np.sum(e1 * T, axis=-1, keepdims=True) * T
        e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
        e2 = self._e2_spl(tau)
        e2 = e2 - np.sum(e2 * T, axis=-1, keepdims=True) * T
        e2 -= np.sum(e2 * e1, axis=-1, keepdims=True) * e1
        e2 /= np.linalg.norm(e2, axis=-1, keepdims=True)
        return e1, e2

    def radius(self, t):
        return self.r0 * np.exp2(-np.asarray(t, dtype=float))

    # -- the chart map and its inverse -----------------------------------

    def map_Z(self, p):
        """Chart map: cylinder point (x1, x2, x3) -> R^3."""
        p = np.asarray(p, dtype=float)
        if p[1] ** 2 + p[2] ** 2 > 4.0 + 1e-9:
            raise DomainError("chart point outside the cylinder")
        return self.map_Z_many(p.reshape(1, 3))[0]

    def map_Z_many(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        t = P[:, 0]
        tau = t % 1.0
        e1, e2 = self.frames(tau)
        body = self._mu_spl(tau) + 0.5 * self.r0 * (P[:, 1, None] * e1 + P[:, 2, None] * e2)
        return np.exp2(-t)[:, None] * body

    def invert(self, x, newton_tol=1e-13, max_iter=50, radial_margin=1.5):
        """Chart coordinates of an ambient point, or None when not in tube.

        Selects the relevant periods from log2|x|, locates the nearest
        parameter on a coarse grid, refines by Newton on the orthogonality
        condition, and reads off the frame coordinates.  Raises
        :class:`TubeInversionError` if Newton stalls on a well-seeded
        minimum (reported distinctly from a clean not-in-tube answer).
        """
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return None
        m_lo, m_hi = self.norm_bounds()
        t_center = np.log2(0.5 * (m_lo + m_hi) / nx)
        n = self.resolution
        # coarse scan over +-1.5 periods around the estimated period
        tg = t_center + np.linspace(-1.5, 1.5, 3 * n + 1)
        w = np.exp2(tg)[:, None] * x - self._mu_spl(tg % 1.0)
        d = np.linalg.norm(w, axis=1)
        k = int(np.argmin(d))
        # quick reject: scaled offset far beyond the chart disk
        if d[k] > radial_margin * self.r0:
            return None
        t = float(tg[k])
        for _ in range(max_iter):
            tau = t % 1.0
            mu = self._mu_spl(tau)
            dmu = self._mu_spl(tau, 1)
            ddmu = self._mu_spl(tau, 2)
            sx = np.exp2(t) * x
            w = sx - mu
            tang = dmu - LN2 * mu
            f = w @ tang
            df = (LN2 * sx - dmu) @ tang + w @ (ddmu - LN2 * dmu)
            if df == 0.0:
                raise TubeInversionError("degenerate Newton step in chart inversion")
            step = f / df
            t -= step
            if abs(step) < newton_tol:
                break
        else:
            raise TubeInversionError(f"chart inversion did not converge near t={t}")
        tau = t % 1.0
        w = np.exp2(t) * x - self._mu_spl(tau)
        e1, e2 = self.frames(tau)
        x2 = 2.0 * (w @ e1[0]) / self.r0
        x3 = 2.0 * (w @ e2[0]) / self.r0
        if x2 * x2 + x3 * x3 > 4.0:
            return None
        return np.array([t, x2, x3])

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "source_name": self.source_name,
            "scale_power": self.scale_power,
            "mu": self.mu.tolist(),
            "e1": self.e1.tolist(),
            "e2": self.e2.tolist(),
            "holonomy": self.holonomy,
            "r0": self.r0,
            "clearance": self.clearance,
        }

    @staticmethod
    def from_dict(d: dict) -> "TubeChart":
        return TubeChart(
            mu=np.asarray(d["mu"], dtype=float),
            e1=np.asarray(d["e1"], dtype=float),
            e2=np.asarray(d["e2"], dtype=float),
            holonomy=float(d["holonomy"]),
            r0=float(d["r0"]),
            clearance=float(d["clearance"]),
            source_name=d.get("source_name", ""),
            scale_power=int(d.get("scale_power", 0)),
        )

    def save(self, path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")
        os.replace(tmp, path)

    @staticmethod
    def load(path) -> "TubeChart":
        with open(path) as fh:
            return TubeChart.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# frame construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FramedCurve:
    """Sampled curve with a closed orthonormal normal frame over one period."""

    mu: np.ndarray  # (N+1, 3), periodic samples of 2^t lambda
    e1: np.ndarray
    e2: np.ndarray
    holonomy: float
    source_name: str = ""
    scale_power: int = 0


def _initial_normal(tangent: np.ndarray) -> np.ndarray:
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(tangent)))] = 1.0
    e = axis - (axis @ tangent) * tangent
    return e / np.linalg.norm(e)


def build_frame(curve: EquivariantCurve, min_samples: int = 64) -> FramedCurve:
    """Rotation-minimizing frame along one period, closed by holonomy.

    Transport uses the double-reflection method on the sampled curve; the
    transported frame generally fails to close under t -> t+1 (frame
    directions are invariant under the scalar contraction), so the
    residual rotation angle is distributed linearly in t with opposite
    sign.
    """
    n = curve.resolution
    if n < min_samples:
        raise FrameError(f"need at least {min_samples} samples per period, got {n}")
    spl = _periodic_spline(curve.mu())
    # Tightly coiled curves can turn faster per sample than discrete
    # transport tolerates; double the working resolution (resampling the
    # spline) until the tangent steps are small enough.
    for _ in range(5):
        t = np.arange(n + 1) / n
        tau = t % 1.0
        mu = spl(tau)
        lam = np.exp2(-t)[:, None] * mu
        tang = np.exp2(-t)[:, None] * (spl(tau, 1) - LN2 * mu)
        speeds = np.linalg.norm(tang, axis=1)
        if np.min(speeds) < 1e-12:
            raise FrameError("vanishing tangent along the curve")
        T = tang / speeds[:, None]
        if np.max(np.linalg.norm(np.diff(T, axis=0), axis=1)) <= 0.5:
            break
        n *= 2
    else:
        raise FrameError("tangent turns too fast between samples; refine the curve")

    e1 = np.empty((n + 1, 3))
    e1[0] = _initial_normal(T[0])
    for i in range(n):
        # double reflection transport of the normal
        v1 = lam[i + 1] - lam[i]
        c1 = v1 @ v1
        rL = e1[i] - (2.0 / c1) * (v1 @ e1[i]) * v1
        rT = T[i] - (2.0 / c1) * (v1 @ T[i]) * v1
        v2 = T[i + 1] - rT
        c2 = v2 @ v2
        e1[i + 1] = rL - (2.0 / c2) * (v2 @ rL) * v2
        e1[i + 1] -= (e1[i + 1] @ T[i + 1]) * T[i + 1]
        e1[i + 1] /= np.linalg.norm(e1[i + 1])
    e2 = np.cross(T, e1)

    # holonomy: angle taking the transported end frame back to the start
    psi = float(np.arctan2(e1[-1] @ e2[0], e1[-1] @ e1[0]))
    ang = -psi * t
    cos_a, sin_a = np.cos(ang)[:, None], np.sin(ang)[:, None]
    e1c = cos_a * e1 + sin_a * e2
    e2c = -sin_a * e1 + cos_a * e2
    e1c[-1] = e1c[0]
    e2c[-1] = e2c[0]
    return FramedCurve(mu, e1c, e2c, psi, curve.source_name, curve.scale_power)


# ---------------------------------------------------------------------------
# radius selection
# ---------------------------------------------------------------------------

def choose_radius(
    framed: FramedCurve,
    safety: float = 0.8,
    periods: int = 3,
    candidate_ratio: float = 0.5,
    bisection_steps: int = 60,
) -> tuple[float, float]:
    """Largest certified base radius, shrunk by the safety factor.

    The predicate for a trial r0 has two parts: the radius profile stays
    below half the local radius of curvature (both scale the same way
    under the contraction, so one period suffices), and cross-section
    stations across three consecutive periods keep positive ball
    clearance.  Station pairs that are close merely because they are
    neighbors along the curve (straight distance comparable to arc
    separation) are not counted — for a straight lift every pair is of
    that kind and the radius is capped by the curve scale alone.
    Returns (r0, certified clearance at r0).
    """
    n = framed.mu.shape[0] - 1
    spl = _periodic_spline(framed.mu)
    tau = np.arange(n) / n
    # curvature of lambda is 2^t times the period-0 curvature, so r*kappa
    # is a function of tau only
    d1 = spl(tau, 1) - LN2 * spl(tau)
    d2 = spl(tau, 2) - 2.0 * LN2 * spl(tau, 1) + LN2 * LN2 * spl(tau)
    speed = np.linalg.norm(d1, axis=1)
    kappa0 = np.linalg.norm(np.cross(d1, d2), axis=1) / speed**3
    mu_norm_min = float(np.min(np.linalg.norm(framed.mu, axis=1)))
    r_max = 0.3 * mu_norm_min
    if np.max(kappa0) > 0.0:
        r_max = min(r_max, 0.5 / float(np.max(kappa0)))

    # stations over `periods` consecutive periods
    tg = np.arange(periods * n) / n
    P = np.exp2(-tg)[:, None] * spl(tg % 1.0)
    seg = np.linalg.norm(np.diff(P, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    w = np.exp2(-tg)
    limit, _, _ = kernels.min_pair_ratio(P, cum, w, candidate_ratio)

    def ok(r0):
        return r0 <= r_max and (not np.isfinite(limit) or r0 < limit)

    hi = r_max if not np.isfinite(limit) else min(r_max, limit)
    if hi <= 0.0 or not ok(hi * 0.5**bisection_steps):
        raise RadiusError("no positive tube radius certifies embeddedness")
    lo = 0.0
    for _ in range(bisection_steps):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    r0 = safety * lo
    clearance = np.inf if not np.isfinite(limit) else float(limit - r0)
    return float(r0), float(clearance)


def build_chart(curve: EquivariantCurve, r0: float | None = None, safety: float = 0.8) -> TubeChart:
    """Frame the curve, certify a radius, and assemble the chart."""
    framed = build_frame(curve)
    if r0 is None:
        r0, clearance = choose_radius(framed, safety=safety)
    else:
        _, clearance = choose_radius(framed, safety=safety)
    return TubeChart(
        mu=framed.mu,
        e1=framed.e1,
        e2=framed.e2,
        holonomy=framed.holonomy,
        r0=float(r0),
        clearance=clearance,
        source_name=framed.source_name,
        scale_power=framed.scale_power,
    )
