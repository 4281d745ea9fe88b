"""Hopf knot catalog: sampled curves in S^2 x S^1, their circle-factor
degree, embeddedness certification, Hausdorff comparison, and the lift to
equivariant curves in R^3.

The clasp-pattern knots (Mazur and the two generalized families) are
shipped as explicit sampled parametrizations built from control polygons
in development coordinates (circle coordinate, longitude, colatitude
offset), smoothed by periodic splines and resampled to uniform speed.
The properties enforced in code are the testable ones: the curve is
embedded and its circle-factor degree is 1.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from hopfms import kernels
from hopfms.geometry import DomainError, circle_distance, project_p_many, sphere_angle

TWO_PI = 2.0 * np.pi

#: radius of the circle factor in the chordal embedding (circumference 1)
_CIRCLE_R = 1.0 / TWO_PI


class EmbeddingError(ValueError):
    """Curve failed embeddedness validation."""


class DegreeError(ValueError):
    """Circle-coordinate increments too large to unwrap, or wrong degree."""


@dataclass(frozen=True)
class HopfKnotCurve:
    """Closed sampled curve in S^2 x S^1.

    ``u`` is (N+1, 3) unit vectors and ``c`` (N+1,) circle coordinates in
    [0, 1); the last sample repeats the first, and orientation is list
    order.
    """

    name: str
    u: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if u.ndim != 2 or u.shape[1] != 3 or u.shape[0] != c.shape[0]:
            raise ValueError("samples must be (N+1, 3) unit vectors with matching circle coords")
        if u.shape[0] < 9:
            raise ValueError("need at least 8 segments")
        if np.max(np.abs(np.linalg.norm(u, axis=1) - 1.0)) > 1e-9:
            raise DomainError("sphere factors must be unit vectors")
        if np.any(c < 0.0) or np.any(c >= 1.0):
            raise DomainError("circle coordinates must lie in [0, 1)")
        gap = np.hypot(sphere_angle(u[0], u[-1]), circle_distance(c[0], c[-1]))
        if gap > 1e-9:
            raise ValueError(f"curve not closed: endpoint gap {gap:.3e}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "c", c)

    @property
    def resolution(self) -> int:
        return self.u.shape[0] - 1

    def reversed(self) -> "HopfKnotCurve":
        return HopfKnotCurve(self.name, self.u[::-1].copy(), self.c[::-1].copy())

    def embedding_points(self) -> np.ndarray:
        """Chordal embedding into R^5 = R^3 x (circle of circumference 1)."""
        ang = TWO_PI * self.c
        return np.column_stack([self.u, _CIRCLE_R * np.cos(ang), _CIRCLE_R * np.sin(ang)])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "space": "S2xS1",
            "samples": np.column_stack([self.u, self.c]).tolist(),
            "orientation": 1,
            "metadata": {},
        }

    @staticmethod
    def from_dict(d: dict) -> "HopfKnotCurve":
        if d.get("space", "S2xS1") != "S2xS1":
            raise ValueError(f"not an orbit-space curve: space={d.get('space')}")
        samples = np.asarray(d["samples"], dtype=float)
        curve = HopfKnotCurve(d["name"], samples[:, :3], samples[:, 3])
        if d.get("orientation", 1) == -1:
            curve = curve.reversed()
        return curve


# ---------------------------------------------------------------------------
# degree, embeddedness, Hausdorff distance
# ---------------------------------------------------------------------------

def _wrapped_increments(c: np.ndarray) -> np.ndarray:
    dc = np.diff(c)
    w = (dc + 0.5) % 1.0 - 0.5
    if np.any(np.abs(w) >= 0.5 - 1e-12):
        k = int(np.argmax(np.abs(w)))
        raise DegreeError(
            f"circle jump {abs(w[k]):.3f} between samples {k} and {k + 1}: resolution too low to unwrap"
        )
    return w


def s1_degree(curve: HopfKnotCurve) -> int:
    """Net winding of the circle coordinate around the loop."""
    total = float(np.sum(_wrapped_increments(curve.c)))
    deg = int(round(total))
    if abs(total - deg) > 1e-6:
        raise DegreeError(f"winding sum {total} is not an integer")
    return deg


def is_hopf(curve: HopfKnotCurve) -> bool:
    return abs(s1_degree(curve)) == 1


@dataclass(frozen=True)
class EmbeddingReport:
    ok: bool
    min_clearance: float
    clearance_tol: float
    offending_pair: tuple | None

    def raise_if_failed(self):
        if not self.ok:
            raise EmbeddingError(
                f"non-adjacent segments {self.offending_pair} at distance "
                f"{self.min_clearance:.3e} <= tolerance {self.clearance_tol:.3e}"
            )


def validate_embedding(curve: HopfKnotCurve, clearance_tol: float = 0.01) -> EmbeddingReport:
    """Certify embeddedness at sampling scale.

    Measures the minimum distance (chordal product metric) between
    non-adjacent polyline segments, ignoring pairs whose distance is at
    least half their along-curve separation — those are close only because
    the curve passes through them consecutively.  The reported clearance
    subtracts half the two segment lengths, so strands closer than the
    sampling scale certify as negative.  With no candidate pair the
    clearance is +inf.
    """
    E = curve.embedding_points()
    seg = np.linalg.norm(np.diff(E, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    d, i, j = kernels.min_segment_clearance(E, cum, 0.5)
    ok = d > clearance_tol
    return EmbeddingReport(bool(ok), float(d), clearance_tol, None if i < 0 else (int(i), int(j)))


def _pairwise_product_distance(a: HopfKnotCurve, b: HopfKnotCurve) -> np.ndarray:
    # chord-based angle: accurate (and exactly zero) for coincident samples,
    # where arccos of the dot product loses half the digits
    chord = np.linalg.norm(a.u[:, None, :] - b.u[None, :, :], axis=-1)
    ang = 2.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0))
    dc = np.abs(a.c[:, None] - b.c[None, :]) % 1.0
    dc = np.minimum(dc, 1.0 - dc)
    return np.hypot(ang, dc)


def hausdorff_distance(a: HopfKnotCurve, b: HopfKnotCurve) -> float:
    """Symmetric Hausdorff distance over samples, in the product metric."""
    D = _pairwise_product_distance(a, b)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


# ---------------------------------------------------------------------------
# catalog constructors
# ---------------------------------------------------------------------------

def standard_hopf(sphere_point=(0.0, 0.0, 1.0), resolution: int = 100) -> HopfKnotCurve:
    """The standard Hopf knot {u} x S^1."""
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    u = np.asarray(sphere_point, dtype=float)
    u = u / np.linalg.norm(u)
    c = np.arange(resolution + 1) / resolution
    c[-1] = 0.0
    return HopfKnotCurve("L0", np.tile(u, (resolution + 1, 1)), c)


def _dev_to_sphere(lon, colat_off):
    """Development coordinates (longitude, colatitude offset) to unit vectors."""
    th = np.pi / 2.0 + colat_off
    return np.column_stack([np.sin(th) * np.cos(lon), np.sin(th) * np.sin(lon), np.cos(th)])


# control polygon of the clasp pattern, rows (circle coord, longitude,
# colatitude offset); the strand runs forward, folds back over a finger and
# passes under its own earlier strand at a small angular offset
_CLASP_CONTROL = np.array(
    [
        [0.00, 0.00, 0.00],
        [0.28, 0.00, 0.00],
        [0.52, 0.02, 0.00],
        [0.72, 0.22, 0.02],
        [0.62, 0.42, 0.04],
        [0.38, 0.46, 0.04],
        [0.26, 0.30, 0.06],
        [0.33, 0.10, 0.09],
        [0.52, 0.055, 0.075],
        [0.70, 0.05, 0.06],
        [0.85, 0.02, 0.02],
        [1.00, 0.00, 0.00],
    ]
)


def _smooth_closed_development(control: np.ndarray, resolution: int) -> HopfKnotCurve:
    """Periodic-spline smoothing of a development control polygon.

    ``control`` rows are (unwrapped circle coordinate, longitude,
    colatitude offset); the last row must equal the first shifted by the
    net winding.  Resampled to uniform speed in the product metric.
    """
    winding = control[-1, 0] - control[0, 0]
    # chord-length parametrization of the control polygon
    chord = np.linalg.norm(np.diff(control, axis=0), axis=1)
    t = np.concatenate([[0.0], np.cumsum(chord)])
    t /= t[-1]
    drift = control[:, 0] - control[0, 0] - winding * t
    data = np.column_stack([drift, control[:, 1], control[:, 2]])
    data[-1] = data[0]
    spl = CubicSpline(t, data, bc_type="periodic")

    # uniform-speed resample via a dense pass
    td = np.linspace(0.0, 1.0, 4096 + 1)
    dd = spl(td)
    cd = control[0, 0] + winding * td + dd[:, 0]
    ud = _dev_to_sphere(dd[:, 1], dd[:, 2])
    step = np.hypot(
        np.linalg.norm(np.diff(ud, axis=0), axis=1), np.abs(np.diff(cd))
    )
    arc = np.concatenate([[0.0], np.cumsum(step)])
    targets = np.linspace(0.0, arc[-1], resolution + 1)
    ts = np.interp(targets, arc, td)
    ts[0], ts[-1] = 0.0, 1.0

    ds = spl(ts)
    c = (control[0, 0] + winding * ts + ds[:, 0]) % 1.0
    u = _dev_to_sphere(ds[:, 1], ds[:, 2])
    c[-1] = c[0]
    u[-1] = u[0]
    return HopfKnotCurve("clasp", u, c)


def mazur_knot(resolution: int = 800) -> HopfKnotCurve:
    """Clasp-pattern Hopf knot (single clasp)."""
    curve = _smooth_closed_development(_CLASP_CONTROL, resolution)
    return HopfKnotCurve("LM", curve.u, curve.c)


def generalized_mazur(n: int, resolution: int = 800) -> HopfKnotCurve:
    """Clasp family with the return strand wrapping the main strand n times."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        curve = mazur_knot(resolution)
        return HopfKnotCurve("LM_1", curve.u, curve.c)
    head = _CLASP_CONTROL[:7]
    tail = _CLASP_CONTROL[9:]
    # helical pass around the main strand: offset circle about
    # (longitude, colatitude offset) = (0, 0.015), n - 1 full turns over c
    # in [0.30, 0.68]; the radius shrinks with the turn pitch so adjacent
    # turns keep clearance
    m = 12 * n + 1
    s = np.linspace(0.0, 1.0, m)
    psi = np.pi * (0.5 + 2.0 * (n - 1) * s)
    radius = min(0.1, 0.3 * 0.38 / (n - 1))
    wrap = np.column_stack(
        [0.30 + 0.38 * s, radius * np.cos(psi), radius * np.sin(psi) + 0.015]
    )
    control = np.vstack([head, wrap, tail])
    curve = _smooth_closed_development(control, resolution)
    return HopfKnotCurve(f"LM_{n}", curve.u, curve.c)


def generalized_mazur_k(k: int, resolution: int = 800) -> HopfKnotCurve:
    """Clasp family with k clasp patterns in sequence along the circle factor."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        curve = mazur_knot(resolution)
        return HopfKnotCurve("LM^1", curve.u, curve.c)
    blocks = []
    base = _CLASP_CONTROL
    for j in range(k):
        block = base[:-1].copy() if j < k - 1 else base.copy()
        block[:, 0] = (block[:, 0] + j) / k
        blocks.append(block)
    control = np.vstack(blocks)
    curve = _smooth_closed_development(control, resolution)
    return HopfKnotCurve(f"LM^{k}", curve.u, curve.c)


# ---------------------------------------------------------------------------
# lift to R^3
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivariantCurve:
    """One fundamental period of an a-invariant curve in R^3.

    ``points`` holds N+1 samples of lambda over t in [0, 1]; the seam
    sample equals half the first one, and the extension rule is
    lambda(t + 1) = lambda(t) / 2.  ``mu = 2^t lambda`` is the periodic
    normal form used for interpolation.
    """

    points: np.ndarray
    source_name: str = ""
    scale_power: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 9:
            raise ValueError("points must be (N+1, 3) with N >= 8")
        if np.min(np.linalg.norm(pts, axis=1)) <= 0.0:
            raise ValueError("equivariant curve must avoid the origin")
        seam = np.linalg.norm(pts[-1] - pts[0] / 2.0)
        if seam > 1e-9 * np.linalg.norm(pts[0]):
            raise ValueError(f"seam violates the extension rule: residual {seam:.3e}")
        object.__setattr__(self, "points", pts)

    @property
    def resolution(self) -> int:
        return self.points.shape[0] - 1

    @property
    def t(self) -> np.ndarray:
        n = self.resolution
        return np.arange(n + 1) / n

    def mu(self) -> np.ndarray:
        """Periodic samples 2^t lambda(t), seam included."""
        return np.exp2(self.t)[:, None] * self.points

    def norm_bounds(self) -> tuple[float, float]:
        norms = np.linalg.norm(self.mu(), axis=1)
        return float(norms.min()), float(norms.max())

    def rescaled(self, k: int) -> "EquivariantCurve":
        """Scale by 2^k; projects to the same knot."""
        return EquivariantCurve(np.ldexp(self.points, k), self.source_name, self.scale_power + k)

    def evaluate(self, t):
        """Linear-interpolation evaluation (splines live in the tube chart)."""
        t = np.asarray(t, dtype=float)
        tau = t % 1.0
        mu = self.mu()
        x = tau * self.resolution
        i = np.minimum(x.astype(int), self.resolution - 1)
        w = x - i
        vals = (1.0 - w)[..., None] * mu[i] + w[..., None] * mu[i + 1]
        return np.exp2(-t)[..., None] * vals


def lift_to_r3(curve: HopfKnotCurve) -> EquivariantCurve:
    """Lift a Hopf knot to one period of its a-invariant preimage.

    The circle coordinate unwraps to a real height s(t); the preimage of
    the knot under the orbit projection consists of the points
    2^{s(t)+k} u(t), so one period of the lift is lambda = 2^{s} u traversed
    backwards (the curve parameter must advance in the direction where the
    norm halves).  Degree -1 curves are reversed first so that the
    extension rule is always a halving.
    """
    deg = s1_degree(curve)
    if abs(deg) != 1:
        raise DegreeError(f"lift requires degree +-1, got {deg}")
    if deg == -1:
        curve = curve.reversed()
    s = curve.c[0] + np.concatenate([[0.0], np.cumsum(_wrapped_increments(curve.c))])
    lam = np.ascontiguousarray(np.exp2(s)[::-1, None] * curve.u[::-1])
    lam[-1] = lam[0] / 2.0
    return EquivariantCurve(lam, curve.name)


def project_lift(lift: EquivariantCurve) -> HopfKnotCurve:
    """Project one period back to the orbit space (round-trip check).

    Sample order is flipped back so the circle coordinate increases, the
    catalog orientation convention.
    """
    u, c = project_p_many(lift.points[::-1])
    u[-1] = u[0]
    c[-1] = c[0]
    return HopfKnotCurve(lift.source_name or "lifted", u, c)


# ---------------------------------------------------------------------------
# shipped catalog
# ---------------------------------------------------------------------------

_BUILDERS = {
    "L0": lambda resolution=100: standard_hopf(resolution=resolution),
    "LM": mazur_knot,
    "LM_1": lambda resolution=800: generalized_mazur(1, resolution),
    "LM_2": lambda resolution=800: generalized_mazur(2, resolution),
    "LM^2": lambda resolution=800: generalized_mazur_k(2, resolution),
}


def data_dir() -> Path:
    override = os.environ.get("HOPFMS_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data" / "knots"


def catalog_names() -> list[str]:
    d = data_dir()
    names = sorted(p.stem for p in d.glob("*.json")) if d.is_dir() else []
    return names or sorted(_BUILDERS)


def _filename(name: str) -> str:
    return name.replace("^", "_pow_")


def load_catalog_knot(name: str) -> HopfKnotCurve:
    """Load a shipped knot by name; falls back to the builder."""
    path = data_dir() / f"{_filename(name)}.json"
    if path.is_file():
        with open(path) as fh:
            return HopfKnotCurve.from_dict(json.load(fh))
    if name in _BUILDERS:
        return _BUILDERS[name]()
    raise KeyError(f"unknown catalog knot {name!r}; available: {catalog_names()}")


def save_knot(curve: HopfKnotCurve, path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(curve.to_dict(), fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_knot(path) -> HopfKnotCurve:
    with open(path) as fh:
        return HopfKnotCurve.from_dict(json.load(fh))
