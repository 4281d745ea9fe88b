"""Verification instruments for a realized map: fixed-point census,
invariant-manifold tracing, orbit-space projection of orbits, extraction
of the separatrix knots, and certification of the heteroclinic curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hopfms import dynamics
from hopfms.geometry import (
    DomainError,
    OrbitSpacePoint,
    inverted_chart,
    inverted_chart_inv,
    orbit_space_distance,
    project_p,
)
from hopfms.knots import DegreeError, HopfKnotCurve, hausdorff_distance, s1_degree
from hopfms.realization import RealizedMap, SphereMap, tube_boundary_continuity
from hopfms.tube import TubeInversionError


class NotInBasinError(RuntimeError):
    """The forward orbit failed to reach the safe ball within the budget."""


class ExtractionError(RuntimeError):
    """A projected separatrix segment failed to close into a loop."""


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointRecord:
    """A hyperbolic fixed point with its local linearization data."""

    location: np.ndarray
    chart: str  # "ambient" or "inverted"
    eigenvalues: np.ndarray
    morse_index: int
    classification: str

    @property
    def hyperbolicity_margin(self) -> float:
        return float(np.min(np.abs(np.abs(self.eigenvalues) - 1.0)))


def _cubic_roots(b: float, c: float, d: float) -> np.ndarray:
    """Roots of x^3 + b x^2 + c x + d by Cardano's formula."""
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    s = 1.0 + abs(b)
    # a triple root makes the extraction amplify coefficient rounding by a
    # cube root; snap when the depressed coefficients sit at rounding scale
    if abs(p) < 1e-12 * s * s and abs(q) < 1e-12 * s**3:
        return np.full(3, shift, dtype=complex)
    s = np.sqrt(complex((q / 2.0) ** 2 + (p / 3.0) ** 3))
    u3 = -q / 2.0 + s
    if abs(u3) < 1e-300:
        u3 = -q / 2.0 - s
    u = u3 ** (1.0 / 3.0)
    v = -p / (3.0 * u)
    w = np.exp(2j * np.pi / 3.0)
    return np.array([u * w**k + v * w**-k + shift for k in range(3)])


def _fd_jacobian(func, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    h = rel_step * max(1.0, float(np.linalg.norm(x)))
    J = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (func(x + e) - func(x - e)) / (2.0 * h)
    return J


def _map_eigenvalues(J: np.ndarray) -> np.ndarray:
    tr = float(np.trace(J))
    m = float(
        J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
        + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1]
    )
    det = float(np.linalg.det(J))
    return _cubic_roots(-tr, m, -det)


def _classify(eigs: np.ndarray) -> tuple[int, str]:
    index = int(np.sum(np.abs(eigs) > 1.0))
    kind = {0: "sink", 3: "source"}.get(index, "saddle")
    return index, kind


def _newton_fixed_point(m: RealizedMap, x0: np.ndarray, tol: float = 1e-10, max_iter: int = 40):
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        F = m.eval_forward(x) - x
        if not np.all(np.isfinite(F)) or np.linalg.norm(x) > 1e5:
            return None
        if np.linalg.norm(F) < tol:
            return x
        J = _fd_jacobian(m.eval_forward, x) - np.eye(3)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        x = x - step
    return None


def default_seeds(m: RealizedMap) -> list[np.ndarray]:
    seeds = [np.zeros(3), m.saddle_point("P1"), m.saddle_point("P2")]
    for x1 in np.linspace(-2.0, 2.0, 5):
        for x3 in (-0.5, 0.5):
            seeds.append(m.chart.map_Z(np.array([x1, 0.0, x3])))
    return seeds


def find_fixed_points(sm: SphereMap, seeds=None) -> list[FixedPointRecord]:
    """Newton census of the fixed points, in ambient coordinates plus the
    inverted chart at the pole.  Non-converging seeds are dropped; the
    caller judges whether the final count is right.
    """
    m = sm.realized
    records: list[FixedPointRecord] = []
    found: list[np.ndarray] = []
    for x0 in (default_seeds(m) if seeds is None else seeds):
        x = _newton_fixed_point(m, np.asarray(x0, dtype=float))
        if x is None:
            continue
        if any(np.linalg.norm(x - y) < 1e-6 for y in found):
            continue
        found.append(x)
        eigs = _map_eigenvalues(_fd_jacobian(m.eval_forward, x))
        index, kind = _classify(eigs)
        records.append(FixedPointRecord(x, "ambient", eigs, index, kind))

    def pole_chart(w):
        return inverted_chart(sm.eval(inverted_chart_inv(w)))

    eigs = _map_eigenvalues(_fd_jacobian(pole_chart, np.zeros(3)))
    index, kind = _classify(eigs)
    records.append(FixedPointRecord(np.zeros(3), "inverted", eigs, index, kind))
    return sorted(records, key=lambda r: r.morse_index)


# ---------------------------------------------------------------------------
# orbit-space projection of the sink basin
# ---------------------------------------------------------------------------

def basin_projection(m: RealizedMap, x, budget: int = 500) -> OrbitSpacePoint:
    """Project a sink-basin point to S^2 x S^1 along its forward orbit.

    Iterates until the orbit enters the safe ball, where the map is the
    plain halving; the projection of 2^k f^k(x) there equals the orbit-space
    image of x and no longer depends on k.
    """
    x = np.asarray(x, dtype=float)
    for k in range(budget + 1):
        r = np.linalg.norm(x)
        if r == 0.0:
            raise NotInBasinError("orbit hit the sink itself")
        if r <= m.safe_radius:
            return project_p(np.ldexp(x, k))
        x = m.eval_forward(x)
    raise NotInBasinError(f"orbit did not reach the safe ball in {budget} iterations")


# ---------------------------------------------------------------------------
# separatrices of the one-dimensional saddle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparatrixTrace:
    saddle: str
    branch: int
    points: np.ndarray  # (M, 3) ambient polyline
    markers: list[int]  # start index of each iterate of the fundamental segment


@dataclass(frozen=True)
class KnotInvariantResult:
    curve: HopfKnotCurve
    degree: int
    hausdorff_to_reference: float | None
    tube_radius: float


def _fundamental_segment(m: RealizedMap, branch: int, eps: float, n_dense: int) -> np.ndarray:
    """Ambient polyline from the seed to its image, densified along the flow.

    The unstable eigendirection of the time-1 map at the index-1 saddle is
    the third chart axis.
    """
    seed = dynamics.P1 + np.array([0.0, 0.0, branch * eps])
    chart_pts = dynamics.flow_phi_dense(m.phi_field, seed, 1.0, n_dense, h=m.step)
    return m.chart.map_Z_many(chart_pts)


def trace_separatrix(m: RealizedMap, branch: int, eps: float = 1e-6,
                     n_dense: int = 200, budget: int = 400) -> SeparatrixTrace:
    """Polyline of one unstable separatrix of the index-1 saddle, iterated
    forward until it settles into the safe ball around the sink.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be +1 or -1")
    seg = _fundamental_segment(m, branch, eps, n_dense)
    pieces = [seg]
    markers = [0]
    for _ in range(budget):
        if np.max(np.linalg.norm(pieces[-1], axis=1)) <= m.safe_radius:
            break
        markers.append(markers[-1] + len(pieces[-1]))
        pieces.append(m.eval_forward_many(pieces[-1]))
    else:
        raise NotInBasinError(f"separatrix did not reach the safe ball in {budget} iterates")
    return SeparatrixTrace("sigma1", branch, np.vstack(pieces), markers)


def extract_invariant_knot(m: RealizedMap, branch: int, reference: HopfKnotCurve | None = None,
                           eps: float = 1e-6, n_dense: int = 200,
                           weld_tol: float = 1e-6) -> KnotInvariantResult:
    """Orbit-space image of one separatrix: the fundamental segment projects
    to a closed loop (its endpoints differ by one application of the map).
    """
    seg = _fundamental_segment(m, branch, eps, n_dense)
    pts = [basin_projection(m, x) for x in seg]
    u = np.array([q.u for q in pts])
    c = np.array([q.c for q in pts])
    gap = orbit_space_distance(pts[0], pts[-1])
    if gap > weld_tol:
        raise ExtractionError(f"projected segment does not close: gap {gap:.3e}")
    u[-1] = u[0]
    c[-1] = c[0]
    name = f"{m.knot_name}-separatrix{'+' if branch > 0 else '-'}"
    curve = HopfKnotCurve(name, u, c)
    if s1_degree(curve) < 0:
        # orient by increasing circle coordinate, matching the catalog convention
        curve = curve.reversed()
    deg = s1_degree(curve)
    dist = hausdorff_distance(curve, reference) if reference is not None else None
    return KnotInvariantResult(curve, deg, dist, m.chart.r0)


# ---------------------------------------------------------------------------
# unstable surface of the two-dimensional saddle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnstableSurfaceSample:
    angles: np.ndarray
    loops: list[list[OrbitSpacePoint | None]]  # None marks not-in-basin samples
    windings: list[int | None]


def project_unstable_surface(m: RealizedMap, n_loops: int = 8, n_samples: int = 100,
                             eps: float = 1e-3, budget: int = 200) -> UnstableSurfaceSample:
    """Sample the orbit-space image of the unstable surface of the index-2
    saddle as an annulus of essential loops.

    Closed loops in the sink basin always project with winding zero (the
    projection is an infinite cyclic covering), so each annulus loop is
    instead the projection of a flow arc from a seed to its time-1 image,
    which closes up under the projection.  Seeds sit at radius ``eps`` in
    the unstable plane (the chart plane x2 = 0) at ``n_loops`` angles; the
    angle pointing down the heteroclinic connection is excluded, and any
    sample still caught by it is tagged ``None`` instead of dropped.
    """
    theta = -np.pi + (np.arange(n_loops) + 0.5) * (2.0 * np.pi / n_loops)
    loops: list[list[OrbitSpacePoint | None]] = []
    windings: list[int | None] = []
    for ang in theta:
        seed = dynamics.P2 + eps * np.array([np.cos(ang), 0.0, np.sin(ang)])
        chart_arc = dynamics.flow_phi_dense(m.phi_field, seed, 1.0, n_samples, h=m.step)
        proj: list[OrbitSpacePoint | None] = []
        for x in m.chart.map_Z_many(chart_arc):
            try:
                proj.append(basin_projection(m, x, budget=budget))
            except NotInBasinError:
                proj.append(None)
        # orient by increasing circle coordinate, matching the catalog convention
        proj.reverse()
        loops.append(proj)
        windings.append(_loop_winding(proj))
    return UnstableSurfaceSample(theta, loops, windings)


def _loop_winding(proj: list[OrbitSpacePoint | None]) -> int | None:
    """Winding of a projected arc whose endpoints are identified."""
    if any(q is None for q in proj):
        return None
    u = np.array([q.u for q in proj])
    c = np.array([q.c for q in proj])
    if orbit_space_distance(proj[0], proj[-1]) > 1e-6:
        return None
    u[-1] = u[0]
    c[-1] = c[0]
    try:
        return s1_degree(HopfKnotCurve("loop", u, c))
    except (DegreeError, ValueError):
        return None


# ---------------------------------------------------------------------------
# heteroclinic certification
# ---------------------------------------------------------------------------

def _iterations_to_reach(step, x, target, tol, max_iter):
    for k in range(max_iter + 1):
        if np.linalg.norm(x - target) < tol:
            return k
        x = step(x)
    return None


def verify_heteroclinic(m: RealizedMap, n_samples: int = 20, tol: float = 1e-4,
                        max_iter: int = 200, invariance_tol: float = 1e-7) -> dict:
    """Certify the heteroclinic curve between the two saddles.

    Samples the chart axis between them, checks that forward orbits reach
    the index-1 saddle and backward orbits the index-2 saddle, and that
    one application of the map keeps each sample on the axis image.
    """
    s1 = m.saddle_point("P1")
    s2 = m.saddle_point("P2")
    ts = np.linspace(-0.9, 0.9, n_samples)
    forward, backward, invariance = [], [], []
    ok = True
    for t in ts:
        x = m.chart.map_Z(np.array([t, 0.0, 0.0]))
        kf = _iterations_to_reach(m.eval_forward, x, s1, tol, max_iter)
        kb = _iterations_to_reach(m.eval_inverse, x, s2, tol, max_iter)
        y = m.eval_forward(x)
        q = m.chart.invert(y)
        resid = np.inf if q is None else float(
            np.linalg.norm(y - m.chart.map_Z(np.array([q[0], 0.0, 0.0])))
        )
        forward.append(kf)
        backward.append(kb)
        invariance.append(resid)
        if kf is None or kb is None or resid >= invariance_tol:
            ok = False
    return {
        "ok": ok,
        "samples": ts.tolist(),
        "forward_iterations": forward,
        "backward_iterations": backward,
        "invariance_residuals": invariance,
        "max_invariance_residual": float(np.max(invariance)),
        "tolerance": tol,
        "max_iterations": max_iter,
    }


# ---------------------------------------------------------------------------
# aggregate census
# ---------------------------------------------------------------------------

def census(m: RealizedMap, reference: HopfKnotCurve | None = None) -> dict:
    """End-to-end verification summary; failures are recorded, not raised."""
    sm = SphereMap(m)
    errors = {}
    try:
        fps = find_fixed_points(sm)
    except (DomainError, TubeInversionError) as exc:
        fps = []
        errors["fixed_points"] = str(exc)
    indices = sorted(r.morse_index for r in fps)
    margin = min((r.hyperbolicity_margin for r in fps), default=0.0)
    try:
        het = verify_heteroclinic(m)
    except (DomainError, TubeInversionError) as exc:
        het = {"ok": False, "error": str(exc)}
        errors["heteroclinic"] = str(exc)
    knots_out = {}
    knot_ok = True
    results = {}
    for branch in (+1, -1):
        key = "plus" if branch > 0 else "minus"
        try:
            res = extract_invariant_knot(m, branch, reference=reference)
            results[key] = res
            knots_out[key] = {
                "degree": res.degree,
                "hausdorff_to_reference": res.hausdorff_to_reference,
                "tube_radius": res.tube_radius,
            }
            if res.degree != 1:
                knot_ok = False
            if res.hausdorff_to_reference is not None and (
                res.hausdorff_to_reference >= res.tube_radius + 1e-2
            ):
                knot_ok = False
        except (NotInBasinError, ExtractionError, DegreeError, DomainError,
                TubeInversionError, ValueError) as exc:
            knots_out[key] = {"error": str(exc)}
            knot_ok = False
    if "plus" in results and "minus" in results:
        mutual = hausdorff_distance(results["plus"].curve, results["minus"].curve)
        knots_out["mutual_hausdorff"] = mutual
        if mutual >= 2.0 * m.chart.r0:
            knot_ok = False
    try:
        continuity = tube_boundary_continuity(m)
    except (DomainError, TubeInversionError) as exc:
        continuity = float("inf")
        errors["tube_boundary_continuity"] = str(exc)
    checks = {
        "fixed_point_count": len(fps) == 4,
        "morse_indices": indices == [0, 1, 2, 3],
        "hyperbolicity_margin": margin >= 0.25,
        "heteroclinic": het["ok"],
        "invariant_knots": knot_ok,
        "tube_boundary_continuity": continuity < 1e-7,
    }
    return {
        "knot": m.knot_name,
        "fixed_points": [
            {
                "chart": r.chart,
                "location": r.location.tolist(),
                "eigenvalues": [[z.real, z.imag] for z in r.eigenvalues],
                "morse_index": r.morse_index,
                "classification": r.classification,
            }
            for r in fps
        ],
        "morse_indices": indices,
        "hyperbolicity_margin": margin,
        "heteroclinic": het,
        "invariant_knots": knots_out,
        "tube_boundary_continuity": continuity,
        "errors": errors,
        "checks": checks,
        "ok": all(checks.values()),
    }
