"""End-to-end acceptance criteria.

Each test exercises one numbered criterion with its pinned tolerance and
emits a single pass/fail line into the terminal summary (see conftest).
"""

import time

import numpy as np
import pytest

from hopfms import analysis, dynamics, knots, realization
from hopfms.dynamics import PhiField

from _oracles import synthetic_loop, winding_oracle
from conftest import record_criterion

CENSUS_KNOTS = ["L0", "LM", "LM_1", "LM_2"]


@pytest.fixture(scope="module")
def census_maps(l0_map, mazur_map):
    maps = {"L0": l0_map, "LM": mazur_map}
    for name in ("LM_1", "LM_2"):
        maps[name] = realization.realize(knots.load_catalog_knot(name))
    return maps


def test_criterion_1_fixed_point_census(census_maps):
    worst_saddle = 0.0
    worst_sink = 0.0
    worst_source = 0.0
    slowest = 0.0
    ok = True
    for name in CENSUS_KNOTS:
        m = census_maps[name]
        start = time.perf_counter()
        fps = analysis.find_fixed_points(realization.to_sphere_map(m))
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        by_index = {r.morse_index: r for r in fps}
        ok &= len(fps) == 4 and sorted(by_index) == [0, 1, 2, 3]
        J = analysis._fd_jacobian(m.eval_forward, np.zeros(3))
        worst_sink = max(worst_sink, float(np.max(np.abs(J - 0.5 * np.eye(3)))))
        worst_source = max(
            worst_source, float(np.max(np.abs(by_index[3].eigenvalues - 2.0)))
        )
        for idx, rates in ((1, [-2 / 3, -1.0, 1.0]), (2, [2 / 3, -1.0, 1.0])):
            got = np.sort(np.abs(by_index[idx].eigenvalues))
            worst_saddle = max(
                worst_saddle, float(np.max(np.abs(got - np.sort(np.exp(rates)))))
            )
    ok &= worst_sink < 1e-9 and worst_source < 1e-9 and worst_saddle < 1e-4
    ok &= slowest < 60.0
    record_criterion(
        1,
        "fixed-point census",
        ok,
        f"4 points with indices {{0,1,2,3}} on {CENSUS_KNOTS}; sink dev {worst_sink:.1e}, "
        f"source dev {worst_source:.1e}, saddle dev {worst_saddle:.1e}, "
        f"slowest {slowest:.1f}s",
    )
    assert ok


def test_criterion_2_conjugation_identity(census_maps, rng):
    shift = np.array([1.0, 0.0, 0.0])

    def sup_residual(chart, n=10_000):
        ang = rng.uniform(0, 2 * np.pi, n)
        rho = 2.0 * np.sqrt(rng.uniform(0, 1, n))
        P = np.column_stack(
            [rng.uniform(-4, 4, n), rho * np.cos(ang), rho * np.sin(ang)]
        )
        lhs = chart.map_Z_many(P + shift)
        rhs = chart.map_Z_many(P) / 2.0
        return float(np.max(np.linalg.norm(lhs - rhs, axis=1)))

    closed = sup_residual(census_maps["L0"].chart)
    sampled = max(sup_residual(census_maps[k].chart) for k in ("LM", "LM_1", "LM_2"))
    ok = closed < 1e-9 and sampled < 1e-6
    record_criterion(
        2,
        "conjugation identity",
        ok,
        f"sup |Z(g(p)) - a(Z(p))| over 1e4 points: closed-form {closed:.1e} < 1e-9, "
        f"sampled {sampled:.1e} < 1e-6",
    )
    assert ok


def test_criterion_3_field_integrity(rng):
    raw = PhiField(raw=True)
    smooth = PhiField()
    seam = dynamics.branch_continuity_residual(raw, n_samples=1000)
    n_zeros, centers = dynamics.grid_zero_census(smooth, resolution=0.05, x1_max=6.0)
    ang = rng.uniform(0, 2 * np.pi, 1000)
    rho = rng.uniform(1.8, 2.0, 1000)
    shell = np.column_stack(
        [rng.uniform(-6, 6, 1000), rho * np.cos(ang), rho * np.sin(ang)]
    )
    v = dynamics.phi_velocity_many(smooth, shell)
    translation_exact = bool(np.all(v == np.array([1.0, 0.0, 0.0])))
    ok = seam < 1e-12 and n_zeros == 2 and translation_exact
    record_criterion(
        3,
        "field integrity",
        ok,
        f"seam residual {seam:.1e} < 1e-12, grid census {n_zeros} zeros at "
        f"{[np.round(c, 2).tolist() for c in centers]}, translation beyond cutoff exact: "
        f"{translation_exact}",
    )
    assert ok


def test_criterion_4_heteroclinic(census_maps):
    worst_resid = 0.0
    worst_iters = 0
    ok = True
    for name in ("L0", "LM"):
        het = analysis.verify_heteroclinic(census_maps[name], n_samples=20)
        ok &= het["ok"]
        worst_resid = max(worst_resid, het["max_invariance_residual"])
        worst_iters = max(
            worst_iters,
            *(k for k in het["forward_iterations"] + het["backward_iterations"] if k is not None),
        )
    ok &= worst_resid < 1e-7
    record_criterion(
        4,
        "heteroclinic certification",
        ok,
        f"20 axis samples on L0/LM converge within {worst_iters} <= 200 iterations, "
        f"invariance residual {worst_resid:.1e} < 1e-7",
    )
    assert ok


def test_criterion_5_invariant_knot_extraction(census_maps):
    details = []
    ok = True
    for name in ("L0", "LM"):
        m = census_maps[name]
        ref = knots.load_catalog_knot(name)
        res = {}
        for branch in (+1, -1):
            res[branch] = analysis.extract_invariant_knot(m, branch, reference=ref)
            ok &= res[branch].degree == 1
            ok &= res[branch].hausdorff_to_reference < m.chart.r0 + 1e-2
        mutual = knots.hausdorff_distance(res[+1].curve, res[-1].curve)
        ok &= mutual < 2.0 * m.chart.r0
        details.append(
            f"{name}: degrees (1,1), mutual {mutual:.3f} < {2 * m.chart.r0:.3f}, "
            f"to source {max(r.hausdorff_to_reference for r in res.values()):.3f} "
            f"< {m.chart.r0 + 1e-2:.3f}"
        )
    record_criterion(5, "invariant-knot extraction", ok, "; ".join(details))
    assert ok


def test_criterion_6_projection_invariance(census_maps, rng):
    worst = 0.0
    for name in ("L0", "LM"):
        m = census_maps[name]
        lo, hi = m.active_norms
        for _ in range(1000):
            x = rng.normal(size=3)
            x *= rng.uniform(max(lo / 4, 1e-3), min(hi * 4, 1e3)) / np.linalg.norm(x)
            try:
                a = analysis.basin_projection(m, x)
                b = analysis.basin_projection(m, m.eval_forward(x))
            except analysis.NotInBasinError:
                continue  # measure-zero stable-manifold neighborhoods
            from hopfms.geometry import orbit_space_distance

            worst = max(worst, orbit_space_distance(a, b))
    ok = worst < 1e-6
    record_criterion(
        6,
        "orbit-space projection invariance",
        ok,
        f"|p(f(x)) - p(x)| over 1e3 basin points per knot: max {worst:.1e} < 1e-6",
    )
    assert ok


def test_criterion_7_degree_oracle(rng):
    ok = True
    for name in knots.catalog_names():
        curve = knots.load_catalog_knot(name)
        ok &= knots.s1_degree(curve) == winding_oracle(curve)
    checked = 0
    for _ in range(50):
        degree = int(rng.integers(-2, 3))
        curve = synthetic_loop(rng, degree)
        ok &= knots.s1_degree(curve) == winding_oracle(curve) == degree
        checked += 1
    record_criterion(
        7,
        "degree oracle equivalence",
        ok,
        f"full catalog plus {checked} synthetic loops of degree -2..2 agree with the "
        f"brute-force winding oracle",
    )
    assert ok


def test_criterion_8_negative_control(l0_map):
    smooth = realization.tube_boundary_continuity(l0_map)
    raw_map = realization.RealizedMap(
        l0_map.chart, PhiField(raw=True), l0_map.knot_name
    )
    raw = realization.tube_boundary_continuity(raw_map)
    ok = smooth < 1e-7 and raw > 0.1
    record_criterion(
        8,
        "negative control",
        ok,
        f"tube-boundary discrepancy: cutoff {smooth:.1e} < 1e-7, raw field {raw:.2f} > 0.1",
    )
    assert ok
