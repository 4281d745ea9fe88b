import numpy as np
import pytest

from hopfms import dynamics, knots, realization
from hopfms.geometry import NORTH_POLE, stereographic
from hopfms.realization import RealizationError

from _oracles import synthetic_loop


def test_far_and_deep_points_take_the_contraction_code_path(l0_map, rng):
    far = rng.normal(size=(200, 3))
    far *= (rng.uniform(2000, 5000, 200) / np.linalg.norm(far, axis=1))[:, None]
    deep = rng.normal(size=(200, 3))
    deep *= (rng.uniform(1e-8, l0_map.safe_radius, 200) / np.linalg.norm(deep, axis=1))[:, None]
    for X in (far, deep):
        assert np.array_equal(l0_map.eval_forward_many(X), X / 2.0)
        assert np.array_equal(l0_map.eval_inverse_many(X), 2.0 * X)


def test_origin_fixed(l0_map):
    assert np.array_equal(l0_map.eval_forward(np.zeros(3)), np.zeros(3))


def test_saddle_images_are_fixed(l0_map, mazur_map):
    for m in (l0_map, mazur_map):
        for which in ("P1", "P2"):
            s = m.saddle_point(which)
            assert np.linalg.norm(m.eval_forward(s) - s) < 1e-9


def test_forward_inverse_round_trip(l0_map, rng):
    # mixed sample: inside the tube, near its wall, and generic ambient
    chart_pts = np.column_stack(
        [rng.uniform(-4, 4, 60), rng.uniform(-1.9, 1.9, 60), rng.uniform(-1.9, 1.9, 60)]
    )
    chart_pts = chart_pts[np.hypot(chart_pts[:, 1], chart_pts[:, 2]) < 2.0]
    X = np.vstack([l0_map.chart.map_Z_many(chart_pts), rng.normal(size=(60, 3)) * 20])
    worst = 0.0
    for x in X:
        y = l0_map.eval_inverse(l0_map.eval_forward(x))
        worst = max(worst, np.linalg.norm(y - x) / max(1.0, np.linalg.norm(x)))
    assert worst < 1e-7


def test_contraction_on_translation_part_of_tube(l0_map, rng):
    # inside the tube but beyond the cutoff radius the glued map must agree
    # with the contraction through the conjugacy, not by branch shortcut
    P = np.column_stack(
        [rng.uniform(-3, 3, 100), np.full(100, 0.0), rng.uniform(1.85, 1.95, 100)]
    )
    X = l0_map.chart.map_Z_many(P)
    Y = np.array([l0_map.chart.map_Z(dynamics.phi(l0_map.phi_field, p)) for p in P])
    assert np.max(np.linalg.norm(Y - X / 2.0, axis=1)) < 1e-9


def test_boundary_continuity_smoothed_vs_raw(l0_map):
    assert realization.tube_boundary_continuity(l0_map) < 1e-7
    raw = realization.RealizedMap(
        l0_map.chart, dynamics.PhiField(raw=True), l0_map.knot_name
    )
    assert realization.tube_boundary_continuity(raw) > 0.1


def test_realize_rejects_degree_zero(rng):
    with pytest.raises(RealizationError):
        realization.realize(synthetic_loop(rng, 0))


def test_realize_rejects_unembedded():
    with pytest.raises(RealizationError):
        realization.realize(knots.mazur_knot(resolution=16))


def test_rescaling_keeps_period_above_two(l0_map, mazur_map):
    for m in (l0_map, mazur_map):
        assert m.chart.norm_bounds()[0] >= 2.0 - 1e-12


def test_report_contents(mazur_map):
    rep = mazur_map.report()
    for key in ("knot", "r0", "clearance", "active_norms", "safe_radius", "field"):
        assert key in rep
    assert rep["r0"] > 0.0
    assert rep["field"]["raw"] is False


def test_sphere_map_fixes_poles(l0_map):
    sm = realization.to_sphere_map(l0_map)
    assert np.array_equal(sm.eval(NORTH_POLE), NORTH_POLE)
    south = np.array([0.0, 0.0, 0.0, -1.0])
    assert np.allclose(sm.eval(south), south)


def test_sphere_map_conjugates_ambient_map(l0_map, rng):
    sm = realization.to_sphere_map(l0_map)
    worst = 0.0
    for _ in range(100):
        x = rng.normal(size=3) * rng.uniform(0.001, 1000)
        lhs = sm.eval(stereographic(x))
        rhs = stereographic(l0_map.eval_forward(x))
        worst = max(worst, np.linalg.norm(lhs - rhs))
        assert abs(np.linalg.norm(lhs) - 1.0) < 1e-12
    assert worst < 1e-9


def test_sphere_map_round_trip(l0_map, rng):
    sm = realization.to_sphere_map(l0_map)
    for _ in range(50):
        y = stereographic(rng.normal(size=3) * rng.uniform(0.01, 500))
        assert np.linalg.norm(sm.eval_inverse(sm.eval(y)) - y) < 1e-9


def test_source_derivative_at_pole_is_doubling(l0_map):
    from hopfms.analysis import _fd_jacobian
    from hopfms.geometry import inverted_chart, inverted_chart_inv

    sm = realization.to_sphere_map(l0_map)

    def pole_chart(w):
        return inverted_chart(sm.eval(inverted_chart_inv(w)))

    J = _fd_jacobian(pole_chart, np.zeros(3))
    assert np.max(np.abs(J - 2.0 * np.eye(3))) < 1e-9
