import json

import numpy as np
import pytest

from hopfms import knots
from hopfms.knots import DegreeError, HopfKnotCurve

from _oracles import synthetic_loop, winding_oracle


def test_catalog_loads_with_degree_one():
    names = knots.catalog_names()
    assert "L0" in names and "LM" in names
    for name in names:
        curve = knots.load_catalog_knot(name)
        assert knots.s1_degree(curve) == 1
        assert knots.validate_embedding(curve).ok, name


def test_unknown_catalog_name():
    with pytest.raises(KeyError):
        knots.load_catalog_knot("nonexistent")


def test_round_curve_reports_infinite_clearance(l0_knot):
    rep = knots.validate_embedding(l0_knot)
    assert rep.ok
    assert rep.min_clearance == np.inf


def test_embeddedness_detects_undersampled_clasp():
    assert not knots.validate_embedding(knots.mazur_knot(resolution=16)).ok
    assert knots.validate_embedding(knots.mazur_knot(resolution=64)).ok


def test_generalized_families_are_embedded():
    for curve in (knots.generalized_mazur(2), knots.generalized_mazur_k(2)):
        assert knots.s1_degree(curve) == 1
        assert knots.validate_embedding(curve).ok


def test_degree_oracle_on_catalog():
    for name in knots.catalog_names():
        curve = knots.load_catalog_knot(name)
        assert knots.s1_degree(curve) == winding_oracle(curve)


def test_degree_oracle_on_synthetic_loops(rng):
    for _ in range(50):
        degree = int(rng.integers(-2, 3))
        curve = synthetic_loop(rng, degree)
        assert knots.s1_degree(curve) == degree
        assert winding_oracle(curve) == degree


def test_reversal_negates_degree(l0_knot):
    assert knots.s1_degree(l0_knot.reversed()) == -1


def test_degree_rejects_unresolvable_jumps():
    n = 16
    u = np.tile([0.0, 0.0, 1.0], (n + 1, 1))
    c = (0.5 * np.arange(n + 1)) % 1.0
    c[-1] = c[0]
    with pytest.raises(DegreeError):
        knots.s1_degree(HopfKnotCurve("jumpy", u, c))


def test_serialization_round_trip(mazur, tmp_path):
    d = mazur.to_dict()
    back = HopfKnotCurve.from_dict(d)
    assert np.array_equal(back.u, mazur.u)
    assert np.array_equal(back.c, mazur.c)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    knots.save_knot(mazur, p1)
    knots.save_knot(knots.load_knot(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert json.loads(p1.read_text())["space"] == "S2xS1"


def test_curve_validation():
    u = np.tile([0.0, 0.0, 1.0], (17, 1))
    c = np.linspace(0.0, 1.0, 17) % 1.0
    c[-1] = 0.5  # breaks closure
    with pytest.raises(ValueError):
        HopfKnotCurve("open", u, c)
    with pytest.raises(ValueError):
        HopfKnotCurve("short", u[:5], np.zeros(5))


def test_lift_satisfies_extension_rule(mazur):
    lift = knots.lift_to_r3(mazur)
    assert np.linalg.norm(lift.points[-1] - lift.points[0] / 2.0) < 1e-12
    # mu = 2^t lambda is periodic
    mu = lift.mu()
    assert np.linalg.norm(mu[-1] - mu[0]) < 1e-12


def test_lift_round_trip(l0_knot, mazur):
    for curve in (l0_knot, mazur):
        back = knots.project_lift(knots.lift_to_r3(curve))
        assert np.max(np.abs(back.u - curve.u)) < 1e-9
        assert np.max(np.abs(back.c - curve.c)) < 1e-9


def test_lift_reverses_negative_degree(l0_knot):
    lift = knots.lift_to_r3(l0_knot.reversed())
    assert np.linalg.norm(lift.points[-1] - lift.points[0] / 2.0) < 1e-12


def test_lift_rejects_non_hopf(rng):
    with pytest.raises(DegreeError):
        knots.lift_to_r3(synthetic_loop(rng, 0))


def test_rescaling_projects_to_same_knot(mazur):
    lift = knots.lift_to_r3(mazur)
    scaled = lift.rescaled(3)
    assert scaled.scale_power == lift.scale_power + 3
    assert np.allclose(scaled.points, 8.0 * lift.points)
    a = knots.project_lift(lift)
    b = knots.project_lift(scaled)
    assert knots.hausdorff_distance(a, b) < 1e-9


def test_hausdorff_basic(l0_knot, mazur):
    assert knots.hausdorff_distance(l0_knot, l0_knot) == 0.0
    d1 = knots.hausdorff_distance(l0_knot, mazur)
    d2 = knots.hausdorff_distance(mazur, l0_knot)
    assert d1 == pytest.approx(d2)
    assert d1 > 0.1
