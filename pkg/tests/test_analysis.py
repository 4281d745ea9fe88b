import numpy as np
import pytest

from hopfms import analysis, knots, realization
from hopfms.analysis import NotInBasinError
from hopfms.geometry import orbit_space_distance, project_p


@pytest.fixture(scope="module")
def l0_fps(l0_map):
    return analysis.find_fixed_points(realization.to_sphere_map(l0_map))


def test_cubic_roots_against_numpy(rng):
    for _ in range(50):
        b, c, d = rng.normal(size=3) * 3
        mine = analysis._cubic_roots(b, c, d)
        ref = np.roots([1.0, b, c, d])
        # nearest-neighbour matching: lexicographic sorting is unstable for
        # conjugate pairs whose real parts differ in the last ulp
        gap = np.abs(mine[:, None] - ref[None, :])
        assert max(gap.min(axis=1).max(), gap.min(axis=0).max()) < 1e-8


def test_cubic_roots_triple_root_is_exact():
    roots = analysis._cubic_roots(-1.5, 0.75, -0.125)
    assert np.array_equal(roots, np.full(3, 0.5, dtype=complex))


def test_fixed_point_count_and_indices(l0_fps):
    assert len(l0_fps) == 4
    assert sorted(r.morse_index for r in l0_fps) == [0, 1, 2, 3]
    assert [r.classification for r in l0_fps] == ["sink", "saddle", "saddle", "source"]
    assert min(r.hyperbolicity_margin for r in l0_fps) >= 0.25


def test_fixed_point_locations(l0_fps, l0_map):
    by_index = {r.morse_index: r for r in l0_fps}
    assert np.linalg.norm(by_index[0].location) < 1e-9
    assert np.linalg.norm(by_index[1].location - l0_map.saddle_point("P1")) < 1e-6
    assert np.linalg.norm(by_index[2].location - l0_map.saddle_point("P2")) < 1e-6
    assert by_index[3].chart == "inverted"


def test_saddle_eigenvalues_match_analytic(l0_fps):
    by_index = {r.morse_index: r for r in l0_fps}
    e1 = np.sort(np.abs(by_index[1].eigenvalues))
    e2 = np.sort(np.abs(by_index[2].eigenvalues))
    assert np.max(np.abs(e1 - np.sort(np.exp([-2 / 3, -1.0, 1.0])))) < 1e-4
    assert np.max(np.abs(e2 - np.sort(np.exp([2 / 3, -1.0, 1.0])))) < 1e-4


def test_sink_and_source_differentials(l0_map, l0_fps):
    J = analysis._fd_jacobian(l0_map.eval_forward, np.zeros(3))
    assert np.max(np.abs(J - 0.5 * np.eye(3))) < 1e-9
    by_index = {r.morse_index: r for r in l0_fps}
    assert np.max(np.abs(by_index[3].eigenvalues - 2.0)) < 1e-9


def test_basin_projection_inside_safe_ball(l0_map):
    x = np.array([1.0, 1.0, -0.5]) * (l0_map.safe_radius / 2.0)
    p = analysis.basin_projection(l0_map, x)
    assert orbit_space_distance(p, project_p(x)) < 1e-12


def test_basin_projection_map_invariance(l0_map, rng):
    worst = 0.0
    for _ in range(50):
        x = rng.normal(size=3) * rng.uniform(0.05, 100)
        a = analysis.basin_projection(l0_map, x)
        b = analysis.basin_projection(l0_map, l0_map.eval_forward(x))
        worst = max(worst, orbit_space_distance(a, b))
    assert worst < 1e-6


def test_heteroclinic_axis_is_not_in_basin(l0_map):
    x = l0_map.chart.map_Z(np.array([0.0, 0.0, 0.0]))
    with pytest.raises(NotInBasinError):
        analysis.basin_projection(l0_map, x, budget=150)


def test_separatrix_trace_converges_to_sink(l0_map):
    tr = analysis.trace_separatrix(l0_map, +1)
    assert tr.saddle == "sigma1"
    # tail contracts by 1/2 per iterate once in the plain-contraction region
    last = tr.points[tr.markers[-1] :]
    prev = tr.points[tr.markers[-2] : tr.markers[-1]]
    ratio = np.linalg.norm(last, axis=1) / np.linalg.norm(prev, axis=1)
    assert np.max(np.abs(ratio - 0.5)) < 1e-6
    assert np.max(np.linalg.norm(last, axis=1)) <= l0_map.safe_radius


def test_separatrix_stays_inside_tube(l0_map):
    tr = analysis.trace_separatrix(l0_map, -1)
    # while the chart still sees the trajectory, it stays off the tube wall
    for x in tr.points[:: max(1, len(tr.points) // 200)]:
        q = l0_map.chart.invert(x)
        if q is not None:
            assert np.hypot(q[1], q[2]) < 2.0


def test_extracted_knots_close_and_have_degree_one(l0_map, l0_knot):
    for branch in (+1, -1):
        res = analysis.extract_invariant_knot(l0_map, branch, reference=l0_knot)
        assert res.degree == 1
        assert res.hausdorff_to_reference < res.tube_radius + 1e-2


def test_extraction_seed_richardson_stability(l0_map):
    # the two extractions sample the same invariant curve at shifted phases,
    # so the sampled Hausdorff distance is dominated by polygonal
    # discretization; dense sampling brings it down quadratically
    a = analysis.extract_invariant_knot(l0_map, +1, eps=1e-6, n_dense=1000)
    b = analysis.extract_invariant_knot(l0_map, +1, eps=5e-7, n_dense=1000)
    assert knots.hausdorff_distance(a.curve, b.curve) < 2e-4


def test_branches_share_a_solid_torus(mazur_map, mazur):
    resp = analysis.extract_invariant_knot(mazur_map, +1, reference=mazur)
    resm = analysis.extract_invariant_knot(mazur_map, -1, reference=mazur)
    assert resp.degree == resm.degree == 1
    mutual = knots.hausdorff_distance(resp.curve, resm.curve)
    assert mutual < 2.0 * mazur_map.chart.r0


def test_unstable_surface_loops_are_essential(l0_map):
    surf = analysis.project_unstable_surface(l0_map, n_loops=6, n_samples=80, budget=150)
    assert len(surf.loops) == 6
    assert all(w == 1 for w in surf.windings)


def test_heteroclinic_certificate(l0_map):
    het = analysis.verify_heteroclinic(l0_map)
    assert het["ok"]
    assert het["max_invariance_residual"] < 1e-7
    assert all(k is not None and k <= 200 for k in het["forward_iterations"])
    assert all(k is not None and k <= 200 for k in het["backward_iterations"])


def test_census_aggregates_all_checks(mazur_map, mazur):
    summary = analysis.census(mazur_map, reference=mazur)
    assert summary["ok"], summary["checks"]
    assert summary["morse_indices"] == [0, 1, 2, 3]
    assert summary["invariant_knots"]["mutual_hausdorff"] < 2 * mazur_map.chart.r0
    import json

    json.dumps(summary)  # machine-readable for CI
