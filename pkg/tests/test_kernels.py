"""Agreement between the compiled kernels and the pure-numpy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from hopfms import _kernels_nb as nb
from hopfms import _kernels_np as pnp
from hopfms import kernels, knots


def _cyl_points(rng, n=200):
    pts = rng.uniform(-1, 1, size=(n, 3)) * np.array([6.0, 2.0, 2.0])
    keep = np.hypot(pts[:, 1], pts[:, 2]) <= 2.0
    return np.ascontiguousarray(pts[keep])


def test_field_eval_agreement(rng):
    X = _cyl_points(rng)
    for raw in (False, True):
        a = nb.field_eval_batch(X, raw, 1.2, 1.8)
        b = pnp.field_eval_batch(X, raw, 1.2, 1.8)
        assert np.max(np.abs(a - b)) < 1e-14


def test_integrate_agreement(rng):
    X = _cyl_points(rng, 40)
    for t in (1.0, -1.0, 0.37):
        a = nb.integrate_phi_batch(X, t, 1e-2, False, 1.2, 1.8)
        b = pnp.integrate_phi_batch(X, t, 1e-2, False, 1.2, 1.8)
        assert np.max(np.abs(a - b)) < 1e-11


def test_dense_trajectory_agreement():
    x0 = np.array([-1.0, 0.0, 1e-3])
    a = nb.integrate_phi_dense(x0, 1.0, 20, 1e-2, False, 1.2, 1.8)
    b = pnp.integrate_phi_dense(x0, 1.0, 20, 1e-2, False, 1.2, 1.8)
    assert a.shape == (21, 3)
    assert np.max(np.abs(a - b)) < 1e-11


def test_pair_ratio_agreement(rng):
    curve = knots.mazur_knot(resolution=200)
    P = np.ascontiguousarray(curve.embedding_points()[:, :3])
    seg = np.linalg.norm(np.diff(P, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])[: len(P)]
    w = np.full(len(P), 0.01)
    a = nb.min_pair_ratio(P, cum, w, 0.5)
    b = pnp.min_pair_ratio(P, cum, w, 0.5)
    assert a[0] == pytest.approx(b[0], rel=1e-12)
    assert a[1:] == b[1:]


def test_segment_clearance_agreement():
    for res in (16, 64, 200):
        curve = knots.mazur_knot(resolution=res)
        E = np.ascontiguousarray(curve.embedding_points())
        seg = np.linalg.norm(np.diff(E, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        a = nb.min_segment_clearance(E, cum, 0.5)
        b = pnp.min_segment_clearance(E, cum, 0.5)
        assert a[0] == pytest.approx(b[0], rel=1e-12, abs=1e-14)
        assert a[1:] == b[1:]


def test_backend_flag_selects_numpy():
    assert kernels.BACKEND in ("numba", "numpy")
    out = subprocess.run(
        [sys.executable, "-c", "from hopfms import kernels; print(kernels.BACKEND)"],
        env={**os.environ, "HOPFMS_DISABLE_NUMBA": "1"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
