"""Timing comparison of the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  The first compiled call
per kernel is excluded (compilation is cached on disk after that).
"""

import time

import numpy as np

from hopfms import _kernels_nb as nb
from hopfms import _kernels_np as pnp
from hopfms import knots


def timeit(fn, *args, repeat=5):
    fn(*args)  # warm-up (and numba compilation)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def row(name, t_nb, t_np):
    print(f"{name:28s} numba {t_nb * 1e3:9.3f} ms   numpy {t_np * 1e3:9.3f} ms   x{t_np / t_nb:6.1f}")


def main():
    rng = np.random.default_rng(0)

    pts = rng.uniform(-1, 1, size=(20_000, 3)) * np.array([6.0, 1.4, 1.4])
    row(
        "field_eval_batch (2e4)",
        timeit(nb.field_eval_batch, pts, False, 1.2, 1.8),
        timeit(pnp.field_eval_batch, pts, False, 1.2, 1.8),
    )

    batch = np.ascontiguousarray(pts[:200])
    row(
        "integrate_phi_batch (200x1)",
        timeit(nb.integrate_phi_batch, batch, 1.0, 1e-3, False, 1.2, 1.8),
        timeit(pnp.integrate_phi_batch, batch, 1.0, 1e-3, False, 1.2, 1.8),
    )

    curve = knots.mazur_knot(resolution=800)
    E = np.ascontiguousarray(curve.embedding_points())
    seg = np.linalg.norm(np.diff(E, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    row(
        "min_segment_clearance (800)",
        timeit(nb.min_segment_clearance, E, cum, 0.5),
        timeit(pnp.min_segment_clearance, E, cum, 0.5),
    )

    P = np.ascontiguousarray(E[:-1, :3])
    w = np.full(len(P), 0.05)
    row(
        "min_pair_ratio (800)",
        timeit(nb.min_pair_ratio, P, cum[: len(P)], w, 0.5),
        timeit(pnp.min_pair_ratio, P, cum[: len(P)], w, 0.5),
    )


if __name__ == "__main__":
    main()
