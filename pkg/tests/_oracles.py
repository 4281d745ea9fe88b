"""Independent reference computations used by several test modules."""

import numpy as np

from hopfms.knots import HopfKnotCurve


def winding_oracle(curve: HopfKnotCurve, refine: int = 10) -> int:
    """Brute-force circle-factor winding.

    Maps the circle coordinate to the plane, linearly refines every
    segment, and accumulates exact atan2 increments — no shared code with
    the library's degree routine.
    """
    ang = 2.0 * np.pi * curve.c
    z = np.column_stack([np.cos(ang), np.sin(ang)])
    fine = []
    for k in range(len(z) - 1):
        for j in range(refine):
            w = j / refine
            fine.append((1.0 - w) * z[k] + w * z[k + 1])
    fine.append(z[-1])
    fine = np.asarray(fine)
    a = np.arctan2(fine[:, 1], fine[:, 0])
    total = np.sum(np.angle(np.exp(1j * np.diff(a))))
    return int(round(total / (2.0 * np.pi)))


def synthetic_loop(rng, degree: int, n: int = 200) -> HopfKnotCurve:
    """Smooth random loop in S^2 x S^1 with a prescribed circle winding."""
    s = np.arange(n + 1) / n
    amp = rng.uniform(0.0, 0.15)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    c = (degree * s + amp * np.sin(2.0 * np.pi * s + phase) + rng.uniform(0, 1)) % 1.0
    a, b = rng.normal(size=(2, 3))
    d = rng.normal(size=3) * 0.2
    u = (
        np.outer(np.cos(2.0 * np.pi * s), a)
        + np.outer(np.sin(2.0 * np.pi * s), b)
        + d
    )
    u /= np.linalg.norm(u, axis=1)[:, None]
    u[-1] = u[0]
    c[-1] = c[0]
    return HopfKnotCurve(f"synthetic-deg{degree}", u, c)
