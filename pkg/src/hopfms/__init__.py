"""Constructive realization of gradient-like diffeomorphisms of the
3-sphere with four fixed points and a single non-compact heteroclinic
curve, classified by the knot their one-dimensional separatrix projects
to in S^2 x S^1.

Module map: ``geometry`` (charts and the orbit-space projection),
``knots`` (sampled Hopf knots, degree, embeddedness, lifting),
``dynamics`` (the model flow and its saddles), ``tube`` (equivariant
framed tubes and the conjugating chart), ``realization`` (the glued
diffeomorphism and its transfer to S^3), ``analysis`` (fixed-point
census, separatrix knots, heteroclinic certification), ``cli`` and
``svgplot`` (front end and figures).
"""

from hopfms.analysis import (
    FixedPointRecord,
    KnotInvariantResult,
    SeparatrixTrace,
    basin_projection,
    census,
    extract_invariant_knot,
    find_fixed_points,
    project_unstable_surface,
    trace_separatrix,
    verify_heteroclinic,
)
from hopfms.dynamics import PhiField, flow_phi, phi, phi_inverse
from hopfms.geometry import OrbitSpacePoint, contract_a, expand_a, project_p, stereographic
from hopfms.kernels import BACKEND
from hopfms.knots import (
    EquivariantCurve,
    HopfKnotCurve,
    catalog_names,
    generalized_mazur,
    generalized_mazur_k,
    hausdorff_distance,
    lift_to_r3,
    load_catalog_knot,
    mazur_knot,
    s1_degree,
    standard_hopf,
    validate_embedding,
)
from hopfms.realization import (
    RealizedMap,
    SphereMap,
    realize,
    sphere_eval,
    to_sphere_map,
    tube_boundary_continuity,
)
from hopfms.tube import TubeChart, build_chart, build_frame, choose_radius

__version__ = "1.0.0"

__all__ = [
    "BACKEND",
    "EquivariantCurve",
    "FixedPointRecord",
    "HopfKnotCurve",
    "KnotInvariantResult",
    "OrbitSpacePoint",
    "PhiField",
    "RealizedMap",
    "SeparatrixTrace",
    "SphereMap",
    "TubeChart",
    "basin_projection",
    "build_chart",
    "build_frame",
    "catalog_names",
    "census",
    "choose_radius",
    "contract_a",
    "expand_a",
    "extract_invariant_knot",
    "find_fixed_points",
    "flow_phi",
    "generalized_mazur",
    "generalized_mazur_k",
    "hausdorff_distance",
    "lift_to_r3",
    "load_catalog_knot",
    "mazur_knot",
    "phi",
    "phi_inverse",
    "project_p",
    "project_unstable_surface",
    "realize",
    "s1_degree",
    "sphere_eval",
    "standard_hopf",
    "stereographic",
    "to_sphere_map",
    "trace_separatrix",
    "tube_boundary_continuity",
    "validate_embedding",
    "verify_heteroclinic",
]
