"""Gravitational N-body problem on the unit 3-sphere and hyperbolic 3-sphere.

Cotangent-potential dynamics, central configurations (ordinary and special),
the relative equilibria they generate, and geodesic counting results, over
both curved spaces through a shared sign convention.
"""

from .manifold import (
    Space,
    GeneratorKind,
    IsometryGenerator,
    inner,
    distance,
    project_point,
    project_tangent,
    isometry_matrix,
    rescale_curvature,
)
from .dynamics import (
    Body,
    Configuration,
    PhaseState,
    ConservedSet,
    Trajectory,
    force_function,
    pair_force,
    grad_U,
    eom_rhs,
    kinetic_energy,
    conserved,
    pairwise_distances,
    generator_momenta,
    integrate,
    trajectory_to_csv,
)
from .inertia import (
    CylindricalSplit,
    cylindrical_split,
    moment_of_inertia,
    grad_I,
    locked_inertia,
    axis_distance_identity,
)
from .centralconfig import (
    CCClass,
    CCReport,
    LevelSetSpec,
    cc_residual,
    lambda_estimate,
    is_special_cc,
    criterion_residual,
    orthogonality_relations,
    classify,
    swap_xy_zw,
    make_report,
    canonicalize,
    equivalent,
    find_cc,
)
from .relequil import (
    REConstraint,
    REFamily,
    REInstance,
    re_family_from_cc,
    pick_member,
    re_criterion_residual,
    certify_rigidity,
)
from .moulton import (
    GeodesicHConfig,
    GeodesicHSolution,
    TwoBodySConfig,
    TwoBodySFamily,
    TwoBodySResult,
    hessian_geodesic_h,
    geodesic_lambda,
    solve_geodesic_h,
    enumerate_geodesic_h,
    solve_two_body_s,
)
from . import errors
from . import fixtures

__version__ = "0.1.0"
