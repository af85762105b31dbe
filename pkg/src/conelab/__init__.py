"""Numerical laboratory for rotationally symmetric cone-like manifolds.

The package studies warped-product metrics d rho^2 + lambda(rho)^2 d theta^2
(spherical cones, smoothly capped cones and a positive-curvature variant),
the quasilinear operator whose kernel consists of minimal graphs, barrier
functions of the form C theta r^p, the second-variation stability of cones
over equatorial spheres, and direct equivariant area minimization.  All
roads lead to the same sharp threshold kappa* = (2/n) sqrt(n-1).
"""

from .errors import (
    CancellationError,
    ConelabError,
    ConversionError,
    InversionError,
    PreconditionError,
    ThresholdViolation,
)
from .radial_metric import (
    ConditionReport,
    ConformalRadialProfile,
    CurvatureReport,
    NonexistenceVerdict,
    WarpedProfile,
    cap_function,
    cap_slope,
    capped_cone_profile,
    condition_check,
    cone_conformal,
    cone_profile,
    curvature,
    nonexistence_verdict,
    nonradial_ricci_constant,
    positive_curvature_profile,
    sphere_measure,
    table_profile,
    threshold_kappa,
    volume_growth,
    warped_to_conformal,
)
from .graph_operator import (
    BarrierReport,
    BarrierSpec,
    CartesianField,
    ScalarFieldPolar,
    alternate_barrier_field,
    barrier_check,
    barrier_exponent,
    barrier_field,
    default_barrier_grid,
    L_conformal,
    L_fd_oracle,
    L_polar,
    mean_curvature_graph,
)
from .stability import (
    ConeStabilityProblem,
    StabilityVerdict,
    index_form,
    radial_eigenvalue,
    radial_eigenvalue_fd,
    rayleigh_min,
    stability_verdict,
    threshold_bisect,
)
from .area_min import (
    AreaVerdict,
    EquivariantAreaProblem,
    MinimizationResult,
    ScanRow,
    area_gradient,
    area_of_graph,
    default_grid,
    eigenmode_perturbation,
    minimize,
    second_variation_fd,
    seed_perturbation,
    threshold_scan,
)

__version__ = "0.1.0"
