"""Desk-scale simulator and checks for curvature flow with a Gaussian-type density."""

from .geometry import (
    Ball,
    Curve2,
    InvalidShapeError,
    Mesh3,
    Shape,
    centroid,
    curvature_normals,
    curve_curvature_normals,
    diameter_bound,
    dual_measures,
    enclosed_measure,
    is_convex,
    measure,
    mesh_curvature_normals,
    signed_area,
)
from .balls import chebyshev_center, circumball, inball, smallest_enclosing_ball
from .hausdorff import hausdorff_distance
from .transforms import (
    GaussianContext,
    TimeDomainError,
    conformality_defect,
    gaussian_shrink_time,
    gaussian_sphere_fate,
    gaussian_to_normalized,
    mcf_shrink_time,
    mu_for_singular_time,
    normalized_to_gaussian,
    recompose,
    rescale_from_hat,
    rescale_to_hat,
    scale_factor,
    sphere_radius_gaussian,
    sphere_radius_mcf,
    time_forward,
    time_inverse,
    translate_decompose,
    translation_at,
)
from .flow import (
    DEGENERATE,
    FIXED_POINT,
    FlowParams,
    FlowState,
    NumericalAbortError,
    RUNNING,
    RadialDensity,
    SHRUNK_TO_POINT,
    TIME_LIMIT,
    Trajectory,
    adaptive_dt,
    run,
    step,
    velocity_density,
    velocity_rescaled,
)
from .generators import (
    circle,
    ellipse,
    ellipsoid,
    generate_shape,
    icosphere,
    random_convex,
    rounded_square,
)

__version__ = "0.1.0"
