"""Decisions and certificates for Heisenberg uniqueness pairs."""

from .certificates import (
    FourierPair,
    SmoothBump,
    VerificationReport,
    bump,
    build_identity_cex,
    build_orbit_cex,
    build_thm1_cex,
    shrink_seed,
    verify_vanishing,
    wave_convergence,
    wave_demo,
)
from .cone import (
    ConeInstance,
    build_frame,
    classify,
    cross_validate_hyperbola,
    decide_cone,
    decide_single_hyperplane,
    rotation_params,
    slice_coefficients,
)
from .curves import (
    Affine,
    BoundedPiecewiseLinear,
    Interval,
    MonotoneBijection,
    PiecewiseLinear,
    compose,
    invert,
    map_interval,
)
from .decider import decide, decide_axis, decide_bounded, decide_general, density_check
from .dynamics import (
    GapSet,
    GeometricGapFamily,
    detect_identity_interval,
    fixed_points_of_square,
    interval_order,
    iterate,
    orbit_limit,
    wandering_check,
)
from .errors import HupkitError, TruncationWarning
from .instances import HUP, NOT_HUP, UNKNOWN, CrossInstance, Decision, line
from .rationality import rationality_test

__version__ = "0.1.0"
