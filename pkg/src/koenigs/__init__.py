"""Koenigs models of continuous semigroups of the unit disc.

Build a model from closed-form piecewise boundary data, read off its boundary
fixed points and contact arcs, move it around with shear conjugacies, and look
at the disc side through a numerical Riemann map.
"""
from .boundary import (BoundaryPoint, BoundaryPointClass, BoundaryReport, ContactArc, FixedPoint,
                       StripComponent, analyse, classify_fixed_points, detect_contact_arcs, life_time)
from .conformal import (ConvergenceError, RiemannMap, boundary_trajectory, build_map, cluster_points,
                        cluster_set, composed_map, disc_semigroup, generator_at, locate)
from .conjugation import (EllipticShear, ShearMap, apply_shear, apply_tau0, compose_shears, invert_shear,
                          normalize_to_strip, pushforward_model, shear, transport_boundary_report,
                          verify_conjugacy)
from .elliptic import elliptic_denormalize, elliptic_normalize, theta_lambda
from .model import (EllipticGroup, EllipticSpiral, EllipticStarlike, HyperbolicGroup, Interval, LowerBoundary,
                    ModelError, NonElliptic, RadialBoundary, SemigroupType, check_model, classify_type, flow,
                    membership, starlike_model, strip_model, validate_model)
from .piecewise import ExpressionError, PiecewiseFn, parse_piece
from .reproduction import EXAMPLES, reproduce

__version__ = "0.1.0"

__all__ = [
    "BoundaryPoint", "BoundaryPointClass", "BoundaryReport", "ContactArc", "FixedPoint", "StripComponent",
    "analyse", "classify_fixed_points", "detect_contact_arcs", "life_time",
    "ConvergenceError", "RiemannMap", "boundary_trajectory", "build_map", "cluster_points", "cluster_set",
    "composed_map", "disc_semigroup", "generator_at", "locate",
    "EllipticShear", "ShearMap", "apply_shear", "apply_tau0", "compose_shears", "invert_shear",
    "normalize_to_strip", "pushforward_model", "shear", "transport_boundary_report", "verify_conjugacy",
    "elliptic_denormalize", "elliptic_normalize", "theta_lambda",
    "EllipticGroup", "EllipticSpiral", "EllipticStarlike", "HyperbolicGroup", "Interval", "LowerBoundary",
    "ModelError", "NonElliptic", "RadialBoundary", "SemigroupType", "check_model", "classify_type", "flow",
    "membership", "starlike_model", "strip_model", "validate_model",
    "ExpressionError", "PiecewiseFn", "parse_piece", "EXAMPLES", "reproduce",
]
