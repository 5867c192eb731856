"""Teichmueller geometry on flat half-translation surfaces."""

from .surface import (
    Cylinder,
    FlatSurface,
    MarkedPoint,
    Pairing,
    apply_teich_stretch,
    cylinder_modulus,
    develop,
    normalize_area,
    plumb,
    rotate_structure,
    validate,
)
from .curves import (
    CurveClass,
    HolonomyStats,
    develop_curve,
    geodesic_length_lower_bound,
    holonomy_stats,
    transform_stats,
    transport_curve,
    twist_curve,
)
from .twist import TwistParameters, leg_point, midpoint_y_star, triangle_vertices, twist_parameters
from .bounds import DistBound, ExtInterval, ext_interval, kerckhoff_lower_bound, stretch_upper_bound
from .torus import TorusClass, TorusPoint, torus_distance, torus_ext, torus_kerckhoff
from .lab import delta_lower_bound, four_point_delta, sweep, uniform_leg_bound
from .fixtures import load_fixture

__version__ = "0.1.0"
