"""Crooked planes, affine Schottky groups and crooked tilings of Minkowski 2+1 space."""

from .affine import (
    AffineSchottkyConfig,
    LocateResult,
    Region,
    ValidationReport,
    enumerate_tiles,
    hyperbolicity_audit,
    locate,
    nested_sequence,
    shipped_example,
    validate,
    word_to_isometry,
    x_contains,
)
from .config import ConfigError, load, load_shipped, loads
from .isometry import AffineIsometry, LinearIsometry, cartan_decompose, classify, hyperbolic_data
from .lorentz import ORIGIN, CirclePoint, Interval, SpacePoint, bform, hyperbolicity, null_frame
from .planes import CrookedHalfSpace, CrookedPlane, Membership, membership, separation
from .schottky import SchottkyConfig, build_generator, verify_schottky
from .words import Letter, Word
from .zigzag import DefinitePlane, angles, region, separation_report, slice_plane

__version__ = "0.1.0"

__all__ = [
    "AffineIsometry",
    "AffineSchottkyConfig",
    "CirclePoint",
    "ConfigError",
    "CrookedHalfSpace",
    "CrookedPlane",
    "DefinitePlane",
    "Interval",
    "Letter",
    "LinearIsometry",
    "LocateResult",
    "Membership",
    "ORIGIN",
    "Region",
    "SchottkyConfig",
    "SpacePoint",
    "ValidationReport",
    "Word",
    "angles",
    "bform",
    "build_generator",
    "cartan_decompose",
    "classify",
    "enumerate_tiles",
    "hyperbolic_data",
    "hyperbolicity",
    "hyperbolicity_audit",
    "load",
    "load_shipped",
    "loads",
    "locate",
    "membership",
    "nested_sequence",
    "null_frame",
    "region",
    "separation",
    "separation_report",
    "shipped_example",
    "slice_plane",
    "validate",
    "verify_schottky",
    "word_to_isometry",
    "x_contains",
]
