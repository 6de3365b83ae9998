"""Mesh and point-cloud primitives."""
from .cloud import PointCloud, Rng, as_points, chamfer_distance, farthest_point_sample, sample_surface
from .mesh import Mesh, ObjParseError, Transform, format_obj, load_obj, normalize_unit_box, parse_obj, save_obj
from .synthetic import FAMILIES, LANDMARK_NAMES, PART_NAMES, SyntheticShape, generate_synthetic_family

__all__ = [
    "FAMILIES",
    "LANDMARK_NAMES",
    "Mesh",
    "ObjParseError",
    "PART_NAMES",
    "PointCloud",
    "Rng",
    "SyntheticShape",
    "Transform",
    "as_points",
    "chamfer_distance",
    "farthest_point_sample",
    "format_obj",
    "generate_synthetic_family",
    "load_obj",
    "parse_obj",
    "normalize_unit_box",
    "sample_surface",
    "save_obj",
]
