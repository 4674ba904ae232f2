from .curves import CircleArc, Curve, CurveDomainError, PolylineSegment, SineGraph, curve_eval
from .generators import (G1, G2, gen_mapped_square_mesh, gen_polar_disk_mesh,
                         map_to_sine_domain, unit_square_quads)
from .io import MeshParseError, mesh_from_dict, mesh_read, mesh_to_dict, mesh_write
from .mesh import Edge, Element, Mesh, MeshError, polygon_area, polygon_centroid
from .validate import ValidationReport, element_diameter, kernel_ball, mesh_validate

__all__ = [
    "CircleArc", "Curve", "CurveDomainError", "PolylineSegment", "SineGraph", "curve_eval",
    "G1", "G2", "gen_mapped_square_mesh", "gen_polar_disk_mesh", "map_to_sine_domain",
    "unit_square_quads", "MeshParseError", "mesh_from_dict", "mesh_read", "mesh_to_dict",
    "mesh_write", "Edge", "Element", "Mesh", "MeshError", "polygon_area", "polygon_centroid",
    "ValidationReport", "element_diameter", "kernel_ball", "mesh_validate",
]
