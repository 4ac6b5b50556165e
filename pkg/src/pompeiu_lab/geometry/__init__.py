from .mesh import MeshError, MeshFormatError, TriMesh, format_off, icosphere, load_mesh, octahedron, parse_off
from .sampling import (
    ParamPoints,
    SurfaceSamples,
    VolumeSamples,
    cross_field,
    param_points,
    shift_origin,
    silhouette_points,
    sphericity_check,
    surface_samples,
    volume_samples,
)
from .shapes import Ball, Ellipsoid, ParametricShape, StarShape


def shape_volume(shape, resolution=None) -> float:
    """Exact volume where known, otherwise the interior quadrature total."""
    vol = getattr(shape, "volume", None)
    if vol is not None:
        return float(vol)
    return float(volume_samples(shape, resolution).weights.sum())


__all__ = [
    "Ball",
    "Ellipsoid",
    "MeshError",
    "MeshFormatError",
    "ParamPoints",
    "ParametricShape",
    "StarShape",
    "SurfaceSamples",
    "TriMesh",
    "VolumeSamples",
    "cross_field",
    "format_off",
    "icosphere",
    "load_mesh",
    "octahedron",
    "param_points",
    "parse_off",
    "shape_volume",
    "shift_origin",
    "silhouette_points",
    "sphericity_check",
    "surface_samples",
    "volume_samples",
]
