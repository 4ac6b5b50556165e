"""Desk-scale numerical laboratory for the Pompeiu problem and the related
over-determined Helmholtz symmetry problem."""

from .geometry import Ball, Ellipsoid, StarShape, TriMesh, load_mesh
from .helmholtz import defect_sweep, overdetermined_ball_solution, mps_defect
from .indicator_fourier import chi_ft_ball, chi_ft_surface, chi_ft_volume, pompeiu_scan

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "Ellipsoid",
    "StarShape",
    "TriMesh",
    "chi_ft_ball",
    "chi_ft_surface",
    "chi_ft_volume",
    "defect_sweep",
    "overdetermined_ball_solution",
    "load_mesh",
    "mps_defect",
    "pompeiu_scan",
]
