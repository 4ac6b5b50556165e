"""Quadrature samples on boundaries and interiors, plus boundary diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..numerics import find_roots, gauss_legendre, sphere_grid
from .mesh import TriMesh
from .shapes import ParametricShape

DEFAULT_RESOLUTION = 40
DEFAULT_RADIAL_ORDER = 40
DEFAULT_MESH_ORDER = 4


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    """Weighted boundary points with unit outward normals (arrays of length n)."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True, eq=False)
class VolumeSamples:
    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True, eq=False)
class ParamPoints:
    """Boundary points with parameters (p, q) = (theta, phi) and tangents."""

    p: np.ndarray
    q: np.ndarray
    points: np.ndarray
    s_p: np.ndarray
    s_q: np.ndarray
    normals: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=16)
def _grid(p: int):
    return sphere_grid(p)


def _angle_tangents(theta, phi):
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    u_t = np.stack([ct * cp, ct * sp, -st], axis=-1)
    u_p = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    return u_t, u_p


def _triangle_rule(order: int):
    """Collapsed Gauss-Legendre rule on the reference triangle (area 1/2)."""
    g = gauss_legendre(order)
    x = 0.5 * (g.nodes + 1)
    w = 0.5 * g.weights
    a, b = np.meshgrid(x, x, indexing="ij")
    wa, wb = np.meshgrid(w, w, indexing="ij")
    b1 = a.ravel()
    b2 = (b * (1 - a)).ravel()
    wt = (wa * wb * (1 - a)).ravel()
    return b1, b2, wt


def _tet_rule(order: int):
    """Collapsed Gauss-Legendre rule on the reference tetrahedron (volume 1/6)."""
    g = gauss_legendre(order)
    x = 0.5 * (g.nodes + 1)
    w = 0.5 * g.weights
    a, b, c = np.meshgrid(x, x, x, indexing="ij")
    wa, wb, wc = np.meshgrid(w, w, w, indexing="ij")
    b1 = a
    b2 = b * (1 - a)
    b3 = c * (1 - a) * (1 - b)
    wt = wa * wb * wc * (1 - a) ** 2 * (1 - b)
    return b1.ravel(), b2.ravel(), b3.ravel(), wt.ravel()


def surface_samples(shape, resolution: int | None = None) -> SurfaceSamples:
    """Boundary quadrature.

    Parametric shapes: the degree-``resolution`` sphere grid pushed through
    the boundary map with Jacobian weights.  Meshes: a collapsed Gauss rule
    of order ``resolution`` on every triangle.
    """
    if isinstance(shape, TriMesh):
        order = resolution or DEFAULT_MESH_ORDER
        b1, b2, wt = _triangle_rule(order)
        v = shape.vertices
        a, b, c = v[shape.faces[:, 0]], v[shape.faces[:, 1]], v[shape.faces[:, 2]]
        e1, e2 = b - a, c - a
        cr = np.cross(e1, e2)
        dbl_area = np.linalg.norm(cr, axis=1)
        normals = cr / dbl_area[:, None]
        pts = a[:, None, :] + b1[None, :, None] * e1[:, None, :] + b2[None, :, None] * e2[:, None, :]
        w = dbl_area[:, None] * wt[None, :]
        nrm = np.broadcast_to(normals[:, None, :], pts.shape)
        return SurfaceSamples(pts.reshape(-1, 3), np.ascontiguousarray(nrm).reshape(-1, 3), w.ravel())
    if not isinstance(shape, ParametricShape):
        raise TypeError(f"unsupported shape {type(shape).__name__}")
    g = _grid(resolution or DEFAULT_RESOLUTION)
    bm = shape.boundary_map(g.directions)
    return SurfaceSamples(bm.points, bm.normals, g.weights * bm.jacobian)


def volume_samples(shape, resolution: int | None = None, radial_order: int | None = None) -> VolumeSamples:
    """Interior quadrature.

    Parametric shapes use cones from the center: x = c + r (s(u) - c) with a
    radial Gauss rule in r and dV = r^2 dr ((s - c) . N) dS.  Meshes use a
    tetrahedral fan from the vertex centroid; for meshes that are not
    star-shaped about it some tetrahedra carry negative weight.
    """
    if isinstance(shape, TriMesh):
        order = resolution or DEFAULT_MESH_ORDER
        b1, b2, b3, wt = _tet_rule(order)
        v = shape.vertices
        c = shape.center
        e1 = v[shape.faces[:, 0]] - c
        e2 = v[shape.faces[:, 1]] - c
        e3 = v[shape.faces[:, 2]] - c
        det = np.einsum("ij,ij->i", e1, np.cross(e2, e3))
        pts = (c + b1[None, :, None] * e1[:, None, :] + b2[None, :, None] * e2[:, None, :]
               + b3[None, :, None] * e3[:, None, :])
        w = det[:, None] * wt[None, :]
        return VolumeSamples(pts.reshape(-1, 3), w.ravel())
    if not isinstance(shape, ParametricShape):
        raise TypeError(f"unsupported shape {type(shape).__name__}")
    g = _grid(resolution or DEFAULT_RESOLUTION)
    bm = shape.boundary_map(g.directions)
    rel = bm.points - shape.center
    cone = g.weights * bm.jacobian * np.einsum("ij,ij->i", rel, bm.normals)
    rr = gauss_legendre(radial_order or DEFAULT_RADIAL_ORDER)
    r = 0.5 * (rr.nodes + 1)
    wr = 0.5 * rr.weights * r * r
    pts = shape.center + r[:, None, None] * rel[None, :, :]
    w = wr[:, None] * cone[None, :]
    return VolumeSamples(pts.reshape(-1, 3), w.ravel())


def param_points(shape: ParametricShape, resolution: int | None = None) -> ParamPoints:
    g = _grid(resolution or DEFAULT_RESOLUTION)
    u = g.directions
    u_t, u_p = _angle_tangents(g.theta, g.phi)
    bm = shape.boundary_map(u)
    s_t, s_p = shape.tangents(u, u_t, u_p)
    return ParamPoints(g.theta, g.phi, bm.points, s_t, s_p, bm.normals, g.weights * bm.jacobian)


def cross_field(samples: SurfaceSamples) -> np.ndarray:
    """Pointwise [s, N] for every boundary sample."""
    return np.cross(samples.points, samples.normals)


def sphericity_check(shape: ParametricShape, resolution: int | None = None) -> dict:
    """Diagnostics max|s.s_p|, max|s.s_q| and the area-weighted variance of |s|^2.

    All three vanish exactly when the boundary is a sphere about the origin.
    """
    if not isinstance(shape, ParametricShape):
        raise TypeError("sphericity_check needs a parametric shape")
    pp = param_points(shape, resolution)
    s = pp.points
    ssq = np.einsum("ij,ij->i", s, s)
    w = pp.weights / pp.weights.sum()
    mean = np.dot(w, ssq)
    return {
        "max_s_dot_sp": float(np.max(np.abs(np.einsum("ij,ij->i", s, pp.s_p)))),
        "max_s_dot_sq": float(np.max(np.abs(np.einsum("ij,ij->i", s, pp.s_q)))),
        "var_s_squared": float(np.dot(w, (ssq - mean) ** 2)),
    }


def shift_origin(shape, a):
    """Same geometry with every point moved by ``a`` (normals unchanged)."""
    return shape.translated(a)


def _param_axis(shape, p_hat: np.ndarray) -> np.ndarray:
    # parameter direction whose great circle maps to the silhouette of an ellipsoid
    if hasattr(shape, "semi_axes"):
        ax = (p_hat @ shape.frame) / np.array(shape.semi_axes)
        return ax / np.linalg.norm(ax)
    return p_hat


def silhouette_points(shape: ParametricShape, p, n_points: int = 64, tol: float = 1e-10) -> SurfaceSamples:
    """Boundary points where N . p = 0, one meridian scan per azimuth.

    Meridians run from the parameter pole associated with ``p``; along each
    one the roots of N(theta) . p are found by scan and bisection.  All roots
    are returned; connectivity of the resulting curve is not asserted.
    """
    if not isinstance(shape, ParametricShape):
        raise TypeError("silhouette_points needs a parametric shape")
    p_hat = np.asarray(p, dtype=float)
    p_hat = p_hat / np.linalg.norm(p_hat)
    axis = _param_axis(shape, p_hat)
    helper = np.eye(3)[np.argmin(np.abs(axis))]
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)

    pts, nrm = [], []
    for phi in (np.arange(n_points) + 0.5) * (2 * np.pi / n_points):
        side = np.cos(phi) * e1 + np.sin(phi) * e2

        def u_of(t):
            return np.sin(t) * side + np.cos(t) * axis

        def g(t):
            return float(shape.boundary_map(u_of(t)[None, :]).normals[0] @ p_hat)

        roots = find_roots(g, 0.0, np.pi, n_scan=65, tol=tol)
        for t in roots.roots:
            bm = shape.boundary_map(u_of(t)[None, :])
            pts.append(bm.points[0])
            nrm.append(bm.normals[0])
    if not pts:
        empty = np.zeros((0, 3))
        return SurfaceSamples(empty, empty, np.zeros(0))
    pts_a = np.array(pts)
    return SurfaceSamples(pts_a, np.array(nrm), np.full(len(pts_a), 2 * np.pi / n_points))
