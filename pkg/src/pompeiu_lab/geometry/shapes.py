"""Parametric shapes.

Each parametric shape maps a unit direction ``u`` (the parameter, living on
the unit sphere) to a boundary point ``s(u)``.  The map, outward normal and
area Jacobian relative to the solid-angle measure are all closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import real_spherical_harmonic, real_spherical_harmonic_gradient, sphere_grid


def _vec3(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BoundaryMap:
    """Boundary points, unit outward normals and dS/dOmega at parameters u."""

    points: np.ndarray
    normals: np.ndarray
    jacobian: np.ndarray


class ParametricShape:
    center: np.ndarray

    def boundary_map(self, u: np.ndarray) -> BoundaryMap:
        raise NotImplementedError

    def tangents(self, u: np.ndarray, u_theta: np.ndarray, u_phi: np.ndarray):
        """Derivatives (s_theta, s_phi) given the parameter-sphere tangents."""
        raise NotImplementedError

    def translated(self, a):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Ball(ParametricShape):
    radius: float = 1.0
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "center", _vec3(self.center, "center"))

    @property
    def volume(self) -> float:
        return 4.0 * np.pi * self.radius**3 / 3.0

    @property
    def area(self) -> float:
        return 4.0 * np.pi * self.radius**2

    def boundary_map(self, u):
        u = np.asarray(u, dtype=float)
        R = self.radius
        return BoundaryMap(self.center + R * u, u.copy(), np.full(u.shape[:-1], R * R))

    def tangents(self, u, u_theta, u_phi):
        return self.radius * u_theta, self.radius * u_phi

    def translated(self, a):
        return Ball(self.radius, self.center + np.asarray(a, dtype=float))


@dataclass(frozen=True, eq=False)
class Ellipsoid(ParametricShape):
    """Image of the unit ball under x = frame @ diag(semi_axes) @ z + center."""

    semi_axes: tuple = (1.0, 1.0, 1.0)
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    frame: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        ax = tuple(float(a) for a in self.semi_axes)
        if len(ax) != 3 or min(ax) <= 0:
            raise ValueError("ellipsoid semi-axes must be three positive numbers")
        frame = np.array(self.frame, dtype=float)
        if frame.shape != (3, 3) or not np.allclose(frame.T @ frame, np.eye(3), atol=1e-12):
            raise ValueError("ellipsoid frame must be an orthonormal 3x3 matrix")
        frame.setflags(write=False)
        object.__setattr__(self, "semi_axes", ax)
        object.__setattr__(self, "center", _vec3(self.center, "center"))
        object.__setattr__(self, "frame", frame)

    @property
    def matrix(self) -> np.ndarray:
        return self.frame * np.array(self.semi_axes)

    @property
    def volume(self) -> float:
        a, b, c = self.semi_axes
        return 4.0 * np.pi * a * b * c / 3.0

    def boundary_map(self, u):
        u = np.asarray(u, dtype=float)
        A = self.matrix
        pts = self.center + u @ A.T
        # Nanson: n dS = det(A) A^{-T} u dOmega
        m = (u / np.array(self.semi_axes)) @ self.frame.T
        norm = np.linalg.norm(m, axis=-1)
        det = abs(np.prod(self.semi_axes))
        return BoundaryMap(pts, m / norm[..., None], det * norm)

    def tangents(self, u, u_theta, u_phi):
        A = self.matrix
        return u_theta @ A.T, u_phi @ A.T

    def translated(self, a):
        return Ellipsoid(self.semi_axes, self.center + np.asarray(a, dtype=float), self.frame)


@dataclass(frozen=True, eq=False)
class StarShape(ParametricShape):
    """Radial graph rho(u) = r0 * (1 + sum eps_lm Y_lm(u)) about ``center``.

    ``coeffs`` maps (l, m) to eps_lm.
    """

    r0: float = 1.0
    coeffs: dict = field(default_factory=dict)
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError("star shape needs r0 > 0")
        coeffs = {(int(l), int(m)): float(e) for (l, m), e in dict(self.coeffs).items()}
        for l, m in coeffs:
            if l < 0 or abs(m) > l:
                raise ValueError(f"invalid harmonic index (l={l}, m={m})")
        object.__setattr__(self, "r0", float(self.r0))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", _vec3(self.center, "center"))
        lmax = max((l for l, _ in coeffs), default=0)
        probe = sphere_grid(4 * lmax + 60).directions
        if np.min(self.rho(probe)) <= 0:
            raise ValueError("invalid star shape: radial function is not positive everywhere")

    def rho(self, u):
        u = np.asarray(u, dtype=float)
        out = np.ones(u.shape[:-1])
        for (l, m), e in self.coeffs.items():
            out = out + e * real_spherical_harmonic(l, m, u)
        return self.r0 * out

    def rho_surface_gradient(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for (l, m), e in self.coeffs.items():
            out = out + e * real_spherical_harmonic_gradient(l, m, u)
        return self.r0 * out

    def boundary_map(self, u):
        u = np.asarray(u, dtype=float)
        rho = self.rho(u)
        grad = self.rho_surface_gradient(u)
        # gradient of F(x) = |x - c| - rho(x_hat) on the surface
        g = u - grad / rho[..., None]
        gn = np.linalg.norm(g, axis=-1)
        return BoundaryMap(self.center + rho[..., None] * u, g / gn[..., None], rho * rho * gn)

    def tangents(self, u, u_theta, u_phi):
        rho = self.rho(u)[..., None]
        grad = self.rho_surface_gradient(u)
        d_t = np.sum(grad * u_theta, axis=-1, keepdims=True)
        d_p = np.sum(grad * u_phi, axis=-1, keepdims=True)
        return d_t * u + rho * u_theta, d_p * u + rho * u_phi

    def translated(self, a):
        return StarShape(self.r0, self.coeffs, self.center + np.asarray(a, dtype=float))
