"""Fourier transform of a domain's indicator and the zero-sphere scanner.

The transform is chi(xi) = int_D exp(i xi.x) dx.  It is available three ways:
closed form (ball, ellipsoid), volume quadrature and a boundary integral
obtained from the divergence theorem.  The routes are independent, so each
serves as an oracle for the others.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import Ball, Ellipsoid, shape_volume, surface_samples, volume_samples
from .numerics import RootList, SphericalGrid, golden_minimize, sphere_grid

ZERO_THRESHOLD = 1e-8
DEFAULT_GRID_DEGREE = 30
THREADS_ENV = "POMPEIU_LAB_THREADS"


@dataclass(frozen=True)
class WaveVector:
    k: float
    alpha: np.ndarray

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("wave number must be positive")
        a = np.asarray(self.alpha, dtype=float)
        n = np.linalg.norm(a)
        if abs(n - 1.0) > 1e-14:
            a = a / n
        object.__setattr__(self, "alpha", a)

    @property
    def xi(self) -> np.ndarray:
        return self.k * self.alpha


def as_xi(xi) -> np.ndarray:
    if isinstance(xi, WaveVector):
        return xi.xi
    return np.asarray(xi, dtype=float)


def _ball_profile(rho: np.ndarray) -> np.ndarray:
    """(sin rho - rho cos rho) / rho^3 with its Taylor branch near zero."""
    rho = np.asarray(rho, dtype=float)
    out = np.empty_like(rho)
    small = rho < 1e-2
    r2 = rho[small] ** 2
    out[small] = 1.0 / 3.0 - r2 / 30.0 + r2 * r2 / 840.0 - r2**3 / 45360.0
    r = rho[~small]
    out[~small] = (np.sin(r) - r * np.cos(r)) / r**3
    return out


def chi_ft_ball(R: float, xi, center=None) -> np.ndarray:
    """Closed form 4 pi R^3 (sin rho - rho cos rho) / rho^3 with rho = |xi| R."""
    if not R > 0:
        raise ValueError("ball radius must be positive")
    x = as_xi(xi)
    rho = np.linalg.norm(x, axis=-1) * R
    val = (4.0 * np.pi * R**3 * _ball_profile(rho)).astype(complex)
    if center is not None:
        val = val * np.exp(1j * (x @ np.asarray(center, dtype=float)))
    return val


def chi_ft_ellipsoid(shape: Ellipsoid, xi) -> np.ndarray:
    """det(A) exp(i xi.c) chi_ball(A^T xi; R=1) for x = A z + c."""
    x = as_xi(xi)
    a = shape.semi_axes
    if a[0] == a[1] == a[2]:
        # a sphere: any frame gives the ball
        return chi_ft_ball(a[0], x, shape.center)
    A = shape.matrix
    det = abs(np.linalg.det(A))
    return det * np.exp(1j * (x @ shape.center)) * chi_ft_ball(1.0, x @ A)


def chi_ft_closed_form(shape, xi):
    if isinstance(shape, Ball):
        return chi_ft_ball(shape.radius, xi, shape.center)
    if isinstance(shape, Ellipsoid):
        return chi_ft_ellipsoid(shape, xi)
    raise TypeError(f"no closed form for {type(shape).__name__}")


def has_closed_form(shape) -> bool:
    return isinstance(shape, (Ball, Ellipsoid))


def chi_ft_volume(shape, xi, resolution: int | None = None, samples=None) -> np.ndarray:
    """Sum_i w_i exp(i xi.x_i) over interior samples."""
    vs = samples if samples is not None else volume_samples(shape, resolution)
    x = as_xi(xi)
    phase = np.exp(1j * (np.atleast_2d(x) @ vs.points.T))
    val = phase @ vs.weights
    return val.reshape(x.shape[:-1])


def chi_ft_surface(shape, xi, resolution: int | None = None, samples=None) -> np.ndarray:
    """(1 / (i |xi|^2)) int_S exp(i xi.s) (xi.N) ds.

    Valid since div(exp(i xi.x) xi / (i |xi|^2)) = exp(i xi.x).
    """
    x = as_xi(xi)
    x2 = np.atleast_2d(x)
    k2 = np.einsum("ij,ij->i", x2, x2)
    if np.any(k2 < 1e-16):
        raise ValueError("|xi| below 1e-8: use chi_ft_volume")
    ss = samples if samples is not None else surface_samples(shape, resolution)
    phase = np.exp(1j * (x2 @ ss.points.T))
    flux = x2 @ ss.normals.T
    val = (phase * flux) @ ss.weights / (1j * k2)
    return val.reshape(x.shape[:-1])


def moving_average_plane_wave(shape: Ball, xi, y, resolution: int | None = None) -> complex:
    """int_D exp(i xi.(y + x)) dx by quadrature, for a ball.

    The ball is rotation invariant, so averaging over rotations is trivial;
    the value equals exp(i xi.y) chi(xi) and vanishes for every y when |xi|
    lies on a zero sphere.
    """
    if not isinstance(shape, Ball):
        raise TypeError("moving average is implemented only for balls")
    x = as_xi(xi)
    vs = volume_samples(shape, resolution)
    return complex(np.exp(1j * ((vs.points + np.asarray(y, dtype=float)) @ x)) @ vs.weights)


# --------------------------------------------------------------------------
# zero-sphere scan


@dataclass(frozen=True, eq=False)
class PompeiuScanResult:
    """Sup over directions of |chi(k alpha)| along a k grid.

    ``m_values[i]`` is max_alpha |chi(k_i alpha)|, which vanishes exactly on a
    zero sphere.  ``min_values``/``argmin_directions`` record the smallest
    directional value at each k.  Candidates are grid-resolved, not proven
    isolated.
    """

    k_grid: np.ndarray
    m_values: np.ndarray
    min_values: np.ndarray
    argmin_directions: np.ndarray
    zero_candidates: RootList
    normalization: float
    grid_degree: int
    n_directions: int
    threshold: float
    floor: float


def n_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _chi_on_sphere(shape, k: float, dirs: np.ndarray, samples) -> np.ndarray:
    xi = k * dirs
    if has_closed_form(shape):
        return chi_ft_closed_form(shape, xi)
    return chi_ft_volume(shape, xi, samples=samples)


def _sup_and_min(shape, k, dirs, samples):
    vals = np.abs(_chi_on_sphere(shape, k, dirs, samples))
    i = int(np.argmin(vals))
    return float(vals.max()), float(vals[i]), i


def pompeiu_scan(
    shape,
    k_min: float,
    k_max: float,
    k_step: float,
    grid: SphericalGrid | None = None,
    resolution: int | None = None,
    threshold: float = ZERO_THRESHOLD,
    threads: int | None = None,
) -> PompeiuScanResult:
    """Scan m(k) = max_alpha |chi(k alpha)| and refine its near-zero minima.

    Each interior local minimum of the sampled curve is refined by golden
    section with the direction grid held fixed; a refined minimum counts as
    a zero-sphere candidate when m < threshold * |D|.
    """
    if not 0 < k_min < k_max:
        raise ValueError("need 0 < k_min < k_max")
    if not k_step > 0:
        raise ValueError("k_step must be positive")
    grid = grid if grid is not None else sphere_grid(DEFAULT_GRID_DEGREE)
    dirs = grid.directions
    samples = None if has_closed_form(shape) else volume_samples(shape, resolution)
    vol = shape_volume(shape, resolution)
    n = int(np.floor((k_max - k_min) / k_step + 1e-9)) + 1
    ks = k_min + k_step * np.arange(n)

    def one(k):
        return _sup_and_min(shape, k, dirs, samples)

    workers = threads if threads is not None else n_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, ks))
    else:
        rows = [one(k) for k in ks]
    m = np.array([r[0] for r in rows])
    mins = np.array([r[1] for r in rows])
    argmin = dirs[[r[2] for r in rows]]

    def m_of(k):
        return _sup_and_min(shape, k, dirs, samples)[0]

    cands, resid = [], []
    for i in range(1, n - 1):
        if m[i] <= m[i - 1] and m[i] <= m[i + 1] and m[i] < min(m[i - 1], m[i + 1]):
            k_star, val = golden_minimize(m_of, ks[i - 1], ks[i], ks[i + 1])
            if val < threshold * vol:
                cands.append(k_star)
                resid.append(val)
    return PompeiuScanResult(
        k_grid=ks,
        m_values=m,
        min_values=mins,
        argmin_directions=argmin,
        zero_candidates=RootList(np.array(cands), np.array(resid)),
        normalization=vol,
        grid_degree=grid.degree,
        n_directions=len(grid),
        threshold=threshold,
        floor=float(m.min() / vol),
    )
