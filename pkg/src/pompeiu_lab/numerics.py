"""Special functions, quadrature rules, root finding and dense least squares.

Everything here works on numpy arrays and is pure: no caching of mutable
state beyond memoised polynomial coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, pi, sqrt
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.optimize import brentq, minimize_scalar

__all__ = [
    "DegenerateSystemError",
    "Quadrature1D",
    "RootList",
    "SphericalGrid",
    "find_roots",
    "gauss_legendre",
    "golden_minimize",
    "least_squares_solve",
    "min_singular_value",
    "real_spherical_harmonic",
    "real_spherical_harmonic_gradient",
    "sph_harm_index",
    "sphere_grid",
    "spherical_bessel_j",
    "spherical_bessel_j_all",
    "spherical_bessel_j_deriv",
    "spherical_bessel_j_over_x",
]

SMALL_ARG = 1e-2


class DegenerateSystemError(np.linalg.LinAlgError):
    """Raised when a least-squares matrix is numerically rank deficient."""


@dataclass(frozen=True)
class Quadrature1D:
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], a: float = -1.0, b: float = 1.0):
        half = 0.5 * (b - a)
        x = 0.5 * (b + a) + half * self.nodes
        return half * np.dot(self.weights, f(x))


@dataclass(frozen=True)
class SphericalGrid:
    """Product quadrature on the unit sphere.

    ``directions`` has shape (n, 3); ``theta``/``phi`` are the matching polar
    and azimuthal angles.  Exact for spherical harmonics up to ``degree``.
    """

    directions: np.ndarray
    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    degree: int

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray):
        return np.dot(self.weights, values)


@dataclass(frozen=True)
class RootList:
    roots: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def gauss_legendre(n: int) -> Quadrature1D:
    """Gauss-Legendre rule with ``n`` nodes on [-1, 1]."""
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    x, w = npleg.leggauss(n)
    return Quadrature1D(nodes=x, weights=w)


def sphere_grid(p: int) -> SphericalGrid:
    """Gauss-Legendre in cos(theta) times a uniform rule in phi.

    ``p // 2 + 1`` polar nodes integrate polynomials in cos(theta) of degree
    ``p + 1``; ``2 * (p // 2 + 1)`` azimuthal nodes are exact for Fourier
    modes below that count.  Together the rule is exact for every product of
    harmonics whose degrees sum to ``p`` or less.
    """
    if p < 0:
        raise ValueError("degree must be non-negative")
    n_theta = p // 2 + 1
    n_phi = 2 * n_theta
    rule = gauss_legendre(n_theta)
    cos_t = rule.nodes[::-1]
    w_t = rule.weights[::-1]
    theta = np.arccos(cos_t)
    phi = (np.arange(n_phi) + 0.5) * (2 * pi / n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    sin_t = np.sin(tt)
    dirs = np.stack([sin_t * np.cos(pp), sin_t * np.sin(pp), np.cos(tt)], axis=-1).reshape(-1, 3)
    # renormalise: sin(arccos(c)) loses a few ulps near the poles
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    weights = np.repeat(w_t * (2 * pi / n_phi), n_phi)
    return SphericalGrid(
        directions=dirs,
        weights=weights,
        theta=tt.ravel(),
        phi=pp.ravel(),
        degree=p,
    )


# --------------------------------------------------------------------------
# spherical Bessel functions


def _series(l: int, x: np.ndarray) -> np.ndarray:
    # j_l(x) = x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    dfact = 1.0
    for i in range(1, 2 * l + 2, 2):
        dfact *= i
    y = -0.5 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 6):
        term = term * y / (k * (2 * l + 2 * k + 1))
        total = total + term
    return x**l / dfact * total


def _upward(lmax: int, x: np.ndarray) -> np.ndarray:
    out = np.empty((lmax + 1,) + x.shape)
    s, c = np.sin(x), np.cos(x)
    out[0] = s / x
    if lmax >= 1:
        out[1] = s / (x * x) - c / x
    for l in range(1, lmax):
        out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1]
    return out


def _miller(lmax: int, x: np.ndarray) -> np.ndarray:
    """Downward recurrence normalised with sum_n (2n+1) j_n^2 = 1."""
    start = lmax + 20 + int(sqrt(40.0 * (lmax + 1)))
    vals = np.zeros((start + 2,) + x.shape)
    vals[start] = 1e-300
    for n in range(start, 0, -1):
        vals[n - 1] = (2 * n + 1) / x * vals[n] - vals[n + 1]
        big = np.abs(vals[n - 1]) > 1e200
        if np.any(big):
            vals[:, big] *= 1e-200
    scale = np.max(np.abs(vals), axis=0)
    vals = vals / scale
    norm = np.sqrt(np.sum((2 * np.arange(start + 2) + 1)[:, None] * vals.reshape(start + 2, -1) ** 2, axis=0))
    vals = vals / norm.reshape(x.shape)
    # fix the overall sign against whichever of the closed-form j_0, j_1 is larger
    j0 = np.sin(x) / x
    j1 = np.sin(x) / (x * x) - np.cos(x) / x
    ref = np.where(np.abs(j0) >= np.abs(j1), j0 * vals[0], j1 * vals[1])
    sign = np.where(ref < 0, -1.0, 1.0)
    return vals[: lmax + 1] * sign


def spherical_bessel_j_all(lmax: int, x) -> np.ndarray:
    """j_0 ... j_lmax at ``x``; result has shape ``(lmax + 1,) + shape(x)``.

    Upward recurrence is used where ``x >= l`` and Miller's downward
    recurrence where ``x < l``; a short power series covers ``x < 1e-2``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("spherical_bessel_j is defined here for x >= 0")
    shape = x.shape
    xf = x.ravel()
    out = np.empty((lmax + 1, xf.size))
    small = xf < SMALL_ARG
    if np.any(small):
        xs = xf[small]
        for l in range(lmax + 1):
            out[l, small] = _series(l, xs)
    rest = ~small
    if np.any(rest):
        xr = xf[rest]
        up = _upward(lmax, xr)
        need_down = xr < lmax
        if np.any(need_down):
            down = _miller(lmax, xr[need_down])
            ls = np.arange(lmax + 1)[:, None]
            use_down = ls > xr[need_down][None, :]
            sub = up[:, need_down]
            up[:, need_down] = np.where(use_down, down, sub)
        out[:, rest] = up
    return out.reshape((lmax + 1,) + shape)


def spherical_bessel_j(l: int, x):
    """Spherical Bessel function of the first kind, j_l(x)."""
    res = spherical_bessel_j_all(l, x)[l]
    return res.item() if np.ndim(res) == 0 else res


def spherical_bessel_j_deriv(l: int, x):
    """j_l'(x) = (l j_{l-1} - (l+1) j_{l+1}) / (2l+1); j_0' = -j_1."""
    allj = spherical_bessel_j_all(l + 1, x)
    if l == 0:
        res = -allj[1]
    else:
        res = (l * allj[l - 1] - (l + 1) * allj[l + 1]) / (2 * l + 1)
    return res.item() if np.ndim(res) == 0 else res


def spherical_bessel_j_over_x(l: int, x):
    """j_l(x) / x, finite at the origin (value 1/3 for l = 1)."""
    allj = spherical_bessel_j_all(l + 1, x)
    if l == 0:
        xa = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            res = np.where(xa == 0, np.inf, allj[0] / np.where(xa == 0, 1.0, xa))
    else:
        res = (allj[l - 1] + allj[l + 1]) / (2 * l + 1)
    return res.item() if np.ndim(res) == 0 else res


# --------------------------------------------------------------------------
# real spherical harmonics
#
# Y_lm(u) = c_lm * P_l^(|m|)(u_z) * Re/Im (u_x + i u_y)^|m|, where P_l^(m) is the
# m-th derivative of the Legendre polynomial.  This form is polynomial in the
# Cartesian components, so gradients have no pole singularity.


def sph_harm_index(L: int) -> list[tuple[int, int]]:
    """(l, m) pairs for l <= L ordered by l then m."""
    return [(l, m) for l in range(L + 1) for m in range(-l, l + 1)]


@lru_cache(maxsize=None)
def _legendre_deriv_coeffs(l: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    c = npleg.leg2poly(np.eye(l + 1)[l])
    d = np.polynomial.polynomial.polyder(c, m) if m else c
    dd = np.polynomial.polynomial.polyder(d, 1) if len(d) > 1 else np.zeros(1)
    return d, dd


def _norm_const(l: int, m: int) -> float:
    am = abs(m)
    c = sqrt((2 * l + 1) / (4 * pi) * factorial(l - am) / factorial(l + am))
    return c * sqrt(2.0) if m != 0 else c


def _check_lm(l: int, m: int) -> None:
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid harmonic index (l={l}, m={m}); need |m| <= l")


def _azimuthal(m: int, ux, uy):
    """Re/Im of (ux + i uy)^|m| and its partials in ux, uy."""
    am = abs(m)
    z = ux + 1j * uy
    zm = z**am
    if am == 0:
        zeros = np.zeros_like(ux, dtype=float)
        return np.ones_like(ux, dtype=float), zeros, zeros
    dz = am * z ** (am - 1)
    if m > 0:
        return zm.real, dz.real, (1j * dz).real
    return zm.imag, dz.imag, (1j * dz).imag


def real_spherical_harmonic(l: int, m: int, direction) -> np.ndarray:
    """Orthonormal real spherical harmonic at unit vector(s) ``direction``.

    Positive ``m`` carries cos(m phi), negative ``m`` sin(|m| phi).
    """
    _check_lm(l, m)
    u = np.asarray(direction, dtype=float)
    poly, _ = _legendre_deriv_coeffs(l, abs(m))
    pz = np.polynomial.polynomial.polyval(u[..., 2], poly)
    az, _, _ = _azimuthal(m, u[..., 0], u[..., 1])
    return _norm_const(l, m) * pz * az


def real_spherical_harmonic_gradient(l: int, m: int, direction) -> np.ndarray:
    """Surface gradient of Y_lm on the unit sphere at ``direction``.

    Equals r * grad_x Y_lm(x/|x|) evaluated at r = 1; tangent to the sphere.
    """
    _check_lm(l, m)
    u = np.asarray(direction, dtype=float)
    poly, dpoly = _legendre_deriv_coeffs(l, abs(m))
    pz = np.polynomial.polynomial.polyval(u[..., 2], poly)
    dpz = np.polynomial.polynomial.polyval(u[..., 2], dpoly)
    az, dax, day = _azimuthal(m, u[..., 0], u[..., 1])
    c = _norm_const(l, m)
    g = c * np.stack([pz * dax, pz * day, dpz * az], axis=-1)
    radial = np.sum(g * u, axis=-1, keepdims=True)
    return g - radial * u


# --------------------------------------------------------------------------
# roots, minimisation, linear algebra


def find_roots(
    f: Callable[[float], float],
    a: float,
    b: float,
    n_scan: int = 200,
    tol: float = 1e-12,
) -> RootList:
    """All sign-change roots of ``f`` on [a, b].

    ``f`` is sampled at ``n_scan`` equispaced points; each bracket with a sign
    change is refined with Brent's bisection hybrid.  Sign changes whose
    refined residual exceeds ``tol`` are poles or jumps and are discarded.
    """
    if not a < b:
        raise ValueError("need a < b")
    if n_scan < 2:
        raise ValueError("need n_scan >= 2")
    xs = np.linspace(a, b, n_scan)
    fs = np.array([f(x) for x in xs], dtype=float)
    roots = []
    for i in range(n_scan - 1):
        f0, f1 = fs[i], fs[i + 1]
        if f0 == 0.0:
            roots.append(xs[i])
        elif f0 * f1 < 0:
            roots.append(brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    if fs[-1] == 0.0:
        roots.append(xs[-1])
    kept, res = [], []
    for r in roots:
        fr = abs(f(r))
        if fr <= tol and (not kept or r > kept[-1]):
            kept.append(r)
            res.append(fr)
    return RootList(roots=np.array(kept), residuals=np.array(res))


def golden_minimize(f: Callable[[float], float], lo: float, mid: float, hi: float, xtol: float = 1e-12) -> tuple[float, float]:
    """Golden-section search on a bracket with f(mid) <= f(lo), f(hi)."""
    res = minimize_scalar(f, bracket=(lo, mid, hi), method="golden", options={"xtol": xtol, "maxiter": 500})
    x = float(res.x)
    if not lo <= x <= hi:
        # bracket was flat; fall back to the grid point
        x = mid
    return x, float(f(x))


def least_squares_solve(A, b, rcond: float = 1e-12) -> tuple[np.ndarray, float]:
    """Minimise ||A x - b||_2 by QR.  Returns (x, residual norm).

    Raises DegenerateSystemError if sigma_min < rcond * sigma_max.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    m, n = A.shape
    if m < n:
        raise ValueError(f"underdetermined system: {m} rows < {n} columns")
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0 or sv[-1] < rcond * sv[0]:
        raise DegenerateSystemError(
            f"rank-deficient system: sigma_min={sv[-1]:.3e}, sigma_max={sv[0]:.3e}"
        )
    q, r = np.linalg.qr(A)
    x = np.linalg.solve(r, q.conj().T @ b)
    resid = float(np.linalg.norm(A @ x - b))
    return x, resid


def min_singular_value(A) -> tuple[float, np.ndarray]:
    """Smallest singular value of ``A`` and its unit right singular vector."""
    A = np.asarray(A)
    if A.size == 0:
        raise ValueError("empty matrix")
    if A.shape[0] < A.shape[1]:
        # wide matrix: the thin SVD does not span the null space
        _, _, vh = np.linalg.svd(A, full_matrices=True)
        return 0.0, vh[-1].conj()
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    return float(s[-1]), vh[-1].conj()
