"""Entire Helmholtz solutions, exact ball solutions and the boundary defect solver.

Fields expose ``value(x)`` and ``gradient(x)`` on arrays of points with shape
(..., 3).  Spherical-wave expansions are taken about a field's ``center``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Ball, surface_samples, volume_samples
from .numerics import (
    find_roots,
    gauss_legendre,
    golden_minimize,
    real_spherical_harmonic,
    real_spherical_harmonic_gradient,
    sph_harm_index,
    spherical_bessel_j,
    spherical_bessel_j_all,
)

VARIETY_GAP = 1e-6


class WavenumberMismatchError(ValueError):
    pass


def _radial_split(x, center):
    rel = np.asarray(x, dtype=float) - center
    r = np.linalg.norm(rel, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    u = rel / safe[..., None]
    u = np.where((r > 0)[..., None], u, np.array([0.0, 0.0, 1.0]))
    return r, u


def _spherical_wave(L, coeffs, k, x, center, grad):
    """Sum a_lm j_l(k r) Y_lm(x_hat) and optionally its gradient."""
    r, u = _radial_split(x, center)
    kr = k * r
    jl = spherical_bessel_j_all(L + 1, kr)
    val = np.zeros(r.shape)
    g = np.zeros(r.shape + (3,)) if grad else None
    for (l, m), a in coeffs.items():
        if a == 0:
            continue
        y = real_spherical_harmonic(l, m, u)
        val = val + a * jl[l] * y
        if grad:
            if l == 0:
                dj = -jl[1]
                j_over = np.zeros_like(kr)
            else:
                dj = (l * jl[l - 1] - (l + 1) * jl[l + 1]) / (2 * l + 1)
                j_over = (jl[l - 1] + jl[l + 1]) / (2 * l + 1)
            gy = real_spherical_harmonic_gradient(l, m, u)
            # grad[j_l(kr) Y(x_hat)] = k j_l'(kr) Y u + (j_l(kr)/r) grad_S Y
            g = g + a * k * ((dj * y)[..., None] * u + j_over[..., None] * gy)
    return val, g


@dataclass(frozen=True, eq=False)
class HelmholtzBasisField:
    """U(x) = sum_{l <= L} a_lm j_l(k |x - c|) Y_lm((x - c)/|x - c|)."""

    k: float
    coeffs: dict
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("wave number must be positive")
        coeffs = {(int(l), int(m)): float(a) for (l, m), a in dict(self.coeffs).items()}
        for l, m in coeffs:
            if l < 0 or abs(m) > l:
                raise ValueError(f"invalid harmonic index (l={l}, m={m})")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "k", float(self.k))

    @property
    def L(self) -> int:
        return max((l for l, _ in self.coeffs), default=0)

    @classmethod
    def random(cls, k, L, rng, center=None):
        idx = sph_harm_index(L)
        a = rng.standard_normal(len(idx))
        a /= np.linalg.norm(a)
        return cls(k, dict(zip(idx, a)), np.zeros(3) if center is None else center)

    def value(self, x):
        return _spherical_wave(self.L, self.coeffs, self.k, x, self.center, False)[0]

    def gradient(self, x):
        return _spherical_wave(self.L, self.coeffs, self.k, x, self.center, True)[1]


@dataclass(frozen=True, eq=False)
class PlaneWave:
    k: float
    beta: np.ndarray

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("wave number must be positive")
        b = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "beta", b / np.linalg.norm(b))
        object.__setattr__(self, "k", float(self.k))

    def value(self, x):
        return np.exp(1j * self.k * (np.asarray(x, dtype=float) @ self.beta))

    def gradient(self, x):
        return (1j * self.k * self.value(x))[..., None] * self.beta


@dataclass(frozen=True, eq=False)
class BallEigenfunction:
    """L^2-normalised Dirichlet eigenfunction norm * j_l(k r) Y_lm on a ball."""

    l: int
    m: int
    n: int
    R: float
    k: float
    norm: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def value(self, x):
        return _spherical_wave(self.l, {(self.l, self.m): self.norm}, self.k, x, self.center, False)[0]

    def gradient(self, x):
        return _spherical_wave(self.l, {(self.l, self.m): self.norm}, self.k, x, self.center, True)[1]

    def normal_derivative(self, points, normals=None):
        """u_N at boundary points; closed form on the ball's own sphere."""
        if normals is None:
            _, u = _radial_split(points, self.center)
            dj = _jl_deriv(self.l, self.k * self.R)
            return self.norm * self.k * dj * real_spherical_harmonic(self.l, self.m, u)
        return np.einsum("...i,...i->...", self.gradient(points), normals)


def _jl_deriv(l, x):
    j = spherical_bessel_j_all(l + 1, x)
    if l == 0:
        return -j[1]
    return (l * j[l - 1] - (l + 1) * j[l + 1]) / (2 * l + 1)


def bessel_zeros(l: int, count: int, tol: float = 1e-12) -> np.ndarray:
    """First ``count`` positive zeros of j_l."""
    hi = (count + l / 2 + 2) * np.pi
    roots = find_roots(lambda t: spherical_bessel_j(l, t), 1e-3, hi, n_scan=int(hi * 20), tol=tol).roots
    if len(roots) < count:
        raise RuntimeError(f"root bracket exhausted: found {len(roots)} zeros of j_{l}, wanted {count}")
    return roots[:count]


def radial_norm_squared(l: int, k: float, R: float, order: int = 80) -> float:
    """int_0^R j_l(k r)^2 r^2 dr by Gauss-Legendre."""
    g = gauss_legendre(order)
    r = 0.5 * R * (g.nodes + 1)
    return float(0.5 * R * np.dot(g.weights, spherical_bessel_j(l, k * r) ** 2 * r * r))


def ball_dirichlet_eigenfunction(l: int, m: int, n: int, R: float = 1.0, center=None) -> BallEigenfunction:
    if l < 0 or abs(m) > l or n < 1:
        raise ValueError("need l >= 0, |m| <= l, n >= 1")
    k = float(bessel_zeros(l, n)[-1] / R)
    norm = 1.0 / np.sqrt(radial_norm_squared(l, k, R))
    return BallEigenfunction(l, m, n, R, k, norm, np.zeros(3) if center is None else np.asarray(center, float))


def ball_eigenspace(l: int, n: int, R: float = 1.0, center=None) -> list[BallEigenfunction]:
    """All 2l+1 eigenfunctions sharing the eigenvalue k_ln."""
    return [ball_dirichlet_eigenfunction(l, m, n, R, center) for m in range(-l, l + 1)]


# --------------------------------------------------------------------------
# residual checks


def _laplacian_fd(f, x, h):
    x = np.asarray(x, dtype=float)
    lap = 0.0
    f0 = f(x)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        lap = lap + (-f(x + 2 * e) + 16 * f(x + e) - 30 * f0 + 16 * f(x - e) - f(x - 2 * e)) / (12 * h * h)
    return lap, f0


def helmholtz_residual(field, x, k: float, rhs: float = 0.0) -> float:
    """|(lap + k^2) u - rhs| at a single point via a fourth-order stencil."""
    f = field.value if hasattr(field, "value") else field
    x = np.asarray(x, dtype=float)
    h = 1e-3 * (1 + np.linalg.norm(x))
    lap, f0 = _laplacian_fd(f, x, h)
    return float(np.abs(lap + k * k * f0 - rhs))


# --------------------------------------------------------------------------
# over-determined ball problem


@dataclass(frozen=True, eq=False)
class OverdeterminedBallSolution:
    """u = (1 - j_0(k r)/j_0(k R)) / k^2 solving (lap + k^2) u = 1, u = u_N = 0 on S."""

    R: float
    n: int
    k_star: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def ball(self) -> Ball:
        return Ball(self.R, self.center)

    @property
    def j0_boundary(self) -> float:
        return spherical_bessel_j(0, self.k_star * self.R)

    def value(self, x):
        r = np.linalg.norm(np.asarray(x, dtype=float) - self.center, axis=-1)
        return (1.0 - spherical_bessel_j(0, self.k_star * r) / self.j0_boundary) / self.k_star**2

    def gradient(self, x):
        rel = np.asarray(x, dtype=float) - self.center
        r = np.linalg.norm(rel, axis=-1)
        # d/dr j_0(kr) = -k j_1(kr) and j_1(kr)/r = k j_1(kr)/(kr)
        jl = spherical_bessel_j_all(2, self.k_star * r)
        j1_over = (jl[0] + jl[2]) / 3.0
        return (j1_over / self.j0_boundary)[..., None] * rel

    def companion_value(self, x):
        """v = u - k^-2: homogeneous solution with v|_S = -k^-2, v_N|_S = 0."""
        return self.value(x) - self.k_star**-2

    def companion_gradient(self, x):
        return self.gradient(x)


def overdetermined_ball_solution(R: float = 1.0, n: int = 1, center=None) -> OverdeterminedBallSolution:
    if n < 1:
        raise ValueError("n must be >= 1")
    k = float(bessel_zeros(1, n)[-1] / R)
    sol = OverdeterminedBallSolution(R, n, k, np.zeros(3) if center is None else np.asarray(center, float))
    # zeros of j_0 and j_1 interlace
    assert abs(sol.j0_boundary) > 1e-12
    return sol


def extended_solution_ft(sol: OverdeterminedBallSolution, xi, resolution: int | None = None):
    """(u~(xi), |u~(xi)(k^2 - |xi|^2) - chi~(xi)|) for u extended by zero outside D."""
    from .indicator_fourier import as_xi, chi_ft_ball

    x = as_xi(xi)
    gap = sol.k_star**2 - float(x @ x)
    if abs(gap) <= VARIETY_GAP:
        raise ValueError("xi lies on the characteristic variety |xi| = k")
    vs = volume_samples(sol.ball, resolution)
    u_ft = complex(np.dot(vs.weights * sol.value(vs.points), np.exp(1j * (vs.points @ x))))
    chi = complex(chi_ft_ball(sol.R, x, sol.center))
    return u_ft, abs(u_ft * gap - chi)


# --------------------------------------------------------------------------
# method of particular solutions defect


@dataclass(frozen=True, eq=False)
class DefectResult:
    k: float
    L: int
    defect: float
    coefficients: dict
    value_misfit: float
    normal_misfit: float
    boundary_constant: float
    n_samples: int


def _basis_columns(k, L, ss, center):
    idx = sph_harm_index(L)
    r, u = _radial_split(ss.points, center)
    kr = k * r
    jl = spherical_bessel_j_all(L + 1, kr)
    vals = np.empty((len(ss), len(idx)))
    dnor = np.empty((len(ss), len(idx)))
    for c, (l, m) in enumerate(idx):
        y = real_spherical_harmonic(l, m, u)
        if l == 0:
            dj, j_over = -jl[1], np.zeros_like(kr)
        else:
            dj = (l * jl[l - 1] - (l + 1) * jl[l + 1]) / (2 * l + 1)
            j_over = (jl[l - 1] + jl[l + 1]) / (2 * l + 1)
        gy = real_spherical_harmonic_gradient(l, m, u)
        grad = k * ((dj * y)[:, None] * u + j_over[:, None] * gy)
        vals[:, c] = jl[l] * y
        dnor[:, c] = np.einsum("ij,ij->i", grad, ss.normals)
    return idx, vals, dnor


def _shape_center(shape):
    return np.asarray(shape.center, dtype=float)


def mps_defect(shape, k: float, L: int = 8, resolution: int | None = None, samples=None) -> DefectResult:
    """Smallest normalised singular value of the boundary-condition matrix.

    Rows enforce u - mean_S(u) = 0 and u_N / k = 0 at weighted boundary
    samples over the basis j_l(k r) Y_lm about the shape center.  Columns of
    one degree l share a common scale (their mean L^2(S) size), which keeps
    the singular values invariant under rotations of the shape.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    if L < 2:
        raise ValueError("basis degree L must be >= 2")
    ss = samples if samples is not None else surface_samples(shape, resolution)
    n_coef = (L + 1) ** 2
    if len(ss) < 4 * n_coef:
        raise ValueError(f"{len(ss)} boundary samples is fewer than 4x the {n_coef} coefficients")
    idx, vals, dnor = _basis_columns(k, L, ss, _shape_center(shape))
    w = ss.weights
    sw = np.sqrt(w)
    area = w.sum()
    mean = (w @ vals) / area
    dev = vals - mean
    dn = dnor / k
    raw_sq = w @ (vals**2) + w @ (dn**2)
    ls = np.array([l for l, _ in idx])
    block = np.zeros(L + 1)
    for l in range(L + 1):
        block[l] = np.sqrt(raw_sq[ls == l].mean())
    if np.any(block < 1e-300):
        raise ValueError("degenerate basis block")
    scale = 1.0 / block[ls]
    M = np.vstack([sw[:, None] * dev * scale, sw[:, None] * dn * scale])
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    if s[0] < 1e-12:
        raise ValueError("degenerate basis: sigma_max below 1e-12")
    v = vh[-1]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    coef = v * scale
    u_s = vals @ coef
    u_n = dnor @ coef
    const = float(w @ u_s / area)
    return DefectResult(
        k=float(k),
        L=L,
        defect=float(s[-1] / s[0]),
        coefficients=dict(zip(idx, coef.tolist())),
        value_misfit=float(np.sqrt(w @ (u_s - const) ** 2)),
        normal_misfit=float(np.sqrt(w @ u_n**2)),
        boundary_constant=const,
        n_samples=len(ss),
    )


@dataclass(frozen=True, eq=False)
class DefectSweep:
    k_grid: np.ndarray
    results: list
    minima: list  # refined DefectResult at each interior local minimum

    @property
    def defects(self) -> np.ndarray:
        return np.array([r.defect for r in self.results])


def defect_sweep(
    shape,
    k_min: float,
    k_max: float,
    k_step: float,
    L: int = 8,
    resolution: int | None = None,
    threads: int | None = None,
) -> DefectSweep:
    if not 0 < k_min < k_max:
        raise ValueError("need 0 < k_min < k_max")
    if not k_step > 0:
        raise ValueError("k_step must be positive")
    from .indicator_fourier import n_threads

    ss = surface_samples(shape, resolution)
    n = int(np.floor((k_max - k_min) / k_step + 1e-9)) + 1
    ks = k_min + k_step * np.arange(n)

    def one(k):
        return mps_defect(shape, k, L, samples=ss)

    workers = threads if threads is not None else n_threads()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ks))
    else:
        results = [one(k) for k in ks]
    d = np.array([r.defect for r in results])
    minima = []
    for i in range(1, n - 1):
        if d[i] < d[i - 1] and d[i] < d[i + 1]:
            k_best, _ = golden_minimize(lambda t: one(t).defect, ks[i - 1], ks[i], ks[i + 1], xtol=1e-10)
            minima.append(one(k_best))
    return DefectSweep(ks, results, minima)


def eigenfunction_inner(u1, u2, shape: Ball, resolution: int | None = None) -> float:
    vs = volume_samples(shape, resolution)
    return float(vs.weights @ (u1.value(vs.points) * u2.value(vs.points)))


__all__ = [
    "BallEigenfunction",
    "DefectResult",
    "DefectSweep",
    "HelmholtzBasisField",
    "OverdeterminedBallSolution",
    "PlaneWave",
    "WavenumberMismatchError",
    "ball_dirichlet_eigenfunction",
    "ball_eigenspace",
    "bessel_zeros",
    "defect_sweep",
    "eigenfunction_inner",
    "extended_solution_ft",
    "overdetermined_ball_solution",
    "helmholtz_residual",
    "mps_defect",
    "radial_norm_squared",
]
