"""Boundary and volume identities behind the ball characterisation.

Covers the domain integral of Helmholtz fields and its rotational
derivative, the boundary moment against the cross field [s, N], the
orthogonality of boundary traces to eigenfunction normal derivatives, Gram
matrices and sampled determinants of those normal derivatives, and the
translation mechanics of the cross-field expansion.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import Ball, cross_field, shape_volume, silhouette_points, surface_samples, volume_samples
from .helmholtz import WavenumberMismatchError
from .numerics import DegenerateSystemError, least_squares_solve


@dataclass
class IdentityReport:
    name: str
    lhs: list
    rhs: list
    abs_discrepancy: float
    rel_discrepancy: float
    tolerance: float
    passed: bool
    status: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    @classmethod
    def compare(cls, name, lhs, rhs, tolerance, scale=1.0, details=None):
        lhs_a = np.atleast_1d(np.asarray(lhs))
        rhs_a = np.atleast_1d(np.asarray(rhs))
        disc = float(np.max(np.abs(lhs_a - rhs_a))) if lhs_a.size else 0.0
        rel = disc / scale
        return cls(name, _jsonable(lhs_a), _jsonable(rhs_a), disc, rel, tolerance, rel <= tolerance,
                   details=details or {})

    @classmethod
    def skipped(cls, name, reason):
        return cls(name, [], [], 0.0, 0.0, 0.0, True, status="skipped", details={"reason": reason})

    def to_dict(self) -> dict:
        return asdict(self)


def _jsonable(a) -> list:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        if np.all(a.imag == 0):
            return a.real.tolist()
        return [[float(z.real), float(z.imag)] for z in a.ravel()]
    return a.tolist()


# --------------------------------------------------------------------------
# domain and boundary integrals


def integral_over_domain(U, shape, resolution: int | None = None, rotation=None, samples=None):
    """int_D U(g x) dx by volume quadrature (g = identity unless given)."""
    vs = samples if samples is not None else volume_samples(shape, resolution)
    pts = vs.points if rotation is None else vs.points @ np.asarray(rotation).T
    return vs.weights @ U.value(pts)


def rotated_integrals(U, shape, n_rotations: int = 10, seed: int = 0, resolution: int | None = None) -> np.ndarray:
    """int_D U(g x) dx for random rotations g."""
    from scipy.spatial.transform import Rotation

    vs = volume_samples(shape, resolution)
    mats = Rotation.random(n_rotations, random_state=seed).as_matrix()
    return np.array([integral_over_domain(U, shape, rotation=g, samples=vs) for g in mats])


def rotational_derivative_integral(U, alpha, shape, resolution: int | None = None, samples=None):
    """int_D grad U(x) . [alpha, x] dx; ``alpha`` may hold several directions (n, 3)."""
    vs = samples if samples is not None else volume_samples(shape, resolution)
    a = np.asarray(alpha, dtype=float)
    # grad U . [alpha, x] = alpha . [x, grad U]
    moment = vs.weights @ np.cross(vs.points, U.gradient(vs.points))
    return a @ moment


def surface_moment(U, shape, resolution: int | None = None, samples=None) -> np.ndarray:
    """int_S U(s) [s, N] ds (a 3-vector, complex if U is)."""
    ss = samples if samples is not None else surface_samples(shape, resolution)
    return (ss.weights * U.value(ss.points)) @ cross_field(ss)


def boundary_orthogonality(U, eig, shape: Ball, resolution: int | None = None, rtol: float = 1e-10):
    """int_S U(s) u_jN(s) ds for an eigenfunction at U's own wave number."""
    if not isinstance(shape, Ball):
        raise TypeError("boundary orthogonality is evaluated on balls only")
    if abs(U.k - eig.k) > rtol * eig.k:
        raise WavenumberMismatchError(f"field wave number {U.k} differs from eigenvalue {eig.k}")
    ss = surface_samples(shape, resolution)
    return (ss.weights * U.value(ss.points)) @ eig.normal_derivative(ss.points)


# --------------------------------------------------------------------------
# normal-derivative systems


def _trace_matrix(eigs, ss, shape) -> np.ndarray:
    closed = isinstance(shape, Ball)
    cols = [e.normal_derivative(ss.points, None if closed else ss.normals) for e in eigs]
    return np.stack(cols, axis=1)


def gram_normal_derivatives(eigs, shape: Ball, resolution: int | None = None):
    """G_jj' = int_S u_jN u_j'N ds and its smallest eigenvalue."""
    ks = np.array([e.k for e in eigs])
    if np.ptp(ks) > 1e-10 * ks.max():
        raise WavenumberMismatchError("eigenfunctions do not share one eigenvalue")
    ss = surface_samples(shape, resolution)
    T = _trace_matrix(eigs, ss, shape)
    G = T.T @ (ss.weights[:, None] * T)
    return G, float(np.linalg.eigvalsh(G).min())


def det_sample_matrix(eigs, points, normals=None) -> float:
    """det(u_jN(s_m)) with rows indexed by points."""
    pts = np.asarray(points, dtype=float)
    if len(pts) != len(eigs):
        raise ValueError("need as many points as eigenfunctions")
    M = np.stack([e.normal_derivative(pts, normals) for e in eigs], axis=1)
    return float(np.linalg.det(M))


@dataclass(frozen=True)
class DeterminantHarness:
    n_trials: int
    n_nondegenerate: int
    threshold: float
    scale: float
    determinants: np.ndarray


def determinant_harness(eigs, shape, n_trials: int = 100, seed: int = 0, rel_threshold: float = 1e-6,
                        resolution: int | None = None) -> DeterminantHarness:
    """Draw J-tuples of boundary points (area weighted) and count |det| > rel_threshold * scale^J."""
    ss = surface_samples(shape, resolution)
    T = _trace_matrix(eigs, ss, shape)
    J = len(eigs)
    scale = float(np.abs(T).max())
    thr = rel_threshold * scale**J
    streams = np.random.SeedSequence(seed).spawn(n_trials)
    p = ss.weights / ss.weights.sum()
    dets = np.empty(n_trials)
    for t, child in enumerate(streams):
        rng = np.random.default_rng(child)
        idx = rng.choice(len(ss), size=J, replace=True, p=p)
        dets[t] = np.linalg.det(T[idx])
    return DeterminantHarness(n_trials, int(np.sum(np.abs(dets) > thr)), thr, scale, dets)


@dataclass(frozen=True)
class CrossExpansion:
    component: int
    coefficients: np.ndarray
    residual: float
    relative_residual: float


def cross_expansion(shape, eigs, samples=None, resolution: int | None = None) -> list[CrossExpansion]:
    """Weighted least-squares fit of each component of [s, N] onto span{u_jN}."""
    ss = samples if samples is not None else surface_samples(shape, resolution)
    sw = np.sqrt(ss.weights)
    A = sw[:, None] * _trace_matrix(eigs, ss, shape)
    cf = cross_field(ss)
    out = []
    for c in range(3):
        b = sw * cf[:, c]
        bn = float(np.linalg.norm(b))
        if bn == 0.0:
            # still validate the trial set
            least_squares_solve(A, b)
            out.append(CrossExpansion(c, np.zeros(len(eigs)), 0.0, 0.0))
            continue
        x, res = least_squares_solve(A, b)
        out.append(CrossExpansion(c, x, res, res / bn))
    return out


# --------------------------------------------------------------------------
# translation mechanics


def translation_mechanics_check(shape, a, resolution: int | None = None, growth_scales=(1.0, 10.0, 100.0)) -> IdentityReport:
    """[s + a, N] = [s, N] + [a, N] pointwise, and linear growth of max |[s + a, N]| in |a|."""
    ss = surface_samples(shape, resolution)
    a = np.asarray(a, dtype=float)
    lhs = np.cross(ss.points + a, ss.normals)
    rhs = cross_field(ss) + np.cross(a, ss.normals)
    disc = float(np.max(np.abs(lhs - rhs)))
    mag = max(1.0, float(np.linalg.norm(a))) * max(1.0, float(np.abs(ss.points).max()))
    tol = 1e-14 * mag
    a_hat = a / np.linalg.norm(a) if np.linalg.norm(a) > 0 else np.array([1.0, 0.0, 0.0])
    maxima = [float(np.max(np.linalg.norm(np.cross(ss.points + t * a_hat, ss.normals), axis=1)))
              for t in growth_scales]
    ratios = [maxima[i + 1] / maxima[i] for i in range(len(maxima) - 1)]
    return IdentityReport("translation_additivity", [disc], [0.0], disc, disc / mag, 1e-14, disc <= tol,
                          details={"growth_scales": list(growth_scales), "growth_maxima": maxima,
                                   "growth_ratios": ratios})


def projected_cross_identity(shape, a, q, eigs, resolution: int | None = None, n_points: int = 64) -> IdentityReport:
    """Project the translated expansion on q: N.p with p = [q, a].

    N.p vanishes on the silhouette for direction p by construction; over the
    whole boundary N.p is fitted onto span{u_jN} and the fit residual and
    coefficients B_j are reported.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    p = np.cross(q, a)
    pn = np.linalg.norm(p)
    if pn < 1e-12:
        raise ValueError("q is parallel to a: p = [q, a] vanishes")
    p_hat = p / pn
    sil = silhouette_points(shape, p_hat, n_points=n_points)
    on_curve = float(np.max(np.abs(sil.normals @ p_hat))) if len(sil) else float("nan")
    ss = surface_samples(shape, resolution)
    sw = np.sqrt(ss.weights)
    A = sw[:, None] * _trace_matrix(eigs, ss, shape)
    b = sw * (ss.normals @ p_hat)
    try:
        B, res = least_squares_solve(A, b)
        rel = res / float(np.linalg.norm(b))
    except DegenerateSystemError:
        B, rel = np.full(len(eigs), np.nan), float("nan")
    tol = 1e-10
    return IdentityReport("projected_cross_identity", [on_curve], [0.0], on_curve, on_curve, tol,
                          bool(on_curve <= tol),
                          details={"p": p_hat.tolist(), "silhouette_points": len(sil),
                                   "B": np.asarray(B).tolist(), "fit_relative_residual": rel})


__all__ = [
    "CrossExpansion",
    "DeterminantHarness",
    "IdentityReport",
    "cross_expansion",
    "det_sample_matrix",
    "determinant_harness",
    "gram_normal_derivatives",
    "integral_over_domain",
    "boundary_orthogonality",
    "projected_cross_identity",
    "rotated_integrals",
    "rotational_derivative_integral",
    "shape_volume",
    "surface_moment",
    "translation_mechanics_check",
]
