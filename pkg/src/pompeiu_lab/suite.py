"""The identity suite run by ``pompeiu-lab verify``.

Every check returns an IdentityReport.  Checks that only make sense on a
ball (exact solutions at a zero-sphere wave number) are reported as
``skipped`` for other shapes rather than failed.
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    Ball,
    ParametricShape,
    cross_field,
    shape_volume,
    sphericity_check,
    surface_samples,
    volume_samples,
)
from .helmholtz import (
    HelmholtzBasisField,
    PlaneWave,
    ball_eigenspace,
    extended_solution_ft,
    overdetermined_ball_solution,
    helmholtz_residual,
    mps_defect,
)
from .identities import (
    IdentityReport,
    cross_expansion,
    determinant_harness,
    gram_normal_derivatives,
    integral_over_domain,
    boundary_orthogonality,
    projected_cross_identity,
    rotated_integrals,
    rotational_derivative_integral,
    surface_moment,
    translation_mechanics_check,
)
from .indicator_fourier import (
    chi_ft_closed_form,
    chi_ft_surface,
    chi_ft_volume,
    has_closed_form,
    moving_average_plane_wave,
)

TIERS = {
    "parametric": {"geometry": 1e-8, "route": 1e-8, "divergence": 1e-7},
    "mesh": {"geometry": 1e-3, "route": 1e-2, "divergence": 1e-2},
}


def random_directions(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_wave_vectors(rng, n, k_lo=0.1, k_hi=10.0):
    return random_directions(rng, n) * rng.uniform(k_lo, k_hi, n)[:, None]


def random_ball_points(rng, n, R=1.0, center=None):
    d = random_directions(rng, n)
    r = R * rng.uniform(0, 1, n) ** (1 / 3)
    return (0 if center is None else center) + d * r[:, None]


# --------------------------------------------------------------------------
# checks valid for every shape


def general_checks(shape, tier, rng, resolution=None):
    tol = TIERS[tier]
    ss = surface_samples(shape, resolution)
    vs = volume_samples(shape, resolution)
    vol = shape_volume(shape, resolution)
    area = float(ss.weights.sum())
    out = []

    flux = ss.integrate(ss.normals)
    out.append(IdentityReport.compare("divergence_normal_flux", flux, np.zeros(3), tol["geometry"], scale=area))

    v_surf = ss.integrate(np.einsum("ij,ij->i", ss.points, ss.normals)) / 3
    out.append(IdentityReport.compare("volume_two_ways", [v_surf], [vs.weights.sum()], tol["geometry"], scale=vol))

    xi = random_wave_vectors(rng, 50)
    cv = chi_ft_volume(shape, xi, samples=vs)
    cs = chi_ft_surface(shape, xi, samples=ss)
    routes = {"volume_vs_surface": float(np.max(np.abs(cv - cs)) / vol)}
    worst = routes["volume_vs_surface"]
    if has_closed_form(shape):
        cc = chi_ft_closed_form(shape, xi)
        routes["closed_vs_volume"] = float(np.max(np.abs(cc - cv)) / vol)
        routes["closed_vs_surface"] = float(np.max(np.abs(cc - cs)) / vol)
        worst = max(routes.values())
    out.append(IdentityReport("chi_route_agreement", [worst], [0.0], worst * vol, worst, tol["route"],
                              worst <= tol["route"], details=routes))

    cneg = chi_ft_volume(shape, -xi, samples=vs)
    out.append(IdentityReport.compare("chi_conjugate_symmetry", cneg, np.conj(cv), 1e-12, scale=vol))

    lhs, rhs = [], []
    for _ in range(10):
        U = HelmholtzBasisField.random(float(rng.uniform(0.5, 5.0)), 4, rng)
        alphas = random_directions(rng, 5)
        lhs.extend(rotational_derivative_integral(U, alphas, shape, samples=vs))
        rhs.extend(alphas @ surface_moment(U, shape, samples=ss))
    out.append(IdentityReport.compare("divergence_two_route", lhs, rhs, tol["divergence"], scale=vol))

    a = random_directions(rng, 1)[0] * 0.7
    rep = translation_mechanics_check(shape, a, resolution)
    out.append(rep)
    ratio = rep.details["growth_ratios"][-1]
    out.append(IdentityReport("translation_growth", [ratio], [10.0], abs(ratio - 10.0), abs(ratio - 10.0) / 10.0,
                              0.05, 9.5 <= ratio <= 10.5, details=rep.details))

    if isinstance(shape, ParametricShape):
        diag = sphericity_check(shape, resolution)
        cf_max = float(np.max(np.linalg.norm(cross_field(ss), axis=1)))
        sph_tol = 1e-10
        cross_zero = cf_max < sph_tol
        diag_zero = max(diag.values()) < sph_tol
        out.append(IdentityReport("sphericity_equivalence", [max(diag.values())], [0.0], max(diag.values()),
                                  max(diag.values()), sph_tol, cross_zero == diag_zero,
                                  details={**diag, "max_cross_field": cf_max, "sphere_about_origin": diag_zero}))
    else:
        out.append(IdentityReport.skipped("sphericity_equivalence", "needs a parametric boundary"))
    return out


# --------------------------------------------------------------------------
# ball-only checks at the first zero-sphere wave number

BALL_ONLY = [
    "zero_sphere_witness",
    "overdetermined_pde_residual",
    "overdetermined_boundary_traces",
    "companion_boundary_constant",
    "moving_average_witness",
    "fourier_identity_witness",
    "root_domain_integral",
    "root_rotated_integrals",
    "root_rotational_derivative",
    "root_surface_moment",
    "root_boundary_orthogonality",
    "gram_diagonal",
    "determinant_nondegeneracy",
    "cross_expansion_fit",
    "projected_cross_identity",
    "mps_defect_at_kstar",
]


def ball_checks(ball: Ball, rng, resolution=None):
    R, c = ball.radius, ball.center
    vol = ball.volume
    sol = overdetermined_ball_solution(R, 1, c)
    k = sol.k_star
    out = []

    alphas = random_directions(rng, 10)
    chi = chi_ft_closed_form(ball, k * alphas)
    out.append(IdentityReport.compare("zero_sphere_witness", np.abs(chi), np.zeros(10), 1e-10))

    pts = random_ball_points(rng, 100, R, c)
    res = [helmholtz_residual(sol, x, k, rhs=1.0) for x in pts]
    out.append(IdentityReport.compare("overdetermined_pde_residual", [max(res)], [0.0], 1e-6))

    ss512 = surface_samples(ball, 30)
    u_s = sol.value(ss512.points)
    un_s = np.einsum("ij,ij->i", sol.gradient(ss512.points), ss512.normals)
    trace = float(max(np.abs(u_s).max(), np.abs(un_s).max()))
    out.append(IdentityReport("overdetermined_boundary_traces", [trace], [0.0], trace, trace, 1e-8, trace < 1e-8,
                              details={"n_samples": len(ss512)}))

    v_s = sol.companion_value(ss512.points)
    out.append(IdentityReport.compare("companion_boundary_constant", v_s, np.full(len(v_s), -k**-2), 1e-10,
                                      details={"expected": -k**-2}))

    ys = random_ball_points(rng, 20, 3.0)
    alpha = random_directions(rng, 1)[0]
    mav = [abs(moving_average_plane_wave(ball, k * alpha, y, resolution)) for y in ys]
    out.append(IdentityReport.compare("moving_average_witness", mav, np.zeros(20), 1e-8))

    fi = []
    while len(fi) < 20:
        xi = random_wave_vectors(rng, 1, 0.0, 8.0)[0]
        if abs(k * k - xi @ xi) > 1e-2:
            fi.append(extended_solution_ft(sol, xi, resolution)[1])
    out.append(IdentityReport.compare("fourier_identity_witness", fi, np.zeros(20), 1e-6, scale=vol))

    vs = volume_samples(ball, resolution)
    ss = surface_samples(ball, resolution)
    fields = [HelmholtzBasisField.random(k, 5, rng) for _ in range(10)]
    dirs = random_directions(rng, 5)
    out.append(IdentityReport.compare(
        "root_domain_integral", [integral_over_domain(U, ball, samples=vs) for U in fields], np.zeros(10),
        1e-8, scale=vol))
    rot = np.concatenate([rotated_integrals(U, ball, 10, seed=int(rng.integers(2**31)), resolution=resolution)
                          for U in fields[:2]])
    out.append(IdentityReport.compare("root_rotated_integrals", rot, np.zeros(len(rot)), 1e-8, scale=vol))
    rd = np.concatenate([rotational_derivative_integral(U, dirs, ball, samples=vs) for U in fields])
    out.append(IdentityReport.compare("root_rotational_derivative", rd, np.zeros(len(rd)), 1e-8, scale=vol))
    sm = np.concatenate([surface_moment(U, ball, samples=ss) for U in fields])
    out.append(IdentityReport.compare("root_surface_moment", sm, np.zeros(len(sm)), 1e-8, scale=vol))

    orth = []
    for l in (0, 1):
        eigs = ball_eigenspace(l, 1, R, c)
        for U in (HelmholtzBasisField.random(eigs[0].k, 5, rng) for _ in range(3)):
            orth.extend(boundary_orthogonality(U, e, ball, resolution) for e in eigs)
        beta = random_directions(rng, 1)[0]
        orth.extend(boundary_orthogonality(PlaneWave(eigs[0].k, beta), e, ball, resolution) for e in eigs)
    out.append(IdentityReport.compare("root_boundary_orthogonality", orth, np.zeros(len(orth)), 1e-8, scale=vol))

    triple = ball_eigenspace(1, 1, R, c)
    G, gmin = gram_normal_derivatives(triple, ball, resolution)
    diag = np.diag(G)
    offdiag = float(np.max(np.abs(G - np.diag(diag))) / diag.max())
    out.append(IdentityReport("gram_diagonal", [offdiag], [0.0], offdiag, offdiag, 1e-8,
                              bool(offdiag <= 1e-8 and gmin > 0), details={"min_eigenvalue": gmin,
                                                                           "diagonal": diag.tolist()}))

    h = determinant_harness(triple, ball, 100, seed=int(rng.integers(2**31)), resolution=resolution)
    out.append(IdentityReport("determinant_nondegeneracy", [h.n_nondegenerate], [95], 0.0, 0.0, 0.0,
                              h.n_nondegenerate >= 95, details={"threshold": h.threshold, "n_trials": h.n_trials}))

    ce = cross_expansion(ball, triple, samples=ss)
    worst = max(e.relative_residual for e in ce)
    coef_max = max(float(np.abs(e.coefficients).max()) for e in ce)
    centered = bool(np.all(c == 0))
    ok = worst <= 1e-8 and (coef_max <= 1e-8 or not centered)
    out.append(IdentityReport("cross_expansion_fit", [worst], [0.0], worst, worst, 1e-8, ok,
                              details={"max_coefficient": coef_max, "centered_at_origin": centered}))

    a = np.array([0.0, 0.0, 1.0])
    out.append(projected_cross_identity(ball, a, [1.0, 0.0, 0.0], triple, resolution))

    d = mps_defect(ball, k, 6, resolution)
    out.append(IdentityReport("mps_defect_at_kstar", [d.defect], [0.0], d.defect, d.defect, 1e-6, d.defect < 1e-6,
                              details={"k": k, "L": 6}))
    return out


def run_suite(shape, tier: str = "parametric", seed: int = 0, resolution: int | None = None):
    if tier not in TIERS:
        raise ValueError(f"unknown tolerance tier {tier!r}")
    rng = np.random.default_rng(seed)
    reports = general_checks(shape, tier, rng, resolution)
    if isinstance(shape, Ball):
        reports += ball_checks(shape, rng, resolution)
    else:
        reports += [IdentityReport.skipped(n, "ball-only check") for n in BALL_ONLY]
    return reports
