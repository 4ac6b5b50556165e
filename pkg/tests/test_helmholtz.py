import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import spherical_jn

from pompeiu_lab.geometry import Ball, Ellipsoid, StarShape, surface_samples
from pompeiu_lab.helmholtz import (
    HelmholtzBasisField,
    PlaneWave,
    ball_dirichlet_eigenfunction,
    ball_eigenspace,
    bessel_zeros,
    defect_sweep,
    eigenfunction_inner,
    extended_solution_ft,
    overdetermined_ball_solution,
    helmholtz_residual,
    mps_defect,
)
from pompeiu_lab.indicator_fourier import chi_ft_ball

from conftest import K1, K2, unit_vectors


def fd_gradient(f, x, h=1e-6):
    g = np.zeros(3, dtype=complex)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


# ---- fields

def test_plane_wave_origin():
    pw = PlaneWave(1.0, [0, 0, 1])
    assert pw.value(np.zeros(3)) == 1
    assert np.allclose(pw.gradient(np.zeros(3)), [0, 0, 1j])


def test_basis_field_a00():
    U = HelmholtzBasisField(2.0, {(0, 0): 1.0})
    assert U.value(np.zeros(3)) == pytest.approx(1 / np.sqrt(4 * np.pi))
    x = np.array([0.3, -0.4, 0.5])
    assert U.value(x) == pytest.approx(spherical_jn(0, 2 * np.linalg.norm(x)) / np.sqrt(4 * np.pi))


def test_basis_gradient_vs_fd(rng):
    U = HelmholtzBasisField.random(3.0, 4, rng)
    for x in unit_vectors(rng, 20) * rng.uniform(0.05, 1.5, (20, 1)):
        g = U.gradient(x)
        assert np.linalg.norm(g - fd_gradient(U.value, x)) < 1e-6 * max(1.0, np.linalg.norm(g))


def test_basis_gradient_at_center(rng):
    U = HelmholtzBasisField.random(3.0, 3, rng)
    g0 = U.gradient(np.zeros(3))
    assert np.all(np.isfinite(g0))
    assert np.allclose(g0, fd_gradient(U.value, np.zeros(3)), atol=1e-6)


def test_residual_examples(rng):
    x = rng.uniform(-1, 1, 3)
    assert helmholtz_residual(PlaneWave(2.0, [1, 2, 3]), x, 2.0) < 1e-6
    U = HelmholtzBasisField.random(K1, 3, rng)
    for x in unit_vectors(rng, 10) * rng.uniform(0, 1, (10, 1)):
        assert helmholtz_residual(U, x, K1) < 1e-5
    x = np.array([0.2, 0.5, -0.1])
    r = helmholtz_residual(lambda p: p @ p, x, 1.0)
    assert r == pytest.approx(6 + x @ x, rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 8.0), st.integers(0, 2**31 - 1))
def test_basis_fields_solve_helmholtz(k, seed):
    rng = np.random.default_rng(seed)
    U = HelmholtzBasisField.random(k, 4, rng)
    x = rng.uniform(-0.6, 0.6, 3)
    assert helmholtz_residual(U, x, k) < 1e-5


# ---- eigenfunctions

def test_eigenvalues():
    assert ball_dirichlet_eigenfunction(0, 0, 1).k == pytest.approx(np.pi, abs=1e-12)
    assert ball_dirichlet_eigenfunction(1, 0, 1).k == pytest.approx(K1, abs=1e-12)
    assert np.allclose(bessel_zeros(1, 2), [K1, K2], atol=1e-12)
    assert ball_dirichlet_eigenfunction(1, 1, 1, R=2.0).k == pytest.approx(K1 / 2, abs=1e-12)


def test_eigen_norms():
    ball = Ball(1.0)
    for l in (0, 1):
        for n in (1, 2):
            u = ball_dirichlet_eigenfunction(l, 0, n)
            assert abs(eigenfunction_inner(u, u, ball) - 1) < 1e-8
            # independent radial oracle
            rad = quad(lambda r: (u.norm * spherical_jn(l, u.k * r) * r) ** 2, 0, 1, epsabs=1e-14)[0]
            assert abs(rad - 1) < 1e-8


def test_eigenfunctions_vanish_on_boundary(rng):
    ss = surface_samples(Ball(1.0), 20)
    for u in ball_eigenspace(1, 1) + ball_eigenspace(2, 1):
        assert np.max(np.abs(u.value(ss.points))) < 1e-12
        assert helmholtz_residual(u, 0.5 * unit_vectors(rng, 1)[0], u.k) < 1e-6


def test_eigen_orthogonality():
    eigs = ball_eigenspace(1, 1)
    G = np.array([[eigenfunction_inner(a, b, Ball(1.0)) for b in eigs] for a in eigs])
    assert np.allclose(G, np.eye(3), atol=1e-10)


def test_eigen_normal_derivative_closed_vs_gradient():
    ss = surface_samples(Ball(1.0), 16)
    for u in ball_eigenspace(1, 1):
        assert np.allclose(u.normal_derivative(ss.points), u.normal_derivative(ss.points, ss.normals), atol=1e-12)


# ---- over-determined solution

def test_overdetermined_center_value():
    sol = overdetermined_ball_solution(1.0, 1)
    j0 = np.sin(K1) / K1
    assert sol.j0_boundary == pytest.approx(-0.2172336282, abs=1e-9)
    assert sol.value(np.zeros(3)) == pytest.approx((1 - 1 / j0) / K1**2, rel=1e-13)


def test_overdetermined_boundary_and_pde(rng):
    sol = overdetermined_ball_solution(1.0, 1)
    s = unit_vectors(rng, 500)
    assert np.max(np.abs(sol.value(s))) < 1e-8
    assert np.max(np.abs(np.einsum("ij,ij->i", sol.gradient(s), s))) < 1e-8
    for x in unit_vectors(rng, 20) * rng.uniform(0, 1, (20, 1)) ** (1 / 3):
        assert helmholtz_residual(sol, x, sol.k_star, rhs=1.0) < 1e-6
    assert np.allclose(sol.companion_value(s), -sol.k_star**-2, atol=1e-10)


def test_overdetermined_scaled_and_shifted(rng):
    c = np.array([0.5, -1.0, 2.0])
    sol = overdetermined_ball_solution(0.5, 2, c)
    assert sol.k_star == pytest.approx(2 * K2, abs=1e-10)
    s = c + 0.5 * unit_vectors(rng, 50)
    assert np.max(np.abs(sol.value(s))) < 1e-8
    assert abs(chi_ft_ball(0.5, sol.k_star * unit_vectors(rng, 1)[0], c)) < 1e-10


def test_extended_ft(rng):
    sol = overdetermined_ball_solution(1.0, 1)
    vol = 4 * np.pi / 3
    u0, res0 = extended_solution_ft(sol, np.zeros(3))
    assert abs(u0 * K1**2 - vol) < 1e-6
    assert res0 < 1e-6 * vol
    for xi in unit_vectors(rng, 20) * rng.uniform(0, 8, (20, 1)):
        if abs(np.linalg.norm(xi) - K1) > 1e-2:
            assert extended_solution_ft(sol, xi)[1] < 1e-6 * vol
    assert extended_solution_ft(sol, 2 * K1 * np.array([0, 0, 1.0]))[1] < 1e-6 * vol
    with pytest.raises(ValueError):
        extended_solution_ft(sol, K1 * np.array([1.0, 0, 0]))


# ---- defect

def test_mps_defect_ball():
    ball = Ball(1.0)
    assert mps_defect(ball, K1, 6).defect < 1e-6
    assert mps_defect(ball, 3.0, 6).defect > 1e-2


def test_mps_defect_validation():
    with pytest.raises(ValueError):
        mps_defect(Ball(1.0), K1, 1)
    with pytest.raises(ValueError):
        mps_defect(Ball(1.0), K1, 8, resolution=8)  # too few samples
    with pytest.raises(ValueError):
        mps_defect(Ball(1.0), -1.0, 4)


def test_mps_defect_rotation_invariant():
    from scipy.spatial.transform import Rotation

    frame = Rotation.from_euler("xyz", [0.3, -0.7, 1.1]).as_matrix()
    a = mps_defect(Ellipsoid((1, 1, 1.3)), 4.0, 6).defect
    b = mps_defect(Ellipsoid((1, 1, 1.3), frame=frame), 4.0, 6).defect
    assert abs(a - b) < 1e-10


def test_mps_defect_translation_invariant():
    a = mps_defect(Ball(1.0), 3.5, 6).defect
    b = mps_defect(Ball(1.0, (3.0, -2.0, 1.0)), 3.5, 6).defect
    assert abs(a - b) < 1e-10


def test_sweep_ball_minima():
    sw = defect_sweep(Ball(1.0), 4.0, 8.0, 0.05, L=6)
    deep = [m.k for m in sw.minima if m.defect < 1e-6]
    assert np.allclose(deep, [K1, K2], atol=1e-4)


def test_sweep_scaled_ball():
    sw = defect_sweep(Ball(0.5), 8.0, 16.0, 0.1, L=6)
    deep = [m.k for m in sw.minima if m.defect < 1e-6]
    assert np.allclose(deep, [2 * K1, 2 * K2], atol=2e-4)


def test_sweep_star_separated_from_ball():
    ball = defect_sweep(Ball(1.0), 4.0, 5.0, 0.05, L=6)
    star = defect_sweep(StarShape(1.0, {(2, 0): 0.05}), 4.0, 5.0, 0.05, L=6)
    b = min(r.defect for r in ball.results + ball.minima)
    s = min(r.defect for r in star.results + star.minima)
    assert s > 10 * b
    assert s > 1e-2  # artifact-derived regression floor


def test_sweep_threads_identical():
    a = defect_sweep(Ellipsoid((1, 1, 1.3)), 4.0, 4.5, 0.1, L=4, resolution=20, threads=1)
    b = defect_sweep(Ellipsoid((1, 1, 1.3)), 4.0, 4.5, 0.1, L=4, resolution=20, threads=3)
    assert np.array_equal(a.defects, b.defects)
