import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pompeiu_lab.geometry import (
    Ball,
    Ellipsoid,
    MeshError,
    MeshFormatError,
    StarShape,
    TriMesh,
    cross_field,
    load_mesh,
    shape_volume,
    shift_origin,
    silhouette_points,
    sphericity_check,
    surface_samples,
    volume_samples,
)
from pompeiu_lab.geometry.mesh import format_off, icosphere, parse_off

ELL = Ellipsoid((1.0, 1.0, 1.3))


# ---- samples

def test_ball_surface_samples():
    ss = surface_samples(Ball(1.0))
    assert abs(ss.weights.sum() - 4 * np.pi) < 1e-8
    assert np.max(np.abs(ss.integrate(ss.points))) < 1e-8
    assert np.allclose(np.linalg.norm(ss.normals, axis=1), 1.0)


def test_ellipsoid_area_against_refined_mesh():
    # Richardson extrapolation of affinely mapped icosphere areas (error ~ h^2)
    A = ELL.matrix
    areas = [icosphere(lv).__class__(icosphere(lv).vertices @ A.T, icosphere(lv).faces).area for lv in (5, 6)]
    oracle = (4 * areas[1] - areas[0]) / 3
    assert abs(surface_samples(ELL).weights.sum() / oracle - 1) < 1e-4


def test_volume_samples_closed_forms():
    assert abs(volume_samples(Ball(1.0)).weights.sum() - 4 * np.pi / 3) < 1e-8
    e = Ellipsoid((0.7, 1.1, 1.6))
    assert abs(volume_samples(e).weights.sum() - 4 * np.pi * 0.7 * 1.1 * 1.6 / 3) < 1e-6


def test_star_volume_against_monte_carlo():
    star = StarShape(1.0, {(2, 0): 0.1})
    vol = volume_samples(star).weights.sum()
    rng = np.random.default_rng(7)
    n, box = 400_000, 1.3
    x = rng.uniform(-box, box, (n, 3))
    r = np.linalg.norm(x, axis=1)
    inside = r < star.rho(x / r[:, None])
    p = inside.mean()
    est = p * (2 * box) ** 3
    se = np.sqrt(p * (1 - p) / n) * (2 * box) ** 3
    assert abs(vol - est) < 3 * se


@pytest.mark.parametrize("shape", [Ball(1.0), ELL, StarShape(1.0, {(2, 0): 0.1, (3, 1): -0.05}),
                                   Ball(0.5, (0.2, -0.1, 0.3))])
def test_divergence_theorem(shape):
    ss = surface_samples(shape)
    assert np.max(np.abs(ss.integrate(ss.normals))) < 1e-10
    v_surface = ss.integrate(np.einsum("ij,ij->i", ss.points, ss.normals)) / 3
    assert abs(v_surface - volume_samples(shape).weights.sum()) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_ellipsoid_volume_property(a, b, c):
    e = Ellipsoid((a, b, c))
    assert volume_samples(e, 20).weights.sum() == pytest.approx(4 * np.pi * a * b * c / 3, rel=1e-10)


# ---- cross field and sphericity

def test_cross_field_examples():
    assert np.max(np.linalg.norm(cross_field(surface_samples(Ball(1.0))), axis=1)) < 1e-12
    a = np.array([0.0, 0.0, 1.0])
    ss = surface_samples(Ball(1.0, a))
    cf = cross_field(ss)
    assert np.allclose(cf, np.cross(a, ss.normals), atol=1e-12)
    assert np.max(np.linalg.norm(cf, axis=1)) == pytest.approx(1.0, abs=1e-3)
    assert np.max(np.linalg.norm(cross_field(surface_samples(ELL)), axis=1)) > 0.1


def test_sphericity_examples():
    assert max(sphericity_check(Ball(1.0)).values()) < 1e-10
    assert sphericity_check(StarShape(1.0, {(3, 0): 0.05}))["var_s_squared"] >= 1e-4
    assert sphericity_check(ELL)["max_s_dot_sp"] > 0.05


def test_sphericity_detects_off_center_ball():
    assert max(sphericity_check(Ball(1.0, (0.3, 0, 0))).values()) > 1e-2


# ---- translation

def test_shift_origin():
    b = shift_origin(Ball(1.0), (1.0, 0.0, 0.0))
    assert isinstance(b, Ball) and np.array_equal(b.center, [1.0, 0.0, 0.0])
    for shape in (ELL, StarShape(1.0, {(2, 1): 0.1})):
        a = np.array([0.25, -0.5, 0.125])
        back = shift_origin(shift_origin(shape, a), -a)
        assert np.array_equal(back.center, shape.center)
        s0, s1 = surface_samples(shape, 16), surface_samples(shift_origin(shape, a), 16)
        assert np.allclose(cross_field(s1), cross_field(s0) + np.cross(a, s0.normals), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_cross_field_translation_property(a):
    a = np.array(a)
    s0 = surface_samples(ELL, 12)
    s1 = surface_samples(shift_origin(ELL, a), 12)
    assert np.allclose(s1.points, s0.points + a)
    assert np.allclose(cross_field(s1), cross_field(s0) + np.cross(a, s0.normals), atol=1e-12)


# ---- meshes

def test_octahedron_fixture(fixtures_dir):
    m = load_mesh(fixtures_dir / "octahedron.off")
    assert m.vertices.shape == (6, 3) and m.faces.shape == (8, 3)
    assert m.euler_characteristic() == 2
    assert m.volume == pytest.approx(4 / 3)


def test_icosphere_fixture(fixtures_dir):
    m = load_mesh(fixtures_dir / "icosphere.off")
    assert abs(m.area / (4 * np.pi) - 1) < 0.02
    assert m.euler_characteristic() == 2
    ss = surface_samples(m)
    assert ss.weights.sum() == pytest.approx(m.area, rel=1e-12)
    assert volume_samples(m).weights.sum() == pytest.approx(m.volume, rel=1e-12)


def test_flipped_face_names_edge(fixtures_dir):
    with pytest.raises(MeshError, match=r"edge \(\d+, \d+\)"):
        load_mesh(fixtures_dir / "tetra_flipped.off")


def test_inward_mesh_is_reoriented(fixtures_dir):
    m = load_mesh(fixtures_dir / "octahedron.off")
    inv = TriMesh(m.vertices, m.faces[:, ::-1])
    assert inv.volume > 0
    c = inv.vertices[inv.faces].mean(axis=1)
    assert np.all(np.einsum("ij,ij->i", inv.face_normals(), c) > 0)


@pytest.mark.parametrize("text", [
    "OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n",          # open
    "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n",                 # quad face
    "NOFF\n0 0 0\n",                                                  # bad header
    "OFF\n3 1 0\n0 0 0\n1 0\n",                                       # truncated
])
def test_malformed_meshes(text):
    with pytest.raises((MeshError, MeshFormatError)):
        parse_off(text)


def test_missing_mesh_file(tmp_path):
    with pytest.raises(OSError):
        load_mesh(tmp_path / "nope.off")


def test_off_roundtrip(fixtures_dir):
    m = load_mesh(fixtures_dir / "octahedron.off")
    m2 = parse_off(format_off(m))
    assert np.array_equal(m.vertices, m2.vertices) and np.array_equal(m.faces, m2.faces)


# ---- silhouettes

def test_silhouette_ball_equator():
    s = silhouette_points(Ball(1.0), [0, 0, 1])
    assert len(s) > 0
    assert np.max(np.abs(s.normals[:, 2])) < 1e-10
    assert np.max(np.abs(s.points[:, 2])) < 1e-10


def test_silhouette_ball_great_circle_x():
    s = silhouette_points(Ball(1.0), [1, 0, 0])
    assert np.max(np.abs(s.points[:, 0])) < 1e-10
    assert np.allclose(np.linalg.norm(s.points, axis=1), 1.0)


def test_silhouette_ellipsoid():
    s = silhouette_points(ELL, [0, 0, 1])
    assert np.max(np.abs(s.normals[:, 2])) < 1e-8
    assert np.max(np.abs(s.points[:, 2])) < 1e-8


def test_silhouette_moves_continuously():
    # smoke test: a small change of direction moves the silhouette a little
    p0 = np.array([0.0, 0.0, 1.0])
    p1 = np.array([0.0, 1e-3, 1.0]) / np.linalg.norm([0.0, 1e-3, 1.0])
    s0, s1 = silhouette_points(ELL, p0), silhouette_points(ELL, p1)
    d = np.linalg.norm(s0.points[:, None, :] - s1.points[None, :, :], axis=2).min(axis=1)
    assert np.max(d) < 0.05


# ---- validation

@pytest.mark.parametrize("ctor", [
    lambda: Ball(0.0),
    lambda: Ball(-1.0),
    lambda: Ellipsoid((1.0, 0.0, 1.0)),
    lambda: StarShape(1.0, {(2, 0): 5.0}),
    lambda: StarShape(1.0, {(1, 2): 0.1}),
])
def test_invalid_shapes(ctor):
    with pytest.raises(ValueError):
        ctor()


def test_shape_volume_exact_vs_quadrature():
    assert shape_volume(Ball(2.0)) == pytest.approx(32 * np.pi / 3)
    star = StarShape(1.0, {(2, 0): 0.1})
    assert shape_volume(star) == pytest.approx(volume_samples(star).weights.sum())


@settings(max_examples=25, deadline=None)
@given(st.one_of(st.just(0.0), st.floats(1e-3, 1.0)), st.one_of(st.just(0.0), st.floats(1e-3, 0.08)),
       st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_cross_field_vanishes_iff_sphere_about_origin(offset, eps, l, seed):
    # perturbations are either exactly zero or resolvably nonzero
    d = np.random.default_rng(seed).standard_normal(3)
    c = offset * d / np.linalg.norm(d)
    shape = StarShape(1.0, {(l, 0): eps} if eps > 0 else {}, np.array(c))
    ss = surface_samples(shape, 24)
    cf = np.max(np.linalg.norm(cross_field(ss), axis=1))
    diag = max(sphericity_check(shape, 24).values())
    is_sphere = eps == 0 and np.linalg.norm(c) == 0
    assert (cf < 1e-10) == is_sphere
    assert (diag < 1e-10) == is_sphere
