"""Surface construction, branch detection, and energy/area quadrature."""

import numpy as np
import pytest

from branchpoints.errors import ValidationError
from branchpoints.meshes import ParamMesh, annulus_mesh, disk_mesh, grid_mesh
from branchpoints.weierstrass import (
    WeierstrassData,
    build_surface,
    conformality_check,
    conformality_residual,
    derive_fz,
    detect_branch_points,
    discrete_energy_area,
    fill_images,
    mesh_energy_area,
)

A = 1.3 - 0.4j
B = -0.7 + 1.1j


def quartic(a=A, b=B):
    return WeierstrassData.quartic_example(a, b)


# ------------------------------------------------------------------ derivatives

def test_derive_fz_quartic_displays():
    f1z, f2z, f3z = derive_fz(quartic())
    assert np.allclose(f1z, [0, 0, 0, 2, 0, 0, 0, -2 * A * A, -4 * A * B, -2 * B * B])
    assert np.allclose(f2z, -1j * np.array([0, 0, 0, 2, 0, 0, 0, 2 * A * A, 4 * A * B, 2 * B * B]))
    assert np.allclose(f3z, [0, 0, 0, 0, 0, 4 * A, 4 * B])


def test_derive_fz_flat_plane():
    f1z, f2z, f3z = derive_fz(WeierstrassData(h=[2.0], g=[0.0]))
    assert np.allclose(f1z, [1.0]) and np.allclose(f2z, [-1j]) and np.allclose(f3z, [0.0])


def test_derive_fz_pure_quadratic_gauss():
    _, _, f3z = derive_fz(WeierstrassData(h=[0, 0, 0, 4.0], g=[0, 0, 1.0]))
    assert np.allclose(f3z, [0, 0, 0, 0, 0, 4.0])


def test_conformality_identity_and_counterexample():
    ok, res = conformality_check(quartic(2 + 1j, -1.0))
    assert ok and np.all(np.abs(res) < 1e-12)
    res = conformality_residual(np.array([0, 1.0]), np.array([0, 1.0]), np.array([0.0]))
    assert np.allclose(res, [0, 0, 2.0])


def test_conformality_random_pairs():
    rng = np.random.default_rng(4)
    for _ in range(10):
        h = rng.normal(size=4) + 1j * rng.normal(size=4)
        g = rng.normal(size=5) + 1j * rng.normal(size=5)
        ok, _ = conformality_check(WeierstrassData(h=h, g=g))
        assert ok


# ------------------------------------------------------------------ the surface map

def test_surface_through_origin_and_plane_wrap():
    surf = build_surface(quartic(0.0, 0.0))
    assert np.allclose(surf.point(np.asarray(0j)), [0, 0, 0])
    z = 0.3 - 0.2j
    assert np.allclose(surf.point(np.asarray(z)), [np.real(z ** 4), np.imag(z ** 4), 0.0])


def test_surface_reproduces_quartic_wrap_coordinate():
    surf = build_surface(quartic())
    rng = np.random.default_rng(6)
    ab, bb = np.conj(A), np.conj(B)
    for _ in range(8):
        z = 0.4 * complex(rng.normal(), rng.normal())
        zb = np.conj(z)
        f = surf.point(np.asarray(z))
        ref = z ** 4 - ab ** 2 * zb ** 8 / 2 - (8 / 9) * ab * bb * zb ** 9 - (2 / 5) * bb ** 2 * zb ** 10
        assert abs((f[0] + 1j * f[1]) - ref) < 1e-14
        assert abs(f[2] - 8 * np.real(A / 6 * z ** 6 + B / 7 * z ** 7)) < 1e-14


def test_harmonicity_fd_laplacian():
    # five-point stencil at 100 random points of the detection disk; the
    # step is chosen so stencil truncation stays far below the tolerance
    surf = build_surface(quartic())
    rng = np.random.default_rng(8)
    h = 1e-4
    zs = 0.5 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    lap = (surf.point(zs + h) + surf.point(zs - h) + surf.point(zs + 1j * h)
           + surf.point(zs - 1j * h) - 4 * surf.point(zs)) / h ** 2
    scale = surf.scale(1.0)
    assert np.max(np.abs(lap)) < 1e-6 * scale


# ------------------------------------------------------------------ branch detection

def test_detect_quartic_branch_point():
    recs = detect_branch_points(quartic(), 1.0)
    assert len(recs) == 1
    r = recs[0]
    assert r.z0 == 0 and r.order == 3 and r.m == 4
    assert abs(r.bilinear_cc()) < 1e-10
    assert np.allclose(r.c, [1.0, 1j, 0.0])


def test_detect_no_zeros_is_immersion():
    assert detect_branch_points(WeierstrassData(h=[2.0], g=[0.0]), 10.0) == []


def test_detect_multiplicity_split():
    h = np.polynomial.polynomial.polymul([0, 0, 0, 4.0], [-0.5, 1.0])
    recs = detect_branch_points(WeierstrassData(h=h, g=quartic().g), 1.0)
    assert [(r.z0, r.m) for r in recs] == [(0j, 4), (0.5 + 0j, 2)]
    for r in recs:
        assert abs(r.bilinear_cc()) < 1e-10 * max(1.0, np.linalg.norm(r.c) ** 2)


def test_detect_stable_under_radius_growth():
    h = np.polynomial.polynomial.polymul([0, 0, 0, 4.0], [-0.5, 1.0])
    data = WeierstrassData(h=h, g=quartic().g)
    small = detect_branch_points(data, 0.6)
    large = detect_branch_points(data, 5.0)
    assert [(r.z0, r.m) for r in small] == [(r.z0, r.m) for r in large[:len(small)]]


# ------------------------------------------------------------------ energy and area

def test_plane_disk_energy_area_pi():
    surf = build_surface(WeierstrassData(h=[1.0], g=[0.0]))
    E, a = mesh_energy_area(surf, disk_mesh(10000))
    assert abs(E - np.pi) / np.pi < 0.02
    assert abs(a - np.pi) / np.pi < 0.02
    assert E >= a - 1e-12


def test_doubled_plane_keeps_equality():
    surf = build_surface(WeierstrassData(h=[2.0], g=[0.0]))
    E, a = mesh_energy_area(surf, disk_mesh(2000))
    assert abs(E - a) < 1e-12 * E


def test_conformal_annulus_equality():
    surf = build_surface(quartic(1.0, 1.0))
    E, a = mesh_energy_area(surf, annulus_mesh(0.1, 0.5))
    assert E >= a - 1e-12
    assert abs(E - a) < 1e-8 * E


def test_perturbed_images_energy_dominates_area():
    surf = build_surface(quartic(1.0, 1.0))
    mesh = fill_images(surf, annulus_mesh(0.1, 0.5, n_radial=8, n_angular=32))
    rng = np.random.default_rng(12)
    mesh.images = mesh.images + 1e-3 * rng.normal(size=mesh.images.shape)
    E, a = discrete_energy_area(mesh)
    assert E > a


def test_random_lipschitz_meshes_energy_dominates_area():
    rng = np.random.default_rng(14)
    for _ in range(10):
        mesh = grid_mesh(0, 1, 0, 1, 6, 6)
        images = np.stack([mesh.vertices.real, mesh.vertices.imag,
                           np.zeros(len(mesh.vertices))], axis=-1)
        mesh.images = images + 0.2 * rng.normal(size=images.shape)
        E, a = discrete_energy_area(mesh)
        assert E >= a - 1e-12


def test_degenerate_mesh_rejected():
    bad = ParamMesh(np.array([0, 1, 2.0]), np.array([[0, 1, 2]]))
    with pytest.raises(ValidationError) as err:
        bad.validate()
    assert err.value.code == "mesh-degenerate"

    surf = build_surface(WeierstrassData(h=[1.0], g=[0.0]))
    with pytest.raises(ValidationError):
        mesh_energy_area(surf, bad)


# ------------------------------------------------------------------ validation and files

def test_degree_cap_and_zero_h():
    with pytest.raises(ValidationError) as err:
        WeierstrassData(h=[0.0], g=[0.0])
    assert err.value.code == "h-zero"
    with pytest.raises(ValidationError) as err:
        WeierstrassData(h=np.ones(40), g=[0.0])
    assert err.value.code == "degree-cap"


def test_surface_file_roundtrip(tmp_path):
    data = quartic()
    path = tmp_path / "surf.json"
    data.save(path)
    loaded = WeierstrassData.load(path)
    assert np.allclose(loaded.h, data.h) and np.allclose(loaded.g, data.g)


def test_surface_file_accepts_string_pairs(tmp_path):
    path = tmp_path / "surf.json"
    path.write_text('{"h": ["0,0", "0,0", "0,0", "4,0"], "g": ["0,0", "0,0", "1,0"]}')
    loaded = WeierstrassData.load(path)
    assert np.allclose(loaded.h, [0, 0, 0, 4.0])


def test_mesh_csv_export(tmp_path):
    surf = build_surface(quartic(1.0, 1.0))
    mesh = fill_images(surf, annulus_mesh(0.1, 0.3, n_radial=2, n_angular=8))
    from branchpoints.meshes import write_mesh_csv
    vp, tp = tmp_path / "v.csv", tmp_path / "t.csv"
    write_mesh_csv(mesh, vp, tp)
    vlines = vp.read_text().splitlines()
    assert vlines[0] == "x,y,f1,f2,f3"
    assert len(vlines) == len(mesh.vertices) + 1
    tlines = tp.read_text().splitlines()
    assert tlines[0] == "i0,i1,i2"
    assert len(tlines) == len(mesh.triangles) + 1
