"""Pentagon decomposition, the piecewise map Q, and the seam checks."""

import numpy as np
import pytest

from branchpoints.branchlocal import normal_form, sheet_difference
from branchpoints.curvetrace import TraceConfig, invert_wrap, trace_zero_curve
from branchpoints.cutpaste import (
    build_decomposition,
    build_q,
    seam_checks,
    write_qmesh_csv,
)
from branchpoints.errors import ValidationError
from branchpoints.weierstrass import WeierstrassData, build_surface, detect_branch_points

THETA0 = np.pi / 12


@pytest.fixture(scope="module")
def setup():
    data = WeierstrassData.quartic_example(1.0, 1.0)
    surface = build_surface(data)
    nf = normal_form(surface, detect_branch_points(data, 1.0)[0], 12)
    c1 = trace_zero_curve(surface, nf, 1, THETA0)
    c2 = trace_zero_curve(surface, nf, 1, THETA0 + np.pi / 2)
    return surface, nf, c1, c2


@pytest.fixture(scope="module")
def decomp(setup):
    surface, nf, c1, c2 = setup
    return build_decomposition(surface, nf, (c1, c2), d_radius=0.25)


@pytest.fixture(scope="module")
def qpair(decomp):
    return build_q(decomp, resolution=64)


# ------------------------------------------------------------------ decomposition

def test_decomposition_basic_geometry(decomp):
    assert abs(abs(decomp.end1) - 0.25) < 1e-12
    assert abs(decomp.end2 - decomp.zeta * decomp.end1) < 1e-15
    assert abs(decomp.A2 - decomp.zeta * decomp.A1) < 1e-15
    # A1 sits at the arclength midpoint of the truncated arc
    assert abs(abs(decomp.A1) - 0.125) < 5e-3
    assert decomp.eps == pytest.approx(decomp.length)


def test_matched_parameters_are_self_intersections(setup, decomp):
    surface, nf, _, _ = setup
    us = np.linspace(0, 1, 53)
    g1 = decomp.gamma1_at(us)
    g2 = decomp.gamma2_at(us)
    assert np.max(np.abs(g2 - decomp.zeta * g1)) < 1e-15  # exact rotation pairing
    f1 = surface.point(nf.z0 + invert_wrap(nf, g1))
    f2 = surface.point(nf.z0 + invert_wrap(nf, g2))
    assert np.max(np.linalg.norm(f1 - f2, axis=-1)) < 1e-9
    assert decomp.residual_max < 1e-9


def test_corrected_points_sit_on_the_exact_curve(setup, decomp):
    surface, nf, _, _ = setup
    us = np.linspace(0.05, 0.95, 19)
    g1 = decomp.gamma1_at(us)
    gaps = np.abs(decomp._gap(g1))
    assert np.max(gaps) < 1e-13 * decomp.scale


def test_eps_beyond_traced_length(setup):
    surface, nf, c1, c2 = setup
    with pytest.raises(ValidationError) as err:
        build_decomposition(surface, nf, (c1, c2), eps=10.0, d_radius=0.25)
    assert err.value.code == "arc-short"


def test_arc_not_reaching_boundary(setup):
    surface, nf, c1, c2 = setup
    with pytest.raises(ValidationError) as err:
        build_decomposition(surface, nf, (c1, c2), d_radius=0.4)
    assert err.value.code == "arc-short"


def test_pair_mismatch(setup):
    surface, nf, c1, _ = setup
    wrong = trace_zero_curve(surface, nf, 1, THETA0 + np.pi / 6)
    with pytest.raises(ValidationError) as err:
        build_decomposition(surface, nf, (c1, wrong), d_radius=0.25)
    assert err.value.code == "pair-mismatch"
    with pytest.raises(ValidationError):
        build_decomposition(surface, nf, (c1,), d_radius=0.25)


# ------------------------------------------------------------------ the map Q

def test_named_boundary_points(decomp, qpair):
    q, _ = qpair
    named = q.named_points()
    assert named["a"] == 0j and named["e"] == 0j
    assert named["b1"] == decomp.A1 and named["d1"] == decomp.A1
    assert named["b2"] == decomp.A2 and named["d2"] == decomp.A2
    assert named["c1"] == decomp.end1 and named["c2"] == decomp.end2
    # the same values through the generic evaluator
    assert abs(q.evaluate(0.5j, quadrant=1)) < 1e-12
    assert abs(q.evaluate(0j, quadrant=1) - decomp.A1) < 1e-12
    assert abs(q.evaluate(1 + 0j, quadrant=1) - decomp.end1) < 1e-12
    assert abs(q.evaluate(0j, quadrant=2) - decomp.A2) < 1e-12
    assert abs(q.evaluate(-1 + 0j, quadrant=2) - decomp.end2) < 1e-12


def test_seam_prescriptions(setup, decomp, qpair):
    surface, nf, _, _ = setup
    q, _ = qpair
    y = 0.2
    right = q.seam_point(y, "right")
    left = q.seam_point(y, "left")
    # the right side runs along gamma1 at fraction 1/2 - y, the left along
    # gamma2 at the same fraction; distinct points in D, equal surface image
    assert abs(right - decomp.gamma1_at(0.3)) < 1e-15
    assert abs(left - decomp.zeta * right) < 1e-15
    assert abs(left - right) > 1e-3
    f = surface.point(nf.z0 + invert_wrap(nf, np.array([right, left])))
    assert np.linalg.norm(f[0] - f[1]) < 1e-9
    # matches the generic evaluator on both quadrants
    assert abs(q.evaluate(complex(0, y), quadrant=1) - right) < 1e-12
    assert abs(q.evaluate(complex(0, y), quadrant=2) - left) < 1e-12
    # lower seam mirrors the upper one
    assert abs(q.seam_point(-y, "right") - right) < 1e-15
    assert abs(q.evaluate(complex(0, -y), quadrant=3) - left) < 1e-12


def test_continuity_across_x_axis_and_upper_y_axis(qpair):
    q, _ = qpair
    for x in (0.2, 0.7, -0.4, -0.9):
        upper = q.evaluate(complex(x, 0), quadrant=1 if x > 0 else 2)
        lower = q.evaluate(complex(x, 0), quadrant=4 if x > 0 else 3)
        assert abs(upper - lower) < 1e-14
    for y in (0.6, 0.8, 0.95):
        r = q.evaluate(complex(0, y), quadrant=1)
        l = q.evaluate(complex(0, y), quadrant=2)
        assert abs(r - l) < 1e-14


def test_no_foldover_and_injective_samples(qpair):
    _, qmesh = qpair
    bad, total = qmesh.fold_stats()
    assert bad == 0 and total > 0
    rng = np.random.default_rng(5)
    for patch in qmesh.patches:
        pts = patch.W.ravel()
        sel = rng.choice(len(pts), size=min(800, len(pts)), replace=False)
        sample = np.round(pts[sel], 12)
        # interior duplicates would betray a collapse; the A-vertex ring is
        # the one legitimate repeated value
        vals, counts = np.unique(sample, return_counts=True)
        repeated = vals[counts > 1]
        for v in repeated:
            assert abs(v - patch.W[0, 0]) < 1e-9


def test_seam_report_at_defaults(setup, decomp, qpair):
    surface, _, _, _ = setup
    _, qmesh = qpair
    report = seam_checks(surface, qmesh, decomp)
    assert report.max_continuity_jump < 1e-8 * report.scale
    assert report.rel_area_diff < 2e-2
    # at the default disk radius 0.25 the crease angle follows the
    # Gauss-map model 4|w|^2, giving ~2.5e-3 at the window edge
    assert 1e-3 < report.min_tangent_angle < 1e-2
    assert abs(report.min_tangent_angle - 4 * (0.1 * 0.25) ** 2) < 1e-3


def test_area_converges_with_order_one(setup, decomp):
    surface, _, _, _ = setup
    diffs = []
    for res in (64, 128):
        _, qmesh = build_q(decomp, resolution=res)
        rep = seam_checks(surface, qmesh, decomp)
        diffs.append(rep.rel_area_diff)
    assert diffs[1] < diffs[0] / 2  # observed order >= 1


def test_qmesh_csv(tmp_path, qpair):
    _, qmesh = qpair
    path = tmp_path / "q.csv"
    text = write_qmesh_csv(qmesh, path)
    lines = text.splitlines()
    assert lines[0] == "quadrant,bx,by,wx,wy,f1,f2,f3"
    n_nodes = sum(p.B.size for p in qmesh.patches)
    assert len(lines) == n_nodes + 1
    assert path.read_text() == text
