"""Covering-space arithmetic and the minimality certificate."""

import pytest

from branchpoints.errors import ValidationError
from branchpoints.topology import (
    CoveringSpec,
    QuotientOption,
    SurfaceType,
    admissible_quotients,
    euler_char,
    minimality_certificate,
    rh_branching,
)

S = SurfaceType


def test_euler_characteristic_table():
    assert euler_char(S.sphere()) == 2
    assert euler_char(S.projective_plane()) == 1
    assert euler_char(S.torus()) == 0
    assert euler_char(S.klein_bottle()) == 0


def test_euler_boundary_extension():
    assert euler_char(S(True, 0, b=1)) == 1  # disk
    assert euler_char(S(False, 1, b=2)) == -1


def test_cross_cap_decrement():
    values = [euler_char(S.nonorientable(r)) for r in range(1, 11)]
    assert values == [1 - k for k in range(10)]


def test_parity_of_orientable_types():
    with pytest.raises(ValidationError) as err:
        S(True, 1)
    assert err.value.code == "surface-type"
    assert S.orientable_genus(3).r == 6


def test_rh_examples():
    assert rh_branching(S.projective_plane(), S.projective_plane(), 2) == 1
    assert rh_branching(S.torus(), S.orientable_genus(2), 2) == 2
    assert rh_branching(S.projective_plane(), S.sphere(), 2) == 0


def test_rh_identity_covering():
    for sigma in (S.sphere(), S.projective_plane(), S.torus(), S.nonorientable(5)):
        assert rh_branching(sigma, sigma, 1) == 0
    # degree-1 "covering" is just the chi difference where feasible
    assert rh_branching(S.sphere(), S.nonorientable(3), 1) == \
        euler_char(S.sphere()) - euler_char(S.nonorientable(3))


def test_rh_infeasible():
    with pytest.raises(ValidationError) as err:
        rh_branching(S.torus(), S.sphere(), 3)
    assert err.value.code == "rh-infeasible"


def test_covering_spec_validation():
    assert CoveringSpec(2, 1).d == 2
    with pytest.raises(ValidationError):
        CoveringSpec(0, 1)
    with pytest.raises(ValidationError):
        CoveringSpec(1, -1)


def test_rp2_quotients_unique():
    opts = admissible_quotients(S.projective_plane(), 2, 1)
    assert len(opts) == 1
    (opt,) = opts
    assert opt.quotient == S.projective_plane()
    assert opt.d_min == 2 and opt.d_max is None
    assert opt.branching_at(S.projective_plane(), 2) == 1


def test_rp2_quotients_stable_under_cap_raise():
    base = admissible_quotients(S.projective_plane(), 2, 1)
    raised = admissible_quotients(S.projective_plane(), 2, 1, r_cap=S.projective_plane().r + 4)
    assert [(o.quotient, o.d_min, o.d_max) for o in base] == \
        [(o.quotient, o.d_min, o.d_max) for o in raised]


def test_parity_rule_is_what_blocks_the_sphere():
    opts = admissible_quotients(S.projective_plane(), 2, 1, parity_rule=False)
    quotients = {o.quotient for o in opts}
    assert S.sphere() in quotients
    assert S.projective_plane() in quotients
    sphere_opt = next(o for o in opts if o.quotient == S.sphere())
    assert sphere_opt.d_min == 2
    assert sphere_opt.branching_at(S.projective_plane(), 2) == 3


def test_klein_bottle_quotients():
    opts = admissible_quotients(S.klein_bottle(), 2, 1)
    assert [o.quotient for o in opts] == [S.projective_plane()]
    (opt,) = opts
    for d in (2, 3, 5):
        assert opt.branching_at(S.klein_bottle(), d) == d


def test_enumeration_against_brute_force():
    # independent arithmetic: scan all (quotient, degree) pairs directly
    for sigma in (S.projective_plane(), S.klein_bottle(), S.nonorientable(3)):
        opts = admissible_quotients(sigma, 2, 1)
        found = {(o.quotient.orientable, o.quotient.r) for o in opts}
        brute = set()
        for r in range(sigma.r + 3):
            if r < 1:
                continue
            q = S.nonorientable(r)
            for d in range(2, 60):
                O = d * euler_char(q) - euler_char(sigma)
                if O >= 1:
                    brute.add((False, r))
                    break
        assert found == brute
        # and the reported degree windows agree with the scan
        for o in opts:
            lo_ok = o.branching_at(sigma, o.d_min) >= 1
            below = o.d_min - 1
            below_ok = below < 2 or (euler_char(o.quotient) * below - euler_char(sigma)) < 1
            assert lo_ok and below_ok


def test_minimality_certificate_rp2():
    cert = minimality_certificate(S.projective_plane())
    assert cert.applicable
    assert cert.verdict == "ramified minimizer impossible"
    assert cert.area_factor == 2 and cert.degree == 2 and cert.branching_order == 1
    assert [o.quotient for o in cert.quotients] == [S.projective_plane()]
    assert any("1/2" in n for n in cert.notes)
    assert any("homotopy" in n for n in cert.notes)


def test_minimality_certificate_not_applicable():
    cert = minimality_certificate(S.torus())
    assert not cert.applicable
    assert cert.verdict == "not-applicable"


def test_minimality_certificate_unbranched_note():
    cert = minimality_certificate(S.projective_plane(), require_O_min=0)
    assert any("degree 1" in n for n in cert.notes)
    assert cert.area_factor == 2


def test_certificate_serialization():
    cert = minimality_certificate(S.projective_plane())
    d = cert.to_dict()
    assert d["verdict"] == "ramified minimizer impossible"
    assert d["quotients"][0]["type"] == "projective-plane"
    text = cert.to_text()
    assert "area reduction factor: 2" in text
