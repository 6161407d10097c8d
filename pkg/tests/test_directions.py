import pytest

from cshape.directions import (
    certify_deterministic, direction_report, h1_check, letter_at, quotient_n, soundness_check, stable_fan,
)
from cshape.errors import InvalidState
from cshape.geometry import in_hull
from cshape.lattice import mat_pow, mat_vec

from conftest import load_example

AXES = {(1, 0), (0, 1), (-1, 0), (0, -1)}


@pytest.fixture(scope="module")
def tm_report(tm):
    return direction_report(tm, n_max=5, r_max=6)


@pytest.fixture(scope="module")
def table_report(table):
    return direction_report(table, n_max=5, r_max=0)


def test_square_fan_has_eight_cones(tm):
    fan = stable_fan(tm)
    assert len(fan) == 8
    assert sorted(c.dim for _, c in fan) == [1] * 4 + [2] * 4


def test_tm_axis_rays_nondeterministic(tm_report):
    nd = [c for c in tm_report.cones if c.status == "nondeterministic"]
    assert {c.cone.generators for c in nd} == {(a,) for a in AXES}
    det = [c for c in tm_report.cones if c.status == "deterministic"]
    assert len(det) == 4 and all(c.cone.dim == 2 for c in det)
    assert tm_report.counts() == {"nondeterministic": 4, "deterministic": 4, "unknown": 0}


def test_table_all_cones_nondeterministic(table_report):
    assert table_report.counts()["nondeterministic"] == 8


def test_reports_are_deterministic(tm):
    a = direction_report(tm, n_max=3, r_max=3).dumps()
    b = direction_report(tm, n_max=3, r_max=3).dumps()
    assert a == b


def test_quotient_and_h1(tm):
    x = (5, -3)
    q = quotient_n(tm, x, 2)
    diff = tuple(a - b for a, b in zip(x, mat_vec(mat_pow(tm.L, 2), q)))
    assert diff in tm.power(2).support
    for cone in direction_report(tm, 2, 0).cones:
        cert = cone.certificate
        if cert is not None:
            assert h1_check(tm, cert.f, cert.n)


def test_letter_at_matches_iteration(tm):
    seed = {k: 0 for k in tm.k_set}
    patch = tm.power(3).apply(seed)
    for x, a in list(patch.items())[:200]:
        assert letter_at(tm, seed, x, 3) == a


def test_deterministic_quadrant_radius(tm):
    assert certify_deterministic(tm, (1, 1), 4) is not None
    assert certify_deterministic(tm, (1, 0), 3) is None


def test_nonpolytope_rejected():
    with pytest.raises(InvalidState):
        direction_report(load_example("nonpolytope"), 2, 0)


@pytest.mark.parametrize("which", ["tm", "table"])
def test_certificates_survive_explicit_point_pairs(which, tm_report, table_report, tm, table):
    rep, z = (tm_report, tm) if which == "tm" else (table_report, table)
    certs = [c.certificate for c in rep.cones if c.certificate is not None]
    for cone in rep.cones:
        if cone.certificate is None:
            continue
        w = soundness_check(z, cone.certificate, cone.cone.interior_sample(), R=64)
        assert w.agree_points > 0
        assert w.disagreement is not None
    assert certs


def test_certificate_point_lies_on_its_face(tm_report, table_report):
    for rep in (tm_report, table_report):
        for c in rep.cones:
            cert = c.certificate
            if cert is not None:
                assert in_hull(cert.f, cert.face)
                assert c.cone.generators and all(cert.cone.contains(g) for g in c.cone.generators)
