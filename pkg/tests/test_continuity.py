import math

import numpy as np
import pytest

from fovkit import boundary, continuity, matcore, repro
from fovkit.errors import ArcNotOnBoundary

from conftest import DISK, random_matrix, random_normal

E12 = np.array([1, 1, 0, 0]) / math.sqrt(2)


def pd(x, y):
    return matcore.projective_distance(np.asarray(x, complex), np.asarray(y, complex))


def test_witness_same_vector(rng):
    A = random_matrix(rng, 3)
    x = matcore.random_unit(3, rng)
    w = continuity.scaling_witness(A, x, x, 0.5)
    assert w.residual == 0 and pd(w.v, x) == 0
    assert w.delta == 0.0625


def test_witness_full_cap(rng):
    A = random_matrix(rng, 3)
    x, y = matcore.random_unit(3, rng), matcore.random_unit(3, rng)
    w = continuity.scaling_witness(A, x, y, 2.0, norm="operator")
    assert w.delta == 1 and w.residual <= 1e-8
    assert abs(matcore.fov_value(A, w.v) - matcore.fov_value(A, y)) <= 1e-8


def test_witness_disk():
    e1, e2 = np.eye(2, dtype=complex)
    w = continuity.scaling_witness(DISK, e1, e2, 0.5)
    assert w.residual <= 1e-8
    assert w.distance <= 0.25 + 1e-9


@pytest.mark.parametrize("eps", [0.0, 2.5])
def test_witness_eps_range(eps):
    e1, e2 = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        continuity.scaling_witness(DISK, e1, e2, eps)


def test_scaling_operator_norm():
    # the scaling statement with the cap measured in operator norm
    rng = np.random.default_rng(3)
    for k in range(300):
        n = 2 + k % 4
        A = random_matrix(rng, n)
        x, y = matcore.random_unit(n, rng), matcore.random_unit(n, rng)
        eps = (0.1, 0.5, 1.0)[k % 3]
        w = continuity.scaling_witness(A, x, y, eps, norm="operator")
        assert w.residual <= 1e-8
        assert matcore.operator_distance(w.v, x) <= eps / 2 + 1e-9


def test_disk_strong_pass(disk_curve):
    rep = continuity.probe_strong(DISK, disk_curve, 1)
    assert rep.verdict == continuity.PASS
    assert rep.location == boundary.BOUNDARY


def test_ex3x3_probes(example_curves):
    inst, curve = example_curves("ex3x3")
    A = inst.matrix
    strong = continuity.probe_strong(A, curve, 1)
    assert strong.verdict == continuity.REFUTED
    e3 = [0, 0, 1]
    assert any(r.refuted and pd(r.x, e3) <= 1e-6 for r in strong.records)
    bad = next(r for r in strong.records if r.refuted)
    assert any(bad.unreached(eps) for eps in bad.table)
    weak = continuity.probe_weak(A, curve, 1)
    assert weak.verdict == continuity.PASS
    assert pd(weak.witness, np.array([1, 1, 0]) / math.sqrt(2)) <= 1e-6


def test_ui4_strong_refuted_at_e12(example_curves):
    inst, curve = example_curves("ex4x4-irreducible")
    rep = continuity.probe_strong(inst.matrix, curve, 0,
                                  continuity.ProbeSettings(representatives=[E12]))
    assert rep.verdict == continuity.REFUTED


@pytest.mark.parametrize("eid", ["ex4x4-reducible", "ex6x6"])
def test_weak_refuted(example_curves, eid):
    inst, curve = example_curves(eid)
    rep = continuity.probe_weak(inst.matrix, curve, 0)
    assert rep.verdict == continuity.REFUTED
    assert rep.witness is None


def test_weak_never_stronger(rng):
    for k in range(6):
        A = random_matrix(rng, 2 + k % 2)
        curve = boundary.trace_boundary(A)
        z = boundary.support_data(A, rng.uniform(0, 2 * np.pi)).points[0]
        s = continuity.probe_strong(A, curve, z)
        w = continuity.probe_weak(A, curve, z)
        if s.verdict == continuity.PASS:
            assert w.verdict == continuity.PASS
        assert continuity.verdicts_from_records(s.records) == (s.verdict, w.verdict)


def check_certificate(A, cert):
    for _, _, dmin, vecs in cert.rows:
        for v in vecs:
            assert all(abs(v[i]) <= 1e-6 for i in cert.coordinate_pattern)
            if cert.candidate is not None:
                assert pd(v, cert.candidate) >= cert.distance_bound - 1e-6


def test_certificate_ex3x3(example_curves):
    inst, curve = example_curves("ex3x3")
    cert = continuity.separation_certificate(inst.matrix, curve, 1, "ccw", np.array([0, 0, 1.0]))
    assert cert.distance_bound == pytest.approx(math.sqrt(2), abs=1e-3)
    assert cert.coordinate_pattern == [2]
    assert [r[0] for r in cert.rows] == list(range(3, 14))
    check_certificate(inst.matrix, cert)


def test_certificate_reducible(example_curves):
    inst, curve = example_curves("ex4x4-reducible")
    cert = continuity.separation_certificate(inst.matrix, curve, 0, "upper", np.array([0, 0, 1.0, 0]))
    assert cert.distance_bound >= 1 - 1e-3
    check_certificate(inst.matrix, cert)


def test_certificate_ui4_signs(example_curves):
    inst, curve = example_curves("ex4x4-irreducible")
    up = continuity.separation_certificate(inst.matrix, curve, 0, "upper", E12)
    lo = continuity.separation_certificate(inst.matrix, curve, 0, "lower", E12)
    assert up.sign_patterns and lo.sign_patterns
    assert all(s[0] == "+" and set(s[1:]) <= {"+", "0"} for s in up.sign_patterns)
    assert all(s[1] in "-0" and s[2] in "-0" and s[3] in "+0" for s in lo.sign_patterns)
    check_certificate(inst.matrix, up)
    check_certificate(inst.matrix, lo)


def test_certificate_needs_boundary(disk_curve):
    with pytest.raises(ArcNotOnBoundary):
        continuity.separation_certificate(DISK, disk_curve, 0.5)


def test_arc_point_distance(disk_curve):
    for side in (1, -1):
        p, theta = continuity.arc_point(disk_curve, 1, 0.01, side)
        assert abs(p - 1) == pytest.approx(0.01, rel=1e-6)
        assert abs(abs(p) - 1) <= 1e-9
        assert np.sign(p.imag) == side


def test_predict_normal(rng):
    N = random_normal(rng, 4)
    curve = boundary.trace_boundary(N)
    z = boundary.support_data(N, 0.3).points[0]
    pred = continuity.predict_continuity(N, curve, z)
    assert pred.strong and "convexoid" in pred.rules


def test_predict_interior(rng):
    A = random_matrix(rng, 4)
    pred = continuity.predict_continuity(A, boundary.trace_boundary(A), np.trace(A) / 4)
    assert pred.strong and pred.rules[0] == "interior point"


def test_predict_irreducible_3x3(rng):
    A = random_matrix(rng, 3)
    curve = boundary.trace_boundary(A)
    pred = continuity.predict_continuity(A, curve, boundary.support_data(A, 1.0).points[0])
    assert pred.strong and "unitarily irreducible 3x3" in pred.rules


def test_predict_unresolved(example_curves):
    inst, curve = example_curves("ex4x4-irreducible")
    pred = continuity.predict_continuity(inst.matrix, curve, 0)
    assert pred.strong is None and pred.rules == ["unresolved - probe"]
    inst, curve = example_curves("ex3x3")
    pred = continuity.predict_continuity(inst.matrix, curve, 1)
    assert pred.strong is None and pred.weak is True


def test_predict_outside(disk_curve):
    assert continuity.predict_continuity(DISK, disk_curve, 3).strong is None
