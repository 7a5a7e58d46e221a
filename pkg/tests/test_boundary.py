import numpy as np
import pytest

from fovkit import boundary, matcore, repro
from fovkit.errors import PointNotOnBoundary

from conftest import DISK, TRIANGLE, random_matrix, random_normal


def ellipse_defect(A, points):
    """Deviation from the elliptical range of a 2x2 matrix (foci at eigenvalues)."""
    l1, l2 = np.linalg.eigvals(A)
    minor = np.sqrt(max(np.trace(A.conj().T @ A).real - abs(l1) ** 2 - abs(l2) ** 2, 0.0))
    major = np.hypot(abs(l1 - l2), minor)
    return np.abs(np.abs(points - l1) + np.abs(points - l2) - major)


def test_support_data_triangle():
    sp = boundary.support_data(TRIANGLE, 0.0)
    assert sp.lambda_max == pytest.approx(1)
    assert sp.multiplicity == 1
    assert sp.points[0] == pytest.approx(1)


@pytest.mark.parametrize("theta", np.linspace(0, 2 * np.pi, 7, endpoint=False))
def test_support_data_disk(theta):
    sp = boundary.support_data(DISK, theta)
    assert sp.lambda_max == pytest.approx(1, abs=1e-14)
    assert sp.points[0] == pytest.approx(np.exp(1j * theta), abs=1e-12)


def test_support_data_reducible_flat():
    sp = boundary.support_data(repro.load_example("ex4x4-reducible").matrix, 0.0)
    assert sp.lambda_max == pytest.approx(1)
    assert sp.multiplicity == 2
    assert sorted(sp.segment, key=lambda p: p.imag) == [pytest.approx(1 - 1j), pytest.approx(1 + 1j)]


@pytest.mark.parametrize("solver", ["lapack", "jacobi"])
def test_support_point_invariants(rng, solver):
    A = random_matrix(rng, 5)
    for theta in rng.uniform(0, 2 * np.pi, 5):
        sp = boundary.support_data(A, theta, solver=solver)
        for p, x in zip(sp.points, sp.point_generators):
            assert abs((np.exp(-1j * sp.theta) * p).real - sp.lambda_max) <= 1e-9
            assert abs(matcore.fov_value(A, x) - p) <= 1e-9


def test_solvers_agree(rng):
    A = random_matrix(rng, 6)
    for theta in (0.1, 2.0, 4.5):
        a = boundary.support_data(A, theta)
        b = boundary.support_data(A, theta, solver="jacobi")
        assert a.lambda_max == pytest.approx(b.lambda_max, abs=1e-12)
        assert a.points[0] == pytest.approx(b.points[0], abs=1e-9)


def test_triangle_trace(triangle_curve):
    hull = np.array([0, 1, 1j])
    assert boundary.polyline_hausdorff(triangle_curve.polyline, hull) <= 1e-8
    assert len(triangle_curve.corners) == 3


def test_disk_trace(disk_curve):
    assert np.abs(np.abs(disk_curve.polyline) - 1).max() <= 1e-8


def test_ex6x6_leftmost_point(example_curves):
    _, curve = example_curves("ex6x6")
    assert curve.polyline.real.min() == pytest.approx(0, abs=1e-8)
    assert boundary.support_value(curve.matrix, np.pi) == pytest.approx(0, abs=1e-8)


def test_trace_requires_samples():
    with pytest.raises(ValueError):
        boundary.trace_boundary(DISK, base_samples=8)


@pytest.mark.parametrize("z, kind", [(0, boundary.CORNER), (0.5, boundary.FLAT_INTERIOR), (0.5 + 0.5j, boundary.FLAT_INTERIOR)])
def test_classify_triangle(triangle_curve, z, kind):
    cls = boundary.classify_point(triangle_curve, z)
    assert cls.kind == kind
    assert cls.before_segment and cls.after_segment


def test_classify_disk(disk_curve):
    cls = boundary.classify_point(disk_curve, 1)
    assert cls.kind == boundary.ROUND and cls.is_round
    assert not (cls.before_segment and cls.after_segment)


def test_classify_flat_endpoint_is_round(example_curves):
    _, curve = example_curves("ex4x4-reducible")
    cls = boundary.classify_point(curve, 1 + 1j)
    assert cls.kind == boundary.ROUND
    assert cls.before_segment != cls.after_segment


def test_classify_off_boundary(disk_curve):
    with pytest.raises(PointNotOnBoundary):
        boundary.classify_point(disk_curve, 0.5)


@pytest.mark.parametrize("z, kind", [(0.5, boundary.INTERIOR), (2, boundary.EXTERIOR), (1j, boundary.BOUNDARY)])
def test_membership_disk(disk_curve, z, kind):
    m = boundary.membership(disk_curve, z)
    assert m.kind == kind
    assert m.distance == pytest.approx(abs(z) - 1, abs=1e-9)


def test_membership_ui4_origin(example_curves):
    _, curve = example_curves("ex4x4-irreducible")
    assert boundary.membership(curve, 0).kind == boundary.BOUNDARY


def test_convexoid_and_normal(rng):
    N = random_normal(rng, 4)
    Q = matcore.random_unitary(4, rng)
    assert boundary.is_convexoid(N) and boundary.is_normal(N)
    assert boundary.is_normal(Q) and boundary.is_normal(TRIANGLE)
    assert not boundary.is_convexoid(DISK) and not boundary.is_normal(DISK)
    assert not boundary.is_convexoid(np.array([[0, 1], [0, 0]]))


def test_polyline_convex(rng):
    for n in (2, 3, 5):
        P = boundary.trace_boundary(random_matrix(rng, n)).polyline
        e = np.roll(P, -1) - P
        cross = (np.conj(e) * np.roll(e, -1)).imag
        assert cross.min() >= -1e-10


def test_spectrum_inside(rng):
    A = random_matrix(rng, 5)
    curve = boundary.trace_boundary(A)
    for mu in np.linalg.eigvals(A):
        assert boundary.membership(curve, mu).distance <= 1e-8


def test_support_consistency(rng):
    A = random_matrix(rng, 4)
    curve = boundary.trace_boundary(A, base_samples=90)
    lhs = np.real(np.exp(-1j * curve.thetas)[:, None] * curve.polyline[None, :])
    assert np.all(lhs <= curve.lambdas[:, None] + 1e-8)


def exact_gap(P, B):
    """Largest distance from traced vertices ``P`` to the exact boundary of F(B)."""
    return max(abs(boundary.support_distance(B, p)[0]) for p in P)


def test_equivariance(rng):
    A = random_matrix(rng, 4)
    phi, c = rng.uniform(0, 2 * np.pi), complex(*rng.standard_normal(2))
    B = np.exp(1j * phi) * A + c * np.eye(4)
    P = np.exp(1j * phi) * boundary.trace_boundary(A).polyline + c
    Q = boundary.trace_boundary(B).polyline
    assert exact_gap(P[::10], B) <= 1e-7
    assert exact_gap((Q[::10] - c) * np.exp(-1j * phi), A) <= 1e-7
    # inscribed polygons on shifted direction grids differ by the chord sagitta
    assert boundary.polyline_hausdorff(P, Q) <= 1e-5


def test_unitary_invariance(rng):
    A = random_matrix(rng, 4)
    U = matcore.random_unitary(4, rng)
    P = boundary.trace_boundary(A).polyline
    Q = boundary.trace_boundary(U.conj().T @ A @ U).polyline
    assert boundary.polyline_hausdorff(P, Q) <= 1e-7


@pytest.mark.parametrize("n", [3, 4, 6])
def test_normal_is_hull(rng, n):
    N = random_normal(rng, n)
    hull = boundary.convex_hull(np.linalg.eigvals(N))
    assert boundary.polyline_hausdorff(boundary.trace_boundary(N).polyline, hull) <= 1e-8


@pytest.mark.parametrize("trial", range(4))
def test_two_by_two_is_ellipse(rng, trial):
    A = random_matrix(rng, 2)
    P = boundary.trace_boundary(A).polyline
    assert ellipse_defect(A, P).max() <= 1e-7


def test_generators_on_boundary(rng):
    A = random_matrix(rng, 3)
    curve = boundary.trace_boundary(A, base_samples=64)
    for s in curve.samples[::7]:
        for x in s.generators.T:
            if s.multiplicity == 1:
                assert boundary.membership(curve, matcore.fov_value(A, x)).kind == boundary.BOUNDARY
