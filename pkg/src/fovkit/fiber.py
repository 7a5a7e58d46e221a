"""Preimages of points of F(A) under ``x -> x* A x``.

Two independent routes are provided.  The constructive one cuts F(A) with a
line through the target, compresses ``A`` to the span of the two boundary
generators and solves the resulting 2x2 problem.  The brute-force one
(:func:`fiber_sample`) runs Gauss-Newton on the unit sphere from random
starts and is used as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import boundary, matcore
from .errors import (
    CollinearGenerators,
    DegenerateCut,
    PointNotOnSupportLine,
    RankDeficit,
    TargetOutsideRange,
)

CLUSTER_TOL = 1e-6


@dataclass
class FiberSample:
    target: complex
    members: list
    residuals: list
    clusters: list = field(default_factory=list)  # lists of member indices

    @property
    def representatives(self):
        return [self.members[c[0]] for c in self.clusters]

    @property
    def rank(self):
        if not self.members:
            return 0
        return matcore.rank_of_set(self.members, 1e-6)


@dataclass
class LineCut:
    phi: float
    z_plus: complex
    z_minus: complex
    x_plus: np.ndarray
    x_minus: np.ndarray
    theta_plus: float
    theta_minus: float


def _scale(A):
    return max(1.0, float(np.linalg.norm(A)))


def _residuals(H, K, X, z):
    fr = np.einsum("ij,ij->i", X.conj(), X @ H.T).real
    fi = np.einsum("ij,ij->i", X.conj(), X @ K.T).real
    return np.stack([fr - z.real, fi - z.imag], axis=1)


def sphere_newton(A, z, X, max_iter=50, tol=1e-14, anchor=None, cap=None):
    """Gauss-Newton for ``x* A x = z`` over unit vectors, batched over rows of ``X``.

    Steps are minimum-norm solutions of the 2-equation linearization in the
    real tangent space (orthogonal to ``x`` and ``ix``), with step halving.
    With ``anchor`` and ``cap`` given, a start is abandoned as soon as an
    iterate leaves the projective ball of radius ``cap`` around ``anchor``.

    Returns ``(X, residual_norms, alive)``.
    """
    A = np.asarray(A, dtype=complex)
    z = complex(z)
    H, K = (A + A.conj().T) / 2, (A - A.conj().T) / 2j
    X = np.array(X, dtype=complex, ndmin=2)
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    alive = np.ones(len(X), dtype=bool)
    r = _residuals(H, K, X, z)
    res = np.linalg.norm(r, axis=1)
    stop = tol * _scale(A)
    if anchor is not None:
        anchor = matcore.normalize(anchor)
    for _ in range(max_iter):
        work = alive & (res > stop)
        if not work.any():
            break
        Xw, rw = X[work], r[work]
        G1 = 2 * Xw @ H.T
        G2 = 2 * Xw @ K.T
        G1 -= Xw * np.einsum("ij,ij->i", Xw.conj(), G1)[:, None]
        G2 -= Xw * np.einsum("ij,ij->i", Xw.conj(), G2)[:, None]
        M = np.empty((len(Xw), 2, 2))
        M[:, 0, 0] = np.einsum("ij,ij->i", G1.conj(), G1).real
        M[:, 1, 1] = np.einsum("ij,ij->i", G2.conj(), G2).real
        M[:, 0, 1] = M[:, 1, 0] = np.einsum("ij,ij->i", G1.conj(), G2).real
        c = -np.einsum("kij,kj->ki", np.linalg.pinv(M, rcond=1e-15), rw)
        D = c[:, :1] * G1 + c[:, 1:] * G2
        base = np.linalg.norm(rw, axis=1)
        Xn = Xw.copy()
        rn = rw.copy()
        pending = np.ones(len(Xw), dtype=bool)
        step = 1.0
        for _ in range(30):
            idx = np.flatnonzero(pending)
            if idx.size == 0:
                break
            trial = Xw[idx] + step * D[idx]
            trial /= np.linalg.norm(trial, axis=1, keepdims=True)
            rt = _residuals(H, K, trial, z)
            better = np.linalg.norm(rt, axis=1) < base[idx]
            Xn[idx[better]] = trial[better]
            rn[idx[better]] = rt[better]
            pending[idx[better]] = False
            step *= 0.5
        wi = np.flatnonzero(work)
        X[wi] = Xn
        r[wi] = rn
        res[wi] = np.linalg.norm(rn, axis=1)
        # starts that could not decrease the residual are stuck
        alive[wi[pending]] = False
        if anchor is not None:
            ov = np.abs(X[wi] @ anchor.conj())
            dist = np.sqrt(2.0 * np.clip(1.0 - ov ** 2, 0.0, None))
            alive[wi[dist > cap]] = False
    if anchor is not None:
        ov = np.abs(X @ anchor.conj())
        dist = np.sqrt(2.0 * np.clip(1.0 - ov ** 2, 0.0, None))
        alive &= dist <= cap
    return X, res, alive


def cluster(members, tol=CLUSTER_TOL):
    """Greedy partition of unit vectors by projective distance ``< tol``."""
    if len(members) == 0:
        return []
    X = np.array(members)
    label = np.full(len(X), -1)
    groups = []
    # |<x,y>|^2 > 1 - tol^2/2  <=>  distance < tol
    thresh = 1.0 - tol * tol / 2
    for i in range(len(X)):
        if label[i] >= 0:
            continue
        ov = np.abs(X @ X[i].conj()) ** 2
        mine = np.flatnonzero((label < 0) & (ov > thresh))
        label[mine] = len(groups)
        label[i] = len(groups)
        groups.append([i] + [int(j) for j in mine if j != i])
    return groups


def fiber_sample(A, z, budget=2000, seed=0, max_iter=50) -> FiberSample:
    """Brute-force fiber oracle: random sphere starts refined by Gauss-Newton."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    A = matcore.as_matrix(A)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    X0 = rng.standard_normal((budget, n)) + 1j * rng.standard_normal((budget, n))
    X, res, _ = sphere_newton(A, z, X0, max_iter=max_iter)
    ok = res <= 1e-10 * _scale(A)
    members = [matcore.canonical(x) for x in X[ok]]
    residuals = [float(v) for v in res[ok]]
    return FiberSample(complex(z), members, residuals, cluster(members))


def nice_basis(V):
    """Orthonormal basis of ``range(V)`` built from projected coordinate axes.

    Deterministic and aligned with coordinate structure when the subspace
    has it, e.g. span{e3, e1 + e2} gives e1 + e2 and e3 (normalized).
    """
    V = np.asarray(V, dtype=complex)
    P = V @ V.conj().T
    cols = [P[:, j] for j in range(P.shape[0]) if np.linalg.norm(P[:, j]) > 1e-6]
    B = matcore.orthonormal_basis(cols, tol=1e-6)
    return [matcore.canonical(B[:, k]) for k in range(B.shape[1])]


def boundary_preimage(A, theta, point, tol=1e-8):
    """Generators of the boundary point ``point`` lying on the support line at ``theta``."""
    A = matcore.as_matrix(A)
    point = complex(point)
    sp = boundary.support_data(A, theta)
    scale = _scale(A)
    if abs((np.exp(-1j * sp.theta) * point).real - sp.lambda_max) > tol * scale:
        raise PointNotOnSupportLine(f"{point} is not on the support line at theta={theta}")
    if sp.multiplicity == 1:
        x = sp.point_generators[0]
        if abs(sp.points[0] - point) > math.sqrt(tol) * scale:
            raise PointNotOnSupportLine(f"{point} is not the boundary point {sp.points[0]}")
        return [x]
    V = sp.generators
    if not sp.is_flat:
        if abs(sp.points[0] - point) > tol * scale:
            raise PointNotOnSupportLine(f"{point} is not the boundary point {sp.points[0]}")
        return [x for x in nice_basis(V) if abs(matcore.fov_value(A, x) - point) <= tol * scale]
    B = V.conj().T @ A @ V
    Bt = np.exp(-1j * sp.theta) * B
    mu, U = np.linalg.eigh((Bt - Bt.conj().T) / 2j)
    target = (np.exp(-1j * sp.theta) * point).imag
    lo, hi = mu[0], mu[-1]
    if not (lo - tol * scale <= target <= hi + tol * scale):
        raise PointNotOnSupportLine(f"{point} is outside the flat portion at theta={theta}")
    w = min(max((target - lo) / (hi - lo), 0.0), 1.0)
    y = math.sqrt(w) * U[:, -1] + math.sqrt(1 - w) * U[:, 0]
    return [matcore.canonical(V @ y)]


def line_cut(A, curve, z, phi) -> LineCut:
    """Intersect F(A) with the line through ``z`` in direction ``e^{i phi}``."""
    z = complex(z)
    mem = boundary.membership(curve, z)
    if mem.distance > -1e-9:
        raise DegenerateCut(f"{z} is within 1e-9 of the boundary (or outside)")
    u = complex(np.exp(1j * phi))
    tp, thp = boundary.ray_exit(curve, z, phi)
    tm, thm = boundary.ray_exit(curve, z, phi + math.pi)
    if tp < 1e-9 or tm < 1e-9:
        raise DegenerateCut(f"cut through {z} is degenerate")
    zp, zm = z + tp * u, z - tm * u
    xp = boundary_preimage(A, thp, zp)[0]
    xm = boundary_preimage(A, thm, zm)[0]
    return LineCut(float(phi), zp, zm, xp, xm, thp, thm)


def ellipse_contains(B, z, tol=1e-9):
    """Membership in F(B) for 2x2 ``B`` via its elliptical range."""
    B = np.asarray(B, dtype=complex)
    l1, l2 = np.linalg.eigvals(B)
    b2 = max(np.trace(B.conj().T @ B).real - abs(l1) ** 2 - abs(l2) ** 2, 0.0)
    major = math.sqrt(b2 + abs(l1 - l2) ** 2)
    return abs(z - l1) + abs(z - l2) <= major + tol * _scale(B)


def _f2(B, t, p):
    c, s = np.cos(t), np.sin(t)
    e = np.exp(1j * p)
    return c * c * B[0, 0] + s * s * B[1, 1] + c * s * (e * B[0, 1] + np.conj(e) * B[1, 0])


def _jac2(B, t, p):
    c, s = math.cos(t), math.sin(t)
    e = complex(np.exp(1j * p))
    cross = e * B[0, 1] + e.conjugate() * B[1, 0]
    dt = -2 * c * s * B[0, 0] + 2 * s * c * B[1, 1] + (c * c - s * s) * cross
    dp = c * s * (1j * e * B[0, 1] - 1j * e.conjugate() * B[1, 0])
    return np.array([[dt.real, dp.real], [dt.imag, dp.imag]])


def solve_2x2(B, z, grid=32, tol=1e-10):
    """Unit ``x`` in C^2 with ``x* B x = z``.

    Coarse grid over ``x = [cos t, e^{i phi} sin t]`` followed by damped
    Newton from the best grid points.  Ties go to the lexicographically
    smallest ``(t, phi)`` grid point, which makes the output deterministic.
    """
    B = np.asarray(B, dtype=complex)
    z = complex(z)
    if B.shape != (2, 2):
        raise ValueError("solve_2x2 needs a 2x2 matrix")
    if not ellipse_contains(B, z):
        raise TargetOutsideRange(f"{z} is outside F(B)")
    scale = _scale(B)
    T, P = np.meshgrid(np.linspace(0, math.pi / 2, grid), np.linspace(0, 2 * math.pi, grid, endpoint=False),
                       indexing="ij")
    R = np.abs(_f2(B, T, P) - z).ravel()
    order = np.argsort(R, kind="stable")
    best = None
    for k in order[:8]:
        t, p = float(T.ravel()[k]), float(P.ravel()[k])
        r = _f2(B, t, p) - z
        for _ in range(60):
            if abs(r) <= 1e-15 * scale:
                break
            J = _jac2(B, t, p)
            d = np.linalg.lstsq(J, -np.array([r.real, r.imag]), rcond=1e-12)[0]
            step = 1.0
            for _ in range(30):
                tn, pn = t + step * d[0], p + step * d[1]
                rn = _f2(B, tn, pn) - z
                if abs(rn) < abs(r):
                    break
                step *= 0.5
            else:
                break
            t, p, r = tn, pn, rn
        if best is None or abs(r) < best[0]:
            best = (abs(r), t, p)
        if abs(r) <= 1e-13 * scale:
            break
    x = np.array([math.cos(best[1]), np.exp(1j * best[2]) * math.sin(best[1])])
    if best[0] > tol * scale:
        # fall back to the unconstrained sphere iteration from the best point
        X, res, _ = sphere_newton(B, z, x[None], max_iter=100)
        x = X[0]
        if res[0] > tol * scale:
            raise TargetOutsideRange(f"2x2 solve stalled at residual {res[0]:.2e}")
    return matcore.canonical(x)


def _scalar_value(A):
    n = A.shape[0]
    a = np.trace(A) / n
    if np.linalg.norm(A - a * np.eye(n)) <= 1e-12 * _scale(A):
        return a
    return None


def interior_preimage(A, curve, z, phi=0.0, tol=1e-9):
    """One preimage of an interior point via a line cut and a 2x2 solve."""
    A = matcore.as_matrix(A)
    z = complex(z)
    a = _scalar_value(A)
    if a is not None:
        if abs(z - a) > tol * _scale(A):
            raise TargetOutsideRange(f"{z} is not in F(A) = {{{a}}}")
        return np.eye(A.shape[0], dtype=complex)[0]
    cut = line_cut(A, curve, z, phi)
    if matcore.projective_distance(cut.x_plus, cut.x_minus) < 1e-8:
        raise CollinearGenerators(f"cut generators coincide at phi={phi}")
    V = matcore.orthonormal_basis([cut.x_plus, cut.x_minus])
    B = matcore.compress(A, V)
    y = solve_2x2(B, z)
    x = matcore.canonical(V @ y)
    if abs(matcore.fov_value(A, x) - z) > tol * _scale(A):
        raise TargetOutsideRange(f"lifted preimage misses {z}")
    return x


def fiber_basis(A, curve, z, m=64, max_attempts=500, seed=0) -> FiberSample:
    """Collect preimages of an interior point until they span C^n.

    Line cuts run first over ``phi_j = j pi / m``.  Cuts only ever combine
    boundary generators, which can all miss a reducing block (a direct sum
    whose other block touches the boundary at a single point), so later
    attempts alternate random-angle cuts with random-start Gauss-Newton
    solves on the whole sphere.
    """
    A = matcore.as_matrix(A)
    n = A.shape[0]
    z = complex(z)
    members, residuals = [], []
    tol = 1e-10 * _scale(A)

    def add(x):
        members.append(x)
        residuals.append(abs(matcore.fov_value(A, x) - z))

    a = _scalar_value(A)
    if a is not None:
        for k in range(n):
            add(np.eye(n, dtype=complex)[k])
        return FiberSample(z, members, residuals, cluster(members))

    rng = np.random.default_rng(seed)
    for attempt in range(max_attempts):
        if attempt < m or attempt % 2 == 0:
            phi = attempt * math.pi / m if attempt < m else rng.uniform(0, math.pi)
            try:
                add(matcore.canonical(interior_preimage(A, curve, z, phi)))
            except (CollinearGenerators, TargetOutsideRange):
                continue
        else:
            X0 = rng.standard_normal((4, n)) + 1j * rng.standard_normal((4, n))
            X, res, _ = sphere_newton(A, z, X0)
            for x in X[res <= tol]:
                add(matcore.canonical(x))
        if len(members) >= n and matcore.rank_of_set(members, 1e-6) == n:
            return FiberSample(z, members, residuals, cluster(members))
    rank = matcore.rank_of_set(members, 1e-6) if members else 0
    sample = FiberSample(z, members, residuals, cluster(members))
    raise RankDeficit(f"reached rank {rank} < {n} after {max_attempts} attempts", rank, sample)
