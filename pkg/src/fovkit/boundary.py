"""Boundary of the field of values by a support-function sweep.

For each direction ``theta`` the largest eigenvalue of
``H(theta) = (e^{-i theta} A + e^{i theta} A*) / 2`` is the support value of
F(A) and its eigenspace generates the boundary points on that support line.
A multiple top eigenvalue produces a flat portion, whose endpoints are found
on the compression of ``A`` to the eigenspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import matcore
from .errors import PointNotOnBoundary

TWO_PI = 2 * math.pi
MULT_RTOL = 1e-8
MEMBERSHIP_TOL = 1e-8
SEGMENT_TOL = 1e-10
TURN_LIMIT = 0.05
DEFAULT_SAMPLES = 720
MAX_POINTS = 20000

INTERIOR, BOUNDARY, EXTERIOR = "Interior", "Boundary", "Exterior"
CORNER, FLAT_INTERIOR, ROUND = "Corner", "FlatInterior", "Round"


@dataclass
class SupportPoint:
    theta: float
    lambda_max: float
    multiplicity: int
    generators: np.ndarray  # orthonormal basis of the top eigenspace (columns)
    points: list  # boundary points on the support line, counter-clockwise
    point_generators: list  # unit vector realizing each entry of ``points``
    segment: tuple | None = None

    @property
    def is_flat(self):
        return self.segment is not None


@dataclass
class Flat:
    theta: float
    start: complex
    end: complex

    @property
    def length(self):
        return abs(self.end - self.start)


@dataclass
class BoundaryCurve:
    matrix: np.ndarray
    samples: list
    polyline: np.ndarray
    flats: list = field(default_factory=list)
    corners: list = field(default_factory=list)

    @property
    def thetas(self):
        return np.array([s.theta for s in self.samples])

    @property
    def lambdas(self):
        return np.array([s.lambda_max for s in self.samples])

    @property
    def perimeter(self):
        P = self.polyline
        return float(np.sum(np.abs(np.roll(P, -1) - P)))

    @property
    def centroid(self):
        return complex(np.mean(self.polyline))


@dataclass
class BoundaryClass:
    kind: str
    before_segment: bool  # clockwise one-sided neighborhood is a segment
    after_segment: bool  # counter-clockwise one-sided neighborhood is a segment
    theta: float

    @property
    def is_round(self):
        return self.kind == ROUND


@dataclass
class Membership:
    kind: str
    distance: float  # signed, negative inside
    theta: float  # direction attaining the distance


def _scale(A):
    return max(1.0, float(np.linalg.norm(A)))


def support_value(A, theta) -> float:
    return float(np.linalg.eigvalsh(matcore.rotated_hermitian(A, theta))[-1])


def _support_values(A, thetas):
    thetas = np.asarray(thetas, dtype=float)
    B = np.exp(-1j * thetas)[:, None, None] * A[None]
    H = (B + np.conj(np.swapaxes(B, 1, 2))) / 2
    return np.linalg.eigvalsh(H)[:, -1]


def _build_support_point(A, theta, vals, vecs):
    lam = float(vals[-1])
    thresh = MULT_RTOL * max(1.0, abs(lam))
    m = int(np.sum(vals >= lam - thresh))
    V = vecs[:, -m:][:, ::-1]
    if m == 1:
        x = matcore.canonical(V[:, 0])
        return SupportPoint(theta, lam, 1, V, [matcore.fov_value(A, x)], [x])
    B = V.conj().T @ A @ V
    Bt = np.exp(-1j * theta) * B
    K = (Bt - Bt.conj().T) / 2j
    _, U = np.linalg.eigh(K)
    x_lo = matcore.canonical(V @ U[:, 0])
    x_hi = matcore.canonical(V @ U[:, -1])
    p_lo, p_hi = matcore.fov_value(A, x_lo), matcore.fov_value(A, x_hi)
    if abs(p_hi - p_lo) <= SEGMENT_TOL * _scale(A):
        return SupportPoint(theta, lam, m, V, [p_lo], [x_lo])
    return SupportPoint(theta, lam, m, V, [p_lo, p_hi], [x_lo, x_hi], (p_lo, p_hi))


def support_data(A, theta, solver="lapack") -> SupportPoint:
    """Support value, top eigenspace and boundary point(s) in direction ``theta``.

    ``solver="jacobi"`` routes the eigenproblem through
    :func:`matcore.hermitian_eig` instead of LAPACK.
    """
    A = matcore.as_matrix(A)
    theta = float(theta) % TWO_PI
    H = matcore.rotated_hermitian(A, theta)
    if solver == "jacobi":
        eig = matcore.hermitian_eig(H)
        vals, vecs = eig.values[::-1], eig.vectors[:, ::-1]
    else:
        vals, vecs = np.linalg.eigh(H)
    return _build_support_point(A, theta, vals, vecs)


def _support_batch(A, thetas):
    thetas = np.asarray(thetas, dtype=float) % TWO_PI
    if thetas.size == 0:
        return []
    B = np.exp(-1j * thetas)[:, None, None] * A[None]
    H = (B + np.conj(np.swapaxes(B, 1, 2))) / 2
    vals, vecs = np.linalg.eigh(H)
    lam = vals[:, -1]
    thresh = MULT_RTOL * np.maximum(1.0, np.abs(lam))
    simple = vals[:, -2] < lam - thresh if vals.shape[1] > 1 else np.ones(len(lam), bool)
    # simple top eigenvalues: canonical generators and their values in one pass
    X = vecs[:, :, -1]
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    lead = np.argmax(np.abs(X) > matcore.CANON_ZERO, axis=1)
    c = X[np.arange(len(X)), lead]
    X = X * (np.abs(c) / c)[:, None]
    F = np.einsum("ki,ij,kj->k", X.conj(), A, X)
    out = []
    for k, t in enumerate(thetas):
        if simple[k]:
            out.append(SupportPoint(float(t), float(lam[k]), 1, vecs[k][:, -1:], [complex(F[k])], [X[k]]))
        else:
            out.append(_build_support_point(A, t, vals[k], vecs[k]))
    return out


def _first(s):
    return s.points[0]


def _last(s):
    return s.points[-1]


def _turning(pa, pb, pc):
    e1, e2 = pb - pa, pc - pb
    if abs(e1) == 0 or abs(e2) == 0:
        return 0.0
    return abs(math.atan2((e2 / e1).imag, (e2 / e1).real))


def trace_boundary(A, base_samples=DEFAULT_SAMPLES, adaptive=True, max_points=MAX_POINTS) -> BoundaryCurve:
    """Sample the support function on a uniform grid and refine adaptively.

    Refinement evaluates the direction normal to the chord between
    neighbouring boundary points.  If a flat portion lies between two grid
    directions its normal is exactly that chord normal, so flats are found by
    their eigenspace rather than by polyline heuristics.  Intervals keep being
    split while the polyline turns by more than ``TURN_LIMIT`` radians.
    """
    A = matcore.as_matrix(A)
    if base_samples < 16:
        raise ValueError("base_samples must be at least 16")
    scale = _scale(A)
    ptol = 1e-12 * scale
    samples = {}
    for s in _support_batch(A, np.arange(base_samples) * TWO_PI / base_samples):
        samples[s.theta] = s

    if adaptive:
        thetas = sorted(samples)
        active = [(thetas[k], thetas[(k + 1) % len(thetas)], 0) for k in range(len(thetas))]
        while active and len(samples) < max_points:
            cand = []
            for ta, tb, depth in active:
                sa, sb = samples[ta], samples[tb]
                pa, pb = _last(sa), _first(sb)
                if abs(pb - pa) <= ptol:
                    continue
                span = (tb - ta) % TWO_PI
                tc = math.atan2((pb - pa).imag, (pb - pa).real) - math.pi / 2
                off = (tc - ta) % TWO_PI
                if not (1e-13 < off < span - 1e-13):
                    continue
                cand.append(((ta + off) % TWO_PI, ta, tb, depth))
            cand = cand[: max(0, max_points - len(samples))]
            new = _support_batch(A, [c[0] for c in cand])
            active = []
            for (tc, ta, tb, depth), sc in zip(cand, new):
                if tc in samples:
                    continue
                samples[tc] = sc
                pa, pb = _last(samples[ta]), _first(samples[tb])
                if sc.is_flat:
                    if abs(_first(sc) - pa) > 1e-9 * scale:
                        active.append((ta, tc, depth + 1))
                    if abs(_last(sc) - pb) > 1e-9 * scale:
                        active.append((tc, tb, depth + 1))
                    continue
                pc = _first(sc)
                if abs(pc - pa) <= 1e-9 * scale or abs(pc - pb) <= 1e-9 * scale:
                    continue
                if depth < 1 or _turning(pa, pc, pb) > TURN_LIMIT:
                    active.append((ta, tc, depth + 1))
                    active.append((tc, tb, depth + 1))

    ordered = [samples[t] for t in sorted(samples)]
    return _assemble(A, ordered)


def _assemble(A, ordered):
    scale = _scale(A)
    pts = []
    for s in ordered:
        for p in s.points:
            if not pts or abs(p - pts[-1]) > 1e-12 * scale:
                pts.append(p)
    if len(pts) > 1 and abs(pts[0] - pts[-1]) <= 1e-12 * scale:
        pts.pop()
    flats = [Flat(s.theta, s.segment[0], s.segment[1]) for s in ordered if s.is_flat]

    corners = []

    def add_corner(p):
        if all(abs(p - c) > 1e-9 * scale for c in corners):
            corners.append(p)

    N = len(ordered)
    for k in range(N):
        a, b = ordered[k], ordered[(k + 1) % N]
        gap = (b.theta - a.theta) % TWO_PI
        if gap <= 1e-6:
            continue
        if abs(_last(a) - _first(b)) <= 1e-10 * scale:
            # the same boundary point supports a whole interval of directions
            add_corner(_last(a))
    return BoundaryCurve(A, ordered, np.array(pts, dtype=complex), flats, corners)


def _local_max(f, thetas, values, extra=()):
    """Maximize ``f`` starting from grid values, polishing around the best
    grid direction and also checking ``extra`` candidate directions."""
    thetas = np.asarray(thetas)
    k = int(np.argmax(values))
    best_t, best_v = float(thetas[k]), float(values[k])
    N = len(thetas)
    if N > 2:
        lo = thetas[(k - 1) % N]
        hi = thetas[(k + 1) % N]
        width = (hi - lo) % TWO_PI
        if 0 < width < math.pi:
            res = minimize_scalar(lambda u: -f((lo + u) % TWO_PI), bounds=(0.0, width),
                                  method="bounded", options={"xatol": 1e-13, "maxiter": 500})
            if -res.fun > best_v:
                best_t, best_v = float((lo + res.x) % TWO_PI), float(-res.fun)
    for t in extra:
        v = f(t)
        if v > best_v:
            best_t, best_v = float(t), float(v)
    return best_t, best_v


def support_distance(A, z, thetas=None, lambdas=None, extra=()):
    """Signed distance from ``z`` to F(A) (negative inside) and the direction
    attaining it: ``max_theta Re(e^{-i theta} z) - lambda_max(theta)``."""
    A = np.asarray(A, dtype=complex)
    if thetas is None:
        thetas = np.arange(DEFAULT_SAMPLES) * TWO_PI / DEFAULT_SAMPLES
        lambdas = _support_values(A, thetas)
    thetas = np.asarray(thetas)
    g = np.real(np.exp(-1j * thetas) * z) - np.asarray(lambdas)

    def f(t):
        return (np.exp(-1j * t) * z).real - support_value(A, t)

    t, v = _local_max(f, thetas, g, extra)
    return v, t


def membership(curve: BoundaryCurve, z, tol=MEMBERSHIP_TOL) -> Membership:
    """Classify ``z`` against F(A) using the support function."""
    d, t = support_distance(curve.matrix, complex(z), curve.thetas, curve.lambdas,
                            extra=[f.theta for f in curve.flats])
    if d > tol:
        kind = EXTERIOR
    elif d < -tol:
        kind = INTERIOR
    else:
        kind = BOUNDARY
    return Membership(kind, float(d), float(t))


def ray_exit(curve: BoundaryCurve, z0, phi):
    """Largest ``t`` with ``z0 + t e^{i phi}`` in F(A).

    Returns ``(t, theta)`` where ``theta`` is the outer normal of the exit
    point.  Valid whenever the line meets F(A).  The normal is located by
    minimizing the support-line intercept and then polished by bracketing
    the direction whose boundary point crosses the ray.
    """
    A = curve.matrix
    z0 = complex(z0)
    u = complex(np.exp(1j * phi))
    thetas = curve.thetas
    den = np.real(np.exp(-1j * thetas) * u)
    num = curve.lambdas - np.real(np.exp(-1j * thetas) * z0)
    ok = den > 1e-9
    vals = np.where(ok, num / np.where(ok, den, 1.0), np.inf)

    def h(t):
        d = (np.exp(-1j * t) * u).real
        if d <= 1e-12:
            return np.inf
        return (support_value(A, t) - (np.exp(-1j * t) * z0).real) / d

    t_best, _ = _local_max(lambda t: -h(t), thetas, -vals,
                           extra=[f.theta for f in curve.flats])

    def side(t):
        sp = support_data(A, t)
        offs = [(np.conj(u) * (p - z0)).imag for p in sp.points]
        if min(offs) <= 0 <= max(offs):
            return 0.0
        return offs[0]

    step = TWO_PI / max(len(thetas), 16)
    lo, hi = t_best - step, t_best + step
    s_lo, s_hi = side(lo), side(hi)
    if s_lo < 0 < s_hi or s_hi < 0 < s_lo:
        try:
            t_best = brentq(side, lo, hi, xtol=1e-15, rtol=4.5e-16, maxiter=200) % TWO_PI
        except ValueError:
            pass
    return h(t_best), t_best


def vertical_extent(curve: BoundaryCurve, alpha):
    """Lowest and highest imaginary parts of F(A) on the line Re z = alpha."""
    up, _ = ray_exit(curve, alpha, math.pi / 2)
    down, _ = ray_exit(curve, alpha, -math.pi / 2)
    return -down, up


def _reducing_space(A, z, rtol=1e-8):
    n = A.shape[0]
    I = np.eye(n)
    M = np.vstack([A - z * I, A.conj().T - np.conj(z) * I])
    _, S, Vh = np.linalg.svd(M)
    null = S <= rtol * _scale(A)
    return Vh[null].conj().T


def is_corner(A, z, tol=MEMBERSHIP_TOL) -> bool:
    """A boundary point is a corner iff it is an eigenvalue with a reducing
    eigenspace and it stays outside the field of values of the remaining
    block; then it supports a whole interval of directions."""
    A = np.asarray(A, dtype=complex)
    X = _reducing_space(A, z)
    if X.shape[1] == 0:
        return False
    if X.shape[1] == A.shape[0]:
        return True
    P = np.eye(A.shape[0]) - X @ X.conj().T
    w, U = np.linalg.eigh(P)
    Q = U[:, w > 0.5]
    d, _ = support_distance(Q.conj().T @ A @ Q, z)
    return d > tol


def _on_segment(z, a, b, tol):
    ab = b - a
    if abs(ab) == 0:
        return abs(z - a) <= tol, 0.0
    t = ((z - a) / ab).real
    t = min(max(t, 0.0), 1.0)
    return abs(a + t * ab - z) <= tol, t


def classify_point(curve: BoundaryCurve, z, tol=MEMBERSHIP_TOL) -> BoundaryClass:
    """Corner, relative interior of a flat portion, or round point.

    A point is not round exactly when both one-sided neighbourhoods of it in
    the boundary are line segments; both flags are reported.
    """
    z = complex(z)
    mem = membership(curve, z, tol)
    if mem.kind != BOUNDARY:
        raise PointNotOnBoundary(f"{z} is {mem.kind} (signed distance {mem.distance:.3e})")
    A = curve.matrix
    if is_corner(A, z, tol):
        return BoundaryClass(CORNER, True, True, mem.theta)

    flats = list(curve.flats)
    sp = support_data(A, mem.theta)
    if sp.is_flat:
        flats.append(Flat(sp.theta, *sp.segment))
    before = after = False
    for f in flats:
        on, _ = _on_segment(z, f.start, f.end, tol)
        if not on:
            continue
        near_start = abs(z - f.start) <= tol
        near_end = abs(z - f.end) <= tol
        if not near_start and not near_end:
            return BoundaryClass(FLAT_INTERIOR, True, True, f.theta)
        if near_end:
            before = True
        if near_start:
            after = True
    kind = FLAT_INTERIOR if (before and after) else ROUND
    return BoundaryClass(kind, before, after, mem.theta)


def is_normal(A) -> bool:
    A = np.asarray(A, dtype=complex)
    Ah = A.conj().T
    return np.linalg.norm(A @ Ah - Ah @ A) <= 1e-12 * np.linalg.norm(A) ** 2


def is_convexoid(A, tol=1e-8, samples=DEFAULT_SAMPLES) -> bool:
    """True iff the support function never exceeds that of the spectrum hull."""
    A = matcore.as_matrix(A)
    thetas = np.arange(samples) * TWO_PI / samples
    lam = _support_values(A, thetas)
    mu = np.linalg.eigvals(A)
    hull = np.max(np.real(np.exp(-1j * thetas)[:, None] * mu[None, :]), axis=1)
    return bool(np.all(lam <= hull + tol))


def point_polyline_distance(z, P):
    """Distance from points ``z`` to the closed polyline ``P``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = P
    b = np.roll(P, -1)
    ab = b - a
    denom = np.where(np.abs(ab) > 0, np.abs(ab) ** 2, 1.0)
    t = np.real((z[:, None] - a[None]) * np.conj(ab)[None]) / denom[None]
    t = np.clip(t, 0.0, 1.0)
    proj = a[None] + t * ab[None]
    return np.min(np.abs(z[:, None] - proj), axis=1)


def polyline_hausdorff(P, Q, per_edge=8):
    """Hausdorff distance between two closed polylines (edges sampled)."""

    def dense(P):
        s = np.linspace(0, 1, per_edge, endpoint=False)
        return (P[:, None] + s[None] * (np.roll(P, -1) - P)[:, None]).ravel()

    return float(max(point_polyline_distance(dense(P), Q).max(),
                     point_polyline_distance(dense(Q), P).max()))


def convex_hull(points):
    """Counter-clockwise hull of complex points (monotone chain)."""
    pts = sorted(set((float(p.real), float(p.imag)) for p in np.atleast_1d(points)))
    if len(pts) <= 2:
        return np.array([complex(*p) for p in pts])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array([complex(*p) for p in lower[:-1] + upper[:-1]])
