"""Scaling witnesses and empirical continuity probes for the inverse of
``x -> x* A x``.

Probes can only refute: an ``EvidencePass`` means no counterexample was
found at the tested resolution, while ``Refuted`` comes with the targets that
could not be reached from a small cap around a fiber representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import boundary, fiber, matcore, reducibility
from .errors import ArcNotOnBoundary, PointNotOnBoundary, WitnessNotFound

STRONG, WEAK = "Strong", "Weak"
PASS, REFUTED = "EvidencePass", "Refuted"
EIG_ROUNDOFF = 64 * np.finfo(float).eps
# boundary targets whose top support eigenvalue is closer than this (relative)
# to the next one cannot be assigned to a sheet of the fiber reliably
RESOLVE_GAP = 1e-12
FLAT_RESOLVE = 1e-6


@dataclass
class ScalingWitness:
    v: np.ndarray
    delta: float
    cap_radius: float
    residual: float
    distance: float  # projective (Frobenius) distance from v to x
    target: complex


def _span_grid(B, z, tmax, grid):
    T, P = np.meshgrid(np.linspace(0.0, tmax, grid), np.linspace(0, 2 * math.pi, grid, endpoint=False),
                       indexing="ij")
    R = np.abs(fiber._f2(B, T, P) - z)
    return T.ravel(), P.ravel(), R.ravel()


def _bounded_newton(B, z, t, p, tmax, iters=80):
    r = fiber._f2(B, t, p) - z
    for _ in range(iters):
        if abs(r) <= 1e-15 * max(1.0, abs(z)):
            break
        J = fiber._jac2(B, t, p)
        d = np.linalg.lstsq(J, -np.array([r.real, r.imag]), rcond=1e-12)[0]
        step = 1.0
        for _ in range(40):
            tn = min(abs(t + step * d[0]), tmax)
            pn = p + step * d[1]
            rn = fiber._f2(B, tn, pn) - z
            if abs(rn) < abs(r):
                break
            step *= 0.5
        else:
            break
        t, p, r = tn, pn, rn
    return t, p, abs(r)


def scaling_witness(A, x, y, eps, grid=256, norm="frobenius", tol=1e-8) -> ScalingWitness:
    """Find ``v`` in span{x, y} near ``x`` realizing the scaled target.

    With ``delta = eps^2 / 4`` the target is ``delta f(y) + (1 - delta) f(x)``
    and ``v`` must satisfy ``||vv* - xx*|| <= eps / 2``.  ``norm`` selects the
    matrix norm of that cap: ``"frobenius"`` (default) or ``"operator"``.
    Raises :class:`WitnessNotFound` if no such ``v`` is located.
    """
    if not 0 < eps <= 2:
        raise ValueError("eps must lie in (0, 2]")
    A = matcore.as_matrix(A)
    x = matcore.normalize(x)
    y = matcore.normalize(y)
    delta = eps * eps / 4
    fx, fy = matcore.fov_value(A, x), matcore.fov_value(A, y)
    target = delta * fy + (1 - delta) * fx
    cap = eps / 2
    # projective distance of cos(t) x + sin(t) u is sqrt(2) sin(t) (Frobenius)
    # or sin(t) (operator norm)
    sin_max = cap / math.sqrt(2) if norm == "frobenius" else cap
    tmax = math.asin(min(1.0, sin_max))
    w = y - np.vdot(x, y) * x
    if np.linalg.norm(w) < 1e-14 or abs(target - fx) <= 1e-15:
        return ScalingWitness(x, delta, cap, abs(fx - target), 0.0, target)
    V = np.column_stack([x, w / np.linalg.norm(w)])
    B = V.conj().T @ A @ V
    T, P, R = _span_grid(B, target, tmax, grid)
    best = None
    for k in np.argsort(R, kind="stable")[:12]:
        t, p, r = _bounded_newton(B, target, T[k], P[k], tmax)
        if best is None or r < best[2]:
            best = (t, p, r)
        if r <= 1e-13 * max(1.0, abs(target)):
            break
    t, p, r = best
    v = V @ np.array([math.cos(t), np.exp(1j * p) * math.sin(t)])
    res = abs(matcore.fov_value(A, v) - target)
    dist = matcore.projective_distance(v, x)
    limit = cap if norm == "frobenius" else cap * math.sqrt(2)
    if res > tol or dist > limit + 1e-9:
        raise WitnessNotFound(f"no witness: residual {res:.2e}, distance {dist:.4f} (cap {limit:.4f})")
    return ScalingWitness(v, delta, cap, res, dist, target)


@dataclass
class ProbeSettings:
    eps_grid: tuple = (0.3, 0.1, 0.03, 0.01)
    starts: int = 8
    max_iter: int = 100
    reach_tol: float = 1e-9
    cap_factor: float = 1.25
    # each eps level probes targets at rho(eps) times these factors
    radius_factors: tuple = (1.0, 0.125, 0.015625)
    max_representatives: int = 8
    seed: int = 0
    representatives: list | None = None


@dataclass
class TargetRecord:
    target: complex
    kind: str  # "arc-ccw", "arc-cw" or "interior"
    radius: float
    reached: bool
    residual: float
    distance: float | None  # distance from the representative of the reaching vector
    conclusive: bool = True


@dataclass
class RepresentativeRecord:
    x: np.ndarray
    table: dict  # eps -> list of TargetRecord
    refuted: bool

    def unreached(self, eps):
        return [t for t in self.table[eps] if t.conclusive and not t.reached]

    def level_status(self, eps):
        """``"fail"``, ``"pass"`` or ``"unresolved"`` for one eps level.

        Targets are grouped by radius; a group counts only when all of its
        targets are conclusive.  The level fails when every counted radius
        has an unreached target, i.e. no tested radius works as a delta.
        """
        groups = {}
        for t in self.table[eps]:
            groups.setdefault(t.radius, []).append(t)
        counted = [g for g in groups.values() if all(t.conclusive for t in g)]
        if not counted:
            return "unresolved"
        return "fail" if all(any(not t.reached for t in g) for g in counted) else "pass"


@dataclass
class ContinuityReport:
    z: complex
    mode: str
    verdict: str
    records: list
    location: str
    witness: np.ndarray | None = None
    certificates: list = field(default_factory=list)


@dataclass
class SeparationCertificate:
    arc: str
    candidate: np.ndarray
    coordinate_pattern: list  # indices that vanish on every arc fiber
    sign_patterns: list  # distinct sign strings seen along the arc
    distance_bound: float
    rows: list  # (k, zeta, min distance, fiber vectors)


@dataclass
class Prediction:
    strong: bool | None
    weak: bool | None
    rules: list
    location: str


def _scale(A):
    return max(1.0, float(np.linalg.norm(A)))


def arc_point(curve, z, s, side, theta_z=None):
    """Boundary point at chord distance ``s`` from the boundary point ``z``.

    ``side=+1`` walks counter-clockwise, ``-1`` clockwise.  Returns
    ``(point, theta)`` with ``theta`` an outer normal at the point.
    """
    A = curve.matrix
    z = complex(z)
    if theta_z is None:
        theta_z = boundary.membership(curve, z).theta

    def far(sp):
        return sp.points[-1] if side > 0 else sp.points[0]

    def near(sp):
        return sp.points[0] if side > 0 else sp.points[-1]

    def on_segment(sp, lo_pt, hi_pt):
        # point at distance s from z on the segment lo_pt -> hi_pt
        a, b = 0.0, 1.0
        for _ in range(100):
            m = (a + b) / 2
            if abs(lo_pt + m * (hi_pt - lo_pt) - z) < s:
                a = m
            else:
                b = m
        return lo_pt + b * (hi_pt - lo_pt)

    sp0 = boundary.support_data(A, theta_z)
    if sp0.is_flat and abs(far(sp0) - z) >= s:
        d = far(sp0) - z
        return z + s * d / abs(d), sp0.theta
    lo, step = theta_z, 1e-7
    while True:
        hi = theta_z + side * step
        if abs(far(boundary.support_data(A, hi)) - z) >= s or step > math.pi:
            break
        lo = hi
        step *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if abs(far(boundary.support_data(A, mid)) - z) >= s:
            hi = mid
        else:
            lo = mid
    sp = boundary.support_data(A, hi)
    if sp.is_flat and abs(near(sp) - z) <= s <= abs(far(sp) - z):
        return on_segment(sp, near(sp), far(sp)), sp.theta
    return far(sp), sp.theta


def fiber_representatives(A, curve, z, limit=8):
    """A finite, deterministic set of unit vectors in the fiber over ``z``."""
    A = np.asarray(A, dtype=complex)
    z = complex(z)
    scale = _scale(A)
    mem = boundary.membership(curve, z)
    reps = []

    def add(x):
        x = matcore.canonical(x)
        if abs(matcore.fov_value(A, x) - z) > 1e-8 * scale:
            return
        if all(matcore.projective_distance(x, r) > 1e-6 for r in reps):
            reps.append(x)

    if mem.kind == boundary.INTERIOR:
        for phi in (0.0, math.pi / 3, 2 * math.pi / 3):
            try:
                add(fiber.interior_preimage(A, curve, z, phi))
            except Exception:  # a failed cut only costs one representative
                continue
        return reps[:limit]

    sp = boundary.support_data(A, mem.theta)
    if sp.multiplicity == 1:
        add(sp.point_generators[0])
        return reps
    base = fiber.nice_basis(sp.generators)
    for x in base:
        add(x)
    for i in range(len(base)):
        for j in range(i + 1, len(base)):
            add(base[i] + base[j])
    try:
        for x in fiber.boundary_preimage(A, sp.theta, z):
            add(x)
    except Exception:
        pass
    if not reps:
        V = sp.generators
        B = V.conj().T @ A @ V
        sample = fiber.fiber_sample(B, z, budget=200, seed=0)
        for y in sample.representatives:
            add(V @ y)
    return reps[:limit]


def _targets(curve, z, rho, location, theta_z):
    """Targets as ``(w, kind, theta)``; ``theta`` is an outer normal for boundary targets."""
    out = []
    if location == boundary.BOUNDARY:
        for side, label in ((1, "arc-ccw"), (-1, "arc-cw")):
            for s in (rho, rho / 2):
                p, th = arc_point(curve, z, s, side, theta_z)
                if abs(p - z) > 1e-12:
                    out.append((p, label, th))
        c = curve.centroid
        if abs(c - z) > 1e-12:
            w = z + (rho / 2) * (c - z) / abs(c - z)
            if boundary.membership(curve, w).kind != boundary.EXTERIOR:
                out.append((w, "interior", None))
    else:
        for k in range(4):
            w = z + (rho / 2) * complex(np.exp(1j * k * math.pi / 2))
            if boundary.membership(curve, w).kind != boundary.EXTERIOR:
                out.append((w, "interior", None))
    return out


def _seeded_starts(x, spread, count, rng):
    n = len(x)
    starts = [x]
    for _ in range(count - 1):
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g -= np.vdot(x, g) * x
        g /= np.linalg.norm(g)
        starts.append(matcore.normalize(x + rng.uniform(0, spread) * g))
    return np.array(starts)


def _top_eigenspace(A, theta):
    """Eigenspace containing every preimage of the boundary point at ``theta``,
    and whether that space is numerically resolved.

    On a flat the normal is recomputed from the segment endpoints, since the
    angle handed in is only accurate to the multiplicity tolerance; the flat
    counts as resolved when it is long enough.  Elsewhere the top eigenvalue
    must be simple with a gap well above rounding.
    """
    sp = boundary.support_data(A, theta)
    scale = _scale(A)
    if sp.is_flat:
        p, q = sp.segment
        theta_e = float(np.angle(-1j * (q - p)))
        m = sp.multiplicity
        vals, vecs = np.linalg.eigh(matcore.rotated_hermitian(A, theta_e))
        # a chord between two nearly touching branches is not a flat: its
        # eigenvalues stay apart at the chord's own normal
        if vals[-1] - vals[-m] <= RESOLVE_GAP * scale:
            gap = vals[-m] - vals[-m - 1] if m < len(vals) else np.inf
            ok = abs(q - p) > FLAT_RESOLVE * scale and gap > RESOLVE_GAP * scale
            return vecs[:, -m:], bool(ok)
    vals, vecs = np.linalg.eigh(matcore.rotated_hermitian(A, theta))
    m = int(np.sum(vals >= vals[-1] - EIG_ROUNDOFF * scale))
    simple = m == 1 and (len(vals) == 1 or vals[-1] - vals[-2] > RESOLVE_GAP * scale)
    return vecs[:, -m:], simple


def _try_reach(A, x, w, eps, settings, rng, theta=None):
    """Attempt ``f_A(v) = w`` with ``v`` inside the cap of radius ``cap_factor * eps`` at ``x``.

    For a boundary target every preimage lies in the top eigenspace ``E`` of
    the support operator at ``theta``, so the solve runs on the compression
    to ``E``.  This keeps the decision exact when ``w`` is separated from the
    image of the cap by less than rounding error in the plane.  A boundary
    target is inconclusive when its top eigenvalue is not resolvably simple.

    Returns ``(reached, residual, distance, conclusive)``.
    """
    cap = settings.cap_factor * eps
    tol = settings.reach_tol * _scale(A)
    if theta is None:
        X, res, alive = fiber.sphere_newton(A, w, _seeded_starts(x, eps / 2, settings.starts, rng),
                                            max_iter=settings.max_iter, anchor=x, cap=cap)
        ok = alive & (res <= tol)
        if ok.any():
            k = int(np.flatnonzero(ok)[0])
            return True, float(res[k]), matcore.projective_distance(X[k], x), True
        return False, float(res.min()), None, True
    V, conclusive = _top_eigenspace(A, theta)
    c = V.conj().T @ x
    ov = float(np.linalg.norm(c))
    # every unit vector of E is at least this far from x
    if math.sqrt(max(2.0 * (1.0 - ov * ov), 0.0)) > cap or ov == 0.0:
        return False, float("inf"), None, conclusive
    y0 = c / ov
    B = V.conj().T @ A @ V
    if B.shape[0] == 1:
        res = abs(complex(B[0, 0]) - w)
        hit = res <= tol
        return hit, float(res), (matcore.projective_distance(V[:, 0], x) if hit else None), conclusive
    # |<Vy, x>| = ov |<y, y0>|, so the ambient cap becomes a cap around y0 in E
    inner = 2.0 * (1.0 - (1.0 - cap * cap / 2.0) / (ov * ov))
    Y, res, alive = fiber.sphere_newton(B, w, _seeded_starts(y0, eps / 2, settings.starts, rng),
                                        max_iter=settings.max_iter, anchor=y0,
                                        cap=math.sqrt(max(inner, 0.0)))
    ok = alive & (res <= tol)
    if ok.any():
        k = int(np.flatnonzero(ok)[0])
        return True, float(res[k]), matcore.projective_distance(V @ Y[k], x), conclusive
    return False, float(res.min()), None, conclusive


def _probe_representative(A, x, targets_by_eps, settings, rng):
    table = {}
    for eps, targets in targets_by_eps.items():
        rows = []
        for w, kind, theta, radius in targets:
            hit, res, dist, ok = _try_reach(A, x, w, eps, settings, rng, theta)
            rows.append(TargetRecord(complex(w), kind, radius, bool(hit), res, dist, ok))
        table[eps] = rows
    rec = RepresentativeRecord(x, table, False)
    status = [rec.level_status(eps) for eps in table]
    rec.refuted = "fail" in status and "pass" not in status
    return rec


def _run_probes(A, curve, z, settings):
    A = matcore.as_matrix(A)
    z = complex(z)
    mem = boundary.membership(curve, z)
    if mem.kind == boundary.EXTERIOR:
        raise PointNotOnBoundary(f"{z} is outside F(A)")
    reps = settings.representatives
    if reps is None:
        reps = fiber_representatives(A, curve, z, settings.max_representatives)
    reps = [matcore.canonical(r) for r in reps]
    targets_by_eps = {}
    for eps in settings.eps_grid:
        rows = []
        for f in settings.radius_factors:
            rho = f * eps * eps / 8
            rows += [t + (rho,) for t in _targets(curve, z, rho, mem.kind, mem.theta)]
        targets_by_eps[eps] = rows
    records = []
    for i, x in enumerate(reps):
        rng = np.random.default_rng([settings.seed, i])
        records.append(_probe_representative(A, x, targets_by_eps, settings, rng))
    return records, mem.kind


def probe_strong(A, curve, z, settings: ProbeSettings | None = None) -> ContinuityReport:
    """Refuted if some fiber representative misses a nearby target at every tested eps."""
    settings = settings or ProbeSettings()
    records, loc = _run_probes(A, curve, z, settings)
    verdict = REFUTED if any(r.refuted for r in records) else PASS
    return ContinuityReport(complex(z), STRONG, verdict, records, loc)


def probe_weak(A, curve, z, settings: ProbeSettings | None = None) -> ContinuityReport:
    """Passes if at least one fiber representative reaches every target."""
    settings = settings or ProbeSettings()
    records, loc = _run_probes(A, curve, z, settings)
    passing = [r for r in records if not r.refuted]
    verdict = PASS if passing else REFUTED
    witness = passing[0].x if passing else None
    return ContinuityReport(complex(z), WEAK, verdict, records, loc, witness)


def verdicts_from_records(records):
    """(strong, weak) verdicts implied by one set of per-representative records."""
    strong = REFUTED if any(r.refuted for r in records) else PASS
    weak = PASS if any(not r.refuted for r in records) else REFUTED
    return strong, weak


def _sign_string(x, tol=1e-9):
    out = []
    for c in x:
        if abs(c) <= tol:
            out.append("0")
        elif abs(c.imag) > tol:
            out.append("?")
        else:
            out.append("+" if c.real > 0 else "-")
    return "".join(out)


def resolve_side(curve, z, arc, theta_z=None):
    """Map an arc label (ccw, cw, upper, lower, left, right) to a walking side."""
    if arc in ("ccw", "+", 1):
        return 1
    if arc in ("cw", "-", -1):
        return -1
    s = 1e-3 * max(curve.perimeter, 1e-6)
    p_ccw, _ = arc_point(curve, z, s, 1, theta_z)
    p_cw, _ = arc_point(curve, z, s, -1, theta_z)
    key = {"upper": lambda p: p.imag, "lower": lambda p: -p.imag,
           "right": lambda p: p.real, "left": lambda p: -p.real}[arc]
    return 1 if key(p_ccw) >= key(p_cw) else -1


def separation_certificate(A, curve, z, arc="ccw", candidate=None, ks=range(3, 14)) -> SeparationCertificate:
    """Fibers along a boundary arc approaching ``z`` and their distance to ``candidate``.

    Arc points sit at chord distance ``2^-k L`` from ``z`` (``L`` the
    perimeter), which matches arc length to third order for small arcs.
    """
    A = matcore.as_matrix(A)
    z = complex(z)
    mem = boundary.membership(curve, z)
    if mem.kind != boundary.BOUNDARY:
        raise ArcNotOnBoundary(f"{z} is not a boundary point ({mem.kind})")
    side = resolve_side(curve, z, arc, mem.theta)
    L = curve.perimeter
    rows = []
    zero_sets, signs = [], []
    for k in ks:
        zeta, theta = arc_point(curve, z, L * 2.0 ** (-k), side, mem.theta)
        vecs = fiber.boundary_preimage(A, theta, zeta)
        dists = [matcore.projective_distance(v, candidate) for v in vecs] if candidate is not None else []
        rows.append((int(k), complex(zeta), min(dists) if dists else None, vecs))
        for v in vecs:
            zero_sets.append({i for i, c in enumerate(v) if abs(c) <= 1e-6})
            s = _sign_string(v)
            if s not in signs:
                signs.append(s)
    pattern = sorted(set.intersection(*zero_sets)) if zero_sets else []
    bound = min(r[2] for r in rows) if candidate is not None else float("nan")
    cand = matcore.canonical(candidate) if candidate is not None else None
    label = arc if isinstance(arc, str) else ("ccw" if side > 0 else "cw")
    return SeparationCertificate(label, cand, pattern, signs, float(bound), rows)


def predict_continuity(A, curve, z) -> Prediction:
    """Rule engine for where strong continuity is guaranteed.

    Interior points, non-round boundary points, boundary points with a single
    preimage, convexoid matrices, 2x2 matrices and unitarily irreducible 3x3
    matrices are all covered; any 3x3 matrix keeps weak continuity.
    """
    A = matcore.as_matrix(A)
    z = complex(z)
    n = A.shape[0]
    mem = boundary.membership(curve, z)
    if mem.kind == boundary.EXTERIOR:
        return Prediction(None, None, ["outside F(A)"], mem.kind)
    rules = []
    if mem.kind == boundary.INTERIOR:
        rules.append("interior point")
    else:
        cls = boundary.classify_point(curve, z)
        if not cls.is_round:
            rules.append(f"non-round boundary point ({cls.kind})")
        sp = boundary.support_data(A, mem.theta)
        if sp.multiplicity == 1:
            rules.append("singleton fiber")
    if boundary.is_convexoid(A):
        rules.append("convexoid")
    if n == 2:
        rules.append("2x2")
    if n == 3 and reducibility.is_unitarily_irreducible(A):
        rules.append("unitarily irreducible 3x3")
    if rules:
        return Prediction(True, True, rules, mem.kind)
    if n == 3:
        return Prediction(None, True, ["3x3: weak continuity everywhere"], mem.kind)
    return Prediction(None, None, ["unresolved - probe"], mem.kind)
