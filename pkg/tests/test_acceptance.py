"""Acceptance criteria; each prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import contextlib
import filecmp
import io
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from fovkit import boundary, cli, continuity, fiber, matcore, reducibility, repro
from fovkit.errors import RankDeficit, WitnessNotFound

SEED = 2024
E12 = np.array([1, 1, 0, 0]) / math.sqrt(2)


def _rng(k):
    return np.random.default_rng([SEED, k])


def _cmat(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _normal(rng, n):
    U = matcore.random_unitary(n, rng)
    return U @ np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n)) @ U.conj().T


def _ellipse_defect(A, P):
    l1, l2 = np.linalg.eigvals(A)
    minor2 = max(np.trace(A.conj().T @ A).real - abs(l1) ** 2 - abs(l2) ** 2, 0.0)
    major = math.sqrt(abs(l1 - l2) ** 2 + minor2)
    return float(np.max(np.abs(np.abs(P - l1) + np.abs(P - l2) - major)))


def criterion_1():
    rng = _rng(1)
    worst = 0.0
    for k in range(100):
        n = 1 + k % 6
        N = _normal(rng, n)
        hull = boundary.convex_hull(np.linalg.eigvals(N))
        worst = max(worst, boundary.polyline_hausdorff(boundary.trace_boundary(N).polyline, hull))
    return worst <= 1e-8, 10, f"max Hausdorff {worst:.2e} (<= 1e-8)"


def criterion_2():
    rng = _rng(2)
    worst = max(_ellipse_defect(A, boundary.trace_boundary(A).polyline)
                for A in (_cmat(rng, 2) for _ in range(100)))
    disk = float(np.max(np.abs(np.abs(boundary.trace_boundary(repro.disk_matrix()).polyline) - 1)))
    ok = worst <= 1e-7 and disk <= 1e-8
    return ok, 5, f"ellipse defect {worst:.2e} (<= 1e-7), disk radial error {disk:.2e} (<= 1e-8)"


def criterion_3():
    rng = _rng(3)
    failures, worst = 0, 0.0
    for k in range(500):
        n = 2 + k % 4
        A = _cmat(rng, n)
        x, y = matcore.random_unit(n, rng), matcore.random_unit(n, rng)
        eps = (0.1, 0.5, 1.0)[k % 3]
        try:
            w = continuity.scaling_witness(A, x, y, eps)
        except WitnessNotFound:
            failures += 1
            continue
        cap = matcore.projective_distance(w.v, x)
        if w.residual > 1e-8 or cap > eps / 2 + 1e-9:
            failures += 1
        worst = max(worst, w.residual)
    return failures == 0, 60, f"{failures}/500 tuples without a Frobenius-cap witness (need 0)"


def criterion_4():
    rng = _rng(4)
    full, deficits = 0, 0
    for k in range(200):
        n = 2 + k % 5
        A = _cmat(rng, n)
        curve = boundary.trace_boundary(A, base_samples=180)
        edge = boundary.support_data(A, rng.uniform(0, 2 * math.pi)).points[0]
        z = complex(np.trace(A) / n + rng.uniform(0.1, 0.9) * (edge - np.trace(A) / n))
        try:
            s = fiber.fiber_basis(A, curve, z, seed=k)
        except RankDeficit:
            deficits += 1
            continue
        if s.rank == n and matcore.smallest_singular_value(s.representatives) > 1e-6:
            full += 1
    return full >= 198, 120, f"{full}/200 full rank, {deficits} RankDeficit (>= 99%)"


def criterion_5():
    A = repro.load_example("ex3x3").matrix
    curve = boundary.trace_boundary(A)
    strong = continuity.probe_strong(A, curve, 1)
    weak = continuity.probe_weak(A, curve, 1)
    cert = continuity.separation_certificate(A, curve, 1, "upper", np.array([0, 0, 1.0]))
    dw = matcore.projective_distance(weak.witness, np.array([1, 1, 0]) / math.sqrt(2)) if weak.witness is not None else np.inf
    ok = (strong.verdict == continuity.REFUTED and abs(cert.distance_bound - math.sqrt(2)) <= 1e-3
          and weak.verdict == continuity.PASS and dw <= 1e-6)
    return ok, 30, (f"strong {strong.verdict}, bound {cert.distance_bound:.6f} (sqrt2 +- 1e-3), "
                    f"weak {weak.verdict}, witness distance {dw:.1e}")


def criterion_6():
    A = repro.load_example("ex4x4-reducible", {"b": 1, "k": 1}).matrix
    curve = boundary.trace_boundary(A)
    weak = continuity.probe_weak(A, curve, 0)
    up = continuity.separation_certificate(A, curve, 0, "upper", np.array([0, 0, 1.0, 0]))
    lo = continuity.separation_certificate(A, curve, 0, "lower", np.array([1.0, 0, 0, 0]))
    grid = repro.fiber_grid_bound(up, lo, 64)["max_min"]
    flat = min((max(abs(f.start - (1 - 1j)), abs(f.end - (1 + 1j))) for f in curve.flats), default=np.inf)
    ok = weak.verdict == continuity.REFUTED and grid >= 1 / math.sqrt(2) - 1e-2 and flat <= 1e-8
    return ok, 60, f"weak {weak.verdict}, grid bound {grid:.4f} (>= 0.6971), flat endpoint error {flat:.1e}"


def criterion_7():
    A = repro.load_example("ex4x4-irreducible").matrix
    curve = boundary.trace_boundary(A)
    dim = reducibility.commutant_dimension(A).dimension
    loc = boundary.membership(curve, 0).kind
    sample = fiber.fiber_sample(A, 0, budget=2000)
    tail = max(float(np.linalg.norm(v[2:])) for v in sample.members)
    strong = continuity.probe_strong(A, curve, 0, continuity.ProbeSettings(representatives=[E12]))
    up = continuity.separation_certificate(A, curve, 0, "upper", E12)
    lo = continuity.separation_certificate(A, curve, 0, "lower", E12)
    up_ok = all(s[0] == "+" and set(s[1:]) <= {"+", "0"} for s in up.sign_patterns)
    lo_ok = all(s[1] in "-0" and s[2] in "-0" and s[3] in "+0" for s in lo.sign_patterns)
    ok = (dim == 1 and loc == boundary.BOUNDARY and tail <= 1e-6 and strong.verdict == continuity.REFUTED
          and up_ok and lo_ok)
    return ok, 120, (f"commutant {dim}, z=0 {loc}, tail {tail:.1e}, strong {strong.verdict}, "
                     f"signs upper {up.sign_patterns} lower {lo.sign_patterns}")


def criterion_8():
    inst = repro.load_example("ex6x6")
    A = inst.matrix
    curve = boundary.trace_boundary(A)
    dim = reducibility.commutant_dimension(A).dimension
    left = float(curve.polyline.real.min())
    dev = 0.0
    for a in np.arange(1, 10) / 10:
        s = repro.slice_extremal_6x6(inst, a)
        low, high = boundary.vertical_extent(curve, a)
        dev = max(dev, abs(s.beta_plus - high), abs(s.beta_minus - low))
    rows = [r for r in repro.slice_limits_6x6(inst) if r["k"] >= 6]
    mono = all(b["dist_plus_e1"] <= a["dist_plus_e1"] and b["dist_minus_e2"] <= a["dist_minus_e2"]
               for a, b in zip(rows, rows[1:]))
    last = rows[-1]
    weak = continuity.probe_weak(A, curve, 0)
    ok = (dim == 1 and abs(left) <= 1e-8 and dev <= 1e-7 and mono and last["dist_plus_e1"] < 0.05
          and last["dist_minus_e2"] < 0.05 and weak.verdict == continuity.REFUTED)
    return ok, 180, (f"commutant {dim}, leftmost {left:.1e}, slice dev {dev:.1e}, "
                     f"k=13 distances {last['dist_plus_e1']:.4f}/{last['dist_minus_e2']:.4f}, "
                     f"monotone {mono}, weak {weak.verdict}")


def criterion_9():
    rng = _rng(9)
    refuted = fired = 0
    for k in range(100):
        kind = k % 3
        if kind == 0:
            A = _normal(rng, int(rng.integers(2, 6)))
        elif kind == 1:
            A = _cmat(rng, 2)
        else:
            A = _cmat(rng, 3)
        curve = boundary.trace_boundary(A)
        p = boundary.support_data(A, rng.uniform(0, 2 * math.pi)).points[0]
        z = p if k % 2 == 0 else 0.5 * p + 0.5 * np.trace(A) / A.shape[0]
        pred = continuity.predict_continuity(A, curve, z)
        if not pred.strong:
            continue
        fired += 1
        refuted += continuity.probe_strong(A, curve, z).verdict == continuity.REFUTED
    ok = fired == 100 and refuted == 0
    return ok, 300, f"{fired} matrices fired a strong rule, {refuted} probes refuted (need 0)"


def criterion_10():
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp) / "a", Path(tmp) / "b"
        with contextlib.redirect_stdout(io.StringIO()):
            codes = [cli.main(["repro", "all", "--out", str(d), "--seed", "0"]) for d in (a, b)]
        files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
        other = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
        _, mismatch, errors = filecmp.cmpfiles(a, b, [str(f) for f in files], shallow=False)
    ok = codes == [0, 0] and files == other and not mismatch and not errors and len(files) > 0
    return ok, None, f"{len(files)} files, {len(mismatch) + len(errors)} differ, exit codes {codes}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def evaluate(k):
    t0 = time.perf_counter()
    ok, budget, detail = CRITERIA[k - 1]()
    elapsed = time.perf_counter() - t0
    if budget is not None and elapsed > budget:
        ok, detail = False, f"{detail}; {elapsed:.1f}s exceeds {budget}s"
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f}s]"
    return ok, line


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, capsys):
    ok, line = evaluate(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(k) for k in range(1, 11)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
