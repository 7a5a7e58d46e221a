"""Command-line entry point: ``fovkit boundary|fiber|probe|reduce|repro``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import boundary, continuity, fiber, matcore, reducibility, repro
from .errors import FovkitError, InvalidParameters

CONFIG_KEYS = {"samples", "budget", "seed", "probe"}


def parse_complex(text):
    """``"RE,IM"`` or ``"RE"`` to a complex number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}")


def load_config(path):
    if path is None:
        return {}
    cfg = json.loads(Path(path).read_text())
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise InvalidParameters(f"unknown config keys: {sorted(unknown)}")
    fields = {f.name for f in dataclasses.fields(continuity.ProbeSettings)}
    bad = set(cfg.get("probe", {})) - fields
    if bad:
        raise InvalidParameters(f"unknown probe settings: {sorted(bad)}")
    return cfg


def default_seed(cfg):
    if "seed" in cfg:
        return int(cfg["seed"])
    return int(os.environ.get("FOVKIT_SEED", "0"))


def _vec(x):
    return [[float(c.real), float(c.imag)] for c in np.asarray(x, dtype=complex)]


def _dump(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_boundary(args, cfg):
    A = matcore.load_matrix(args.matrix)
    samples = args.samples or cfg.get("samples", boundary.DEFAULT_SAMPLES)
    curve = boundary.trace_boundary(A, samples)
    repro.write_boundary_csv(curve, args.out or sys.stdout)
    print(f"# points={len(curve.polyline)} flats={len(curve.flats)} corners={len(curve.corners)} "
          f"perimeter={curve.perimeter:.12g}", file=sys.stderr)
    return 0


def cmd_fiber(args, cfg):
    A = matcore.load_matrix(args.matrix)
    seed = args.seed if args.seed is not None else default_seed(cfg)
    if args.basis:
        curve = boundary.trace_boundary(A, cfg.get("samples", boundary.DEFAULT_SAMPLES))
        sample = fiber.fiber_basis(A, curve, args.z, seed=seed)
    else:
        budget = args.budget or cfg.get("budget", 2000)
        sample = fiber.fiber_sample(A, args.z, budget=budget, seed=seed)
    reps = sample.representatives
    _dump({
        "z": [args.z.real, args.z.imag],
        "members": len(sample.members),
        "clusters": len(reps),
        "rank": sample.rank if sample.members else 0,
        "max_residual": max(sample.residuals) if sample.residuals else None,
        "representatives": [_vec(v) for v in reps],
    })
    return 0


def cmd_probe(args, cfg):
    A = matcore.load_matrix(args.matrix)
    curve = boundary.trace_boundary(A, cfg.get("samples", boundary.DEFAULT_SAMPLES))
    opts = dict(cfg.get("probe", {}))
    opts.setdefault("seed", args.seed if args.seed is not None else default_seed(cfg))
    if "eps_grid" in opts:
        opts["eps_grid"] = tuple(opts["eps_grid"])
    settings = continuity.ProbeSettings(**opts)
    probe = continuity.probe_strong if args.mode == "strong" else continuity.probe_weak
    report = probe(A, curve, args.z, settings)
    pred = continuity.predict_continuity(A, curve, args.z)
    records = []
    for r in report.records:
        records.append({
            "x": _vec(r.x),
            "refuted": r.refuted,
            "levels": {repr(e): r.level_status(e) for e in r.table},
            "unreached": {repr(e): [[t.target.real, t.target.imag] for t in r.unreached(e)] for e in r.table},
        })
    _dump({
        "z": [args.z.real, args.z.imag],
        "mode": report.mode,
        "location": report.location,
        "verdict": report.verdict,
        "witness": _vec(report.witness) if report.witness is not None else None,
        "prediction": {"strong": pred.strong, "weak": pred.weak, "rules": pred.rules},
        "records": records,
    })
    return 0


def cmd_reduce(args, cfg):
    A = matcore.load_matrix(args.matrix)
    basis = reducibility.commutant_dimension(A)
    out = {"commutant_dimension": basis.dimension, "irreducible": basis.dimension == 1}
    if basis.dimension > 1:
        P = reducibility.invariant_projection(A, basis)
        out["projector"] = matcore.matrix_to_json(P)
        out["rank"] = int(round(np.trace(P).real))
        out["reduction_residual"] = reducibility.reduction_residual(A, P)
    _dump(out)
    return 0


def _param_pairs(items):
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise InvalidParameters(f"expected NAME=VALUE, got {item!r}")
        out[name] = float(value)
    return out


def cmd_repro(args, cfg):
    seed = args.seed if args.seed is not None else default_seed(cfg)
    ids = repro.EXAMPLE_IDS if args.example == "all" else (args.example,)
    params = _param_pairs(args.param)
    if params and len(ids) > 1:
        raise InvalidParameters("--param needs a single example id")
    status = 0
    for eid in ids:
        out = Path(args.out) / eid if len(ids) > 1 else Path(args.out)
        res = repro.run_repro(eid, out, seed=seed, params=params or None,
                              samples=cfg.get("samples", boundary.DEFAULT_SAMPLES))
        print(f"{eid}\t{'OK' if res.ok else 'MISMATCH'}\t{len(res.checks)} checks\t{out}")
        for line in res.diff():
            print(f"  {line}")
        status = max(status, res.exit_code)
    return status


def build_parser():
    p = argparse.ArgumentParser(prog="fovkit", description="Field of values, inverse fibers and continuity probes.")
    p.add_argument("--config", help="JSON file overriding samples, budget, seed and probe settings")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("boundary", help="trace the boundary of F(A) to CSV")
    b.add_argument("--matrix", required=True)
    b.add_argument("--samples", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_boundary)

    f = sub.add_parser("fiber", help="preimages of a point under x -> x*Ax")
    f.add_argument("--matrix", required=True)
    f.add_argument("--z", required=True, type=parse_complex)
    f.add_argument("--basis", action="store_true", help="collect n independent preimages (interior z)")
    f.add_argument("--budget", type=int)
    f.add_argument("--seed", type=int)
    f.set_defaults(func=cmd_fiber)

    q = sub.add_parser("probe", help="strong or weak continuity probe at z")
    q.add_argument("--matrix", required=True)
    q.add_argument("--z", required=True, type=parse_complex)
    q.add_argument("--mode", choices=("strong", "weak"), default="strong")
    q.add_argument("--seed", type=int)
    q.set_defaults(func=cmd_probe)

    r = sub.add_parser("reduce", help="commutant dimension and a reducing projector")
    r.add_argument("--matrix", required=True)
    r.set_defaults(func=cmd_reduce)

    x = sub.add_parser("repro", help="reproduce a registered example")
    x.add_argument("example", choices=repro.EXAMPLE_IDS + ("all",))
    x.add_argument("--out", required=True)
    x.add_argument("--seed", type=int)
    x.add_argument("--param", action="append", metavar="NAME=VALUE")
    x.set_defaults(func=cmd_repro)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (FovkitError, OSError, json.JSONDecodeError) as exc:
        print(f"fovkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
