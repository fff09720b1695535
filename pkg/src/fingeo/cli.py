"""Command-line surface: build example geometries, check axioms, classify,
quotient, reconstruct semilinear maps, and run the exhaustive oracle.

Every command prints a single JSON report to stdout.  Reports are
deterministic except for the elapsed_s field.  Exit codes: 0 success or
positive verdict, 1 negative verdict (witnesses in the report), 2 malformed
input or arguments, 3 constructor error, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time

from . import linalg, serialize
from .classify import ALL_PREDICATES, BUNDLE_LIMIT, BUNDLE_SEED, classify
from .errors import (
    CapExceeded,
    ExhaustionLimit,
    FileFormatError,
    FingeoError,
    SizeLimit,
)
from .gallery import EXAMPLE_NAMES, build_example
from .geometry import CoordGeometry, Flat, bits_of, quotient
from .gf import parse_field_name
from .projective import build_pg, check_projective_axioms, pg_of
from .geometry import check_geometry_axioms
from .reconstruct import (
    MorphismInstance,
    PartialPointMap,
    ReconstructionResult,
    brute_force_oracle,
    reconstruct_affino_projective,
    reconstruct_ftpg,
    reconstruct_locally_affino,
    reconstruct_locally_projective,
)

CONSTRUCTOR_ERRORS = (SizeLimit, ValueError, AssertionError)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _report(args, inputs, payload, t0):
    rep = {
        "command": args.echo,
        "inputs": {name: _digest(p) for name, p in inputs.items()},
    }
    rep.update(payload)
    rep["elapsed_s"] = round(time.time() - t0, 6)
    print(serialize.dump_json(rep))


def _parse_ambient(text):
    s = text.strip().lower()
    if not (s.startswith("pg(") and s.endswith(")")):
        raise FileFormatError(f"bad ambient designator {text!r}")
    try:
        n, q = (int(x) for x in s[3:-1].split(","))
    except ValueError:
        raise FileFormatError(f"bad ambient designator {text!r}")
    return n, q


def cmd_make_example(args, t0):
    try:
        K = parse_field_name(args.field)
    except ValueError as exc:
        raise FileFormatError(str(exc))
    try:
        X = build_example(args.name, K, args.dim)
    except CONSTRUCTOR_ERRORS + (FingeoError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    serialize.save_geometry(X, args.out)
    _report(args, {"out": args.out}, {"points": X.n_points, "name": args.name}, t0)
    return 0


def cmd_check(args, t0):
    G = serialize.load_geometry(args.geometry)
    if args.axioms == "g":
        rep = check_geometry_axioms(G)
        payload = {"axioms": "geometry", "report": rep.as_dict()}
        ok = rep.all_pass
    else:
        rep = check_projective_axioms(G)
        payload = {"axioms": "projective", "report": rep.as_dict()}
        ok = rep.is_projective
    if not args.witnesses:
        payload["report"]["witnesses"] = {
            k: "suppressed" for k in payload["report"]["witnesses"]
        }
    _report(args, {"geometry": args.geometry}, payload, t0)
    return 0 if ok else 1


def cmd_classify(args, t0):
    G = serialize.load_geometry(args.geometry)
    if not isinstance(G, CoordGeometry):
        raise FileFormatError("classification requires an embedded geometry")
    if args.ambient:
        n, q = _parse_ambient(args.ambient)
        P = pg_of(G)
        if (P.ncoords - 1, P.field.q) != (n, q):
            raise FileFormatError(
                f"ambient mismatch: file implies pg({P.ncoords - 1},{P.field.q})"
            )
    preds = args.predicate.split(",") if args.predicate else None
    if preds:
        unknown = [p for p in preds if p not in ALL_PREDICATES]
        if unknown:
            raise FileFormatError(f"unknown predicates: {unknown}")
    report = classify(G, preds, limit=args.limit or BUNDLE_LIMIT, seed=args.seed or BUNDLE_SEED)
    payload = {"classification": report.as_dict(include_witnesses=args.witnesses)}
    ok = all(v.verdict is not False for v in report.verdicts.values())
    _report(args, {"geometry": args.geometry}, payload, t0)
    return 0 if ok else 1


def cmd_quotient(args, t0):
    G = serialize.load_geometry(args.geometry)
    try:
        points = [int(x) for x in args.flat.split(",")] if args.flat else []
    except ValueError:
        raise FileFormatError(f"bad flat point list {args.flat!r}")
    E = G.closure(points)
    if sorted(bits_of(E.mask)) != sorted(points):
        raise FileFormatError(f"points {points} are not a flat (closure adds points)")
    Q, pi = quotient(G, E)
    payload = {
        "classes": [sorted(bits_of(m)) for m in Q.classes],
        "quotient_points": Q.n_points,
        "quotient_dim": Q.dim(),
    }
    if args.out:
        table = {
            "points": Q.n_points,
            "flats": [serialize.sorted_bits(m) for m in Q.flats()],
        }
        serialize.dump_json(table, args.out)
    _report(args, {"geometry": args.geometry}, payload, t0)
    return 0


def _instance_from_files(args):
    G = serialize.load_geometry(args.geometry)
    if not isinstance(G, CoordGeometry):
        raise FileFormatError("reconstruction requires an embedded geometry")
    pairs, file_target = serialize.load_map_pairs(args.map)
    K = G.field
    K2 = file_target
    if args.target:
        K2 = parse_field_name(args.target)
    if K2 is None:
        K2 = K
    if not pairs:
        raise FileFormatError("map file has no pairs")
    m1 = len(pairs[0][1])
    images = {}
    for s, d in pairs:
        if len(d) != m1:
            raise FileFormatError("target coordinate rows are ragged")
        sv = linalg.normalize_vec(K, s)
        dv = linalg.normalize_vec(K2, d)
        if sv is None or dv is None:
            raise FileFormatError(f"zero vector in pair {s} -> {d}")
        idx = G.point_index(sv)
        if idx is None:
            raise FileFormatError(f"source point {list(s)} is not in the geometry")
        if images.setdefault(idx, dv) != dv:
            raise FileFormatError(f"source point {list(s)} mapped twice inconsistently")
    return G, K2, m1 - 1, images


def cmd_reconstruct(args, t0):
    G, K2, target_dim, images = _instance_from_files(args)
    try:
        if args.kind == "pg":
            P = pg_of(G)
            if G is not P:
                raise FileFormatError("kind pg expects the full projective space")
            point_map = tuple(images.get(i) for i in range(P.n_points))
            phi = reconstruct_ftpg(PartialPointMap(P, K2, target_dim, point_map))
            cert = {
                "base_points": [],
                "verified_points": P.n_points,
                "sigma_power": phi.sigma.frobenius_power,
                "scalar_normalization": 1,
            }
            result = ReconstructionResult(phi, phi.kernel(), (), cert)
        else:
            missing = [i for i in range(G.n_points) if i not in images]
            if missing:
                raise FileFormatError(f"map file leaves {len(missing)} points unmapped")
            kind_name = {
                "lp": "locally-projective",
                "ap": "affino-projective",
                "lap": "locally-affino-projective",
            }[args.kind]
            inst = MorphismInstance(
                G, K2, target_dim, tuple(images[i] for i in range(G.n_points)), kind_name
            )
            driver = {
                "lp": reconstruct_locally_projective,
                "ap": reconstruct_affino_projective,
                "lap": reconstruct_locally_affino,
            }[args.kind]
            result = driver(inst)
    except FingeoError as exc:
        if isinstance(exc, (CapExceeded, ExhaustionLimit)):
            raise
        payload = {"reconstruction": None, "failure": type(exc).__name__, "detail": str(exc)}
        _report(args, {"geometry": args.geometry, "map": args.map}, payload, t0)
        return 1
    out = serialize.result_to_dict(result)
    if args.out:
        serialize.dump_json(out, args.out)
    _report(args, {"geometry": args.geometry, "map": args.map}, {"reconstruction": out}, t0)
    return 0


def cmd_oracle(args, t0):
    G, K2, target_dim, images = _instance_from_files(args)
    missing = [i for i in range(G.n_points) if i not in images]
    if missing:
        raise FileFormatError(f"map file leaves {len(missing)} points unmapped")
    inst = MorphismInstance(G, K2, target_dim, tuple(images[i] for i in range(G.n_points)))
    maps = brute_force_oracle(inst, cap=args.limit or 1 << 24)
    payload = {
        "matches": [serialize.semilinear_to_dict(phi) for phi in maps],
        "count": len(maps),
    }
    _report(args, {"geometry": args.geometry, "map": args.map}, payload, t0)
    return 0 if maps else 1


def build_parser():
    p = argparse.ArgumentParser(prog="fingeo", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--limit", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--witnesses", action="store_true")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("make-example", help="construct a gallery geometry")
    sp.add_argument("--name", required=True, choices=EXAMPLE_NAMES)
    sp.add_argument("--field", required=True)
    sp.add_argument("--dim", type=int, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_make_example, needs_out=True)

    sp = sub.add_parser("check", help="geometry or projective axioms")
    sp.add_argument("--axioms", choices=("g", "p"), required=True)
    sp.add_argument("--geometry", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("classify", help="classification predicates")
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--ambient", default=None)
    sp.add_argument("--predicate", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("quotient", help="quotient by a flat")
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--flat", default="")
    common(sp)
    sp.set_defaults(fn=cmd_quotient)

    sp = sub.add_parser("reconstruct", help="recover the inducing semilinear map")
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--map", required=True)
    sp.add_argument("--kind", choices=("pg", "lp", "ap", "lap"), required=True)
    sp.add_argument("--target", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_reconstruct)

    sp = sub.add_parser("oracle", help="exhaustive semilinear map search")
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--map", required=True)
    sp.add_argument("--target", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_oracle)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.echo = ["fingeo"] + argv
    if getattr(args, "needs_out", False) and not args.out:
        parser.error("--out is required for make-example")
    t0 = time.time()
    try:
        return args.fn(args, t0)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CapExceeded, ExhaustionLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SizeLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
