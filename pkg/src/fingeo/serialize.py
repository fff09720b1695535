"""JSON file formats: geometries (embedded and abstract), semilinear maps,
point-pair map files, and reconstruction results.

Embedded geometry:   {"field": "gf(q)", "ambient_dim": n, "points": [[c0..cn], ...]}
Abstract geometry:   {"points": N, "flats": [[indices], ...]}
Semilinear map:      {"sigma": {"power": i}, "matrix": [[..]],
                      "source": "gf(q)", "target": "gf(q')"}
Map file:            {"pairs": [[[src coords], [dst coords]], ...]}

Coordinates are canonical integer encodings of field elements.  Loaders
normalize and sort embedded points into the ambient canonical order so that
re-serialization is stable.
"""

from __future__ import annotations

import json

from . import linalg
from .errors import FileFormatError
from .geometry import CoordGeometry, TableGeometry, subgeometry
from .gf import GF, gf, hom_from_power, parse_field_name
from .projective import SemilinearMap, build_pg


def _fail(msg):
    raise FileFormatError(msg)


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"{path}: {exc}")


def dump_json(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=1)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


# -- geometries -----------------------------------------------------------------


def geometry_to_dict(G) -> dict:
    if isinstance(G, CoordGeometry):
        return {
            "field": G.field.name,
            "ambient_dim": G.ncoords - 1,
            "points": [list(v) for v in G.vectors],
        }
    if isinstance(G, TableGeometry):
        return {
            "points": G.n_points,
            "flats": [sorted_bits(m) for m in G.raw_table],
        }
    _fail(f"cannot serialize {type(G).__name__}")


def sorted_bits(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def geometry_from_dict(data) -> object:
    if not isinstance(data, dict):
        _fail("geometry file must hold a JSON object")
    if "field" in data:
        try:
            K = parse_field_name(data["field"])
            n = int(data["ambient_dim"])
            raw_points = data["points"]
        except (KeyError, ValueError, TypeError) as exc:
            _fail(f"bad embedded geometry: {exc}")
        P = build_pg(n, K.q)
        indices = set()
        for row in raw_points:
            if not isinstance(row, list) or len(row) != n + 1:
                _fail(f"point {row!r} is not a coordinate row of length {n + 1}")
            if not all(isinstance(c, int) and 0 <= c < K.q for c in row):
                _fail(f"point {row!r} has coordinates outside gf({K.q})")
            v = linalg.normalize_vec(K, tuple(row))
            if v is None:
                _fail(f"point {row!r} is the zero vector")
            indices.add(P.point_index(v))
        if len(indices) == P.n_points:
            return P
        return subgeometry(P, sorted(indices))
    if "flats" in data:
        try:
            n = int(data["points"])
            flats = data["flats"]
        except (KeyError, ValueError, TypeError) as exc:
            _fail(f"bad abstract geometry: {exc}")
        masks = []
        for f in flats:
            if not all(isinstance(i, int) and 0 <= i < n for i in f):
                _fail(f"flat {f!r} has indices outside 0..{n - 1}")
            m = 0
            for i in f:
                m |= 1 << i
            masks.append(m)
        return TableGeometry(n, masks)
    _fail("geometry file needs either a 'field' or a 'flats' key")


def save_geometry(G, path):
    dump_json(geometry_to_dict(G), path)


def load_geometry(path):
    return geometry_from_dict(load_json(path))


# -- semilinear maps -------------------------------------------------------------


def semilinear_to_dict(phi: SemilinearMap) -> dict:
    return {
        "sigma": {"power": phi.sigma.frobenius_power},
        "matrix": [list(r) for r in phi.matrix],
        "source": phi.source_field.name,
        "target": phi.target_field.name,
    }


def semilinear_from_dict(data) -> SemilinearMap:
    try:
        K = parse_field_name(data["source"])
        K2 = parse_field_name(data["target"])
        power = int(data["sigma"]["power"])
        rows = data["matrix"]
    except (KeyError, ValueError, TypeError) as exc:
        _fail(f"bad semilinear map file: {exc}")
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        _fail("matrix rows are ragged")
    for r in rows:
        if not all(isinstance(c, int) and 0 <= c < K2.q for c in r):
            _fail(f"matrix row {r!r} has entries outside gf({K2.q})")
    sigma = hom_from_power(K, K2, power)
    return SemilinearMap(sigma, tuple(tuple(r) for r in rows))


def save_semilinear(phi, path):
    dump_json(semilinear_to_dict(phi), path)


def load_semilinear(path):
    return semilinear_from_dict(load_json(path))


# -- point-map files ----------------------------------------------------------------


def map_pairs_to_dict(pairs, target: GF | None = None) -> dict:
    out = {"pairs": [[list(s), list(d)] for s, d in pairs]}
    if target is not None:
        out["target"] = target.name
    return out


def map_pairs_from_dict(data):
    """Returns (pairs, target_field_or_None)."""
    try:
        pairs = [(tuple(s), tuple(d)) for s, d in data["pairs"]]
    except (KeyError, ValueError, TypeError) as exc:
        _fail(f"bad map file: {exc}")
    target = None
    if "target" in data:
        target = parse_field_name(data["target"])
    return pairs, target


def save_map_pairs(pairs, path, target=None):
    dump_json(map_pairs_to_dict(pairs, target), path)


def load_map_pairs(path):
    return map_pairs_from_dict(load_json(path))


def result_to_dict(result) -> dict:
    out = semilinear_to_dict(result.phi)
    out["exceptional"] = [list(r) for r in result.exceptional.rows]
    out["certificate"] = dict(result.certificate)
    out["certificate"]["base_points"] = [list(map(int, b)) for b in result.certificate["base_points"]]
    return out
