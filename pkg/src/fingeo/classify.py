"""Classification predicates for subgeometries of a projective space:
enough points, locally projective (by quotients and by the local dimension
formula), the ambient line condition, point/line/plane axioms, the bundle
condition, affino-projective and locally affino-projective certificates,
Moebius and ovoid recognition, and minimal-embedding verification.

Every negative verdict carries a witness that can be re-checked in
isolation; every certificate (hyperplane H, tangent hyperplanes H_x) is
reported explicitly.  Predicates over the ambient space expect an embedded
CoordGeometry (X.ambient is its projective space).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import linalg
from .errors import DimensionTooLow, InternalContradiction
from .geometry import CoordGeometry, Flat, bits_of, mask_of, quotient, subgeometry
from .projective import check_projective_axioms, pg_of

BUNDLE_LIMIT = 10**8
BUNDLE_SEED = 0xB1D
BUNDLE_SAMPLES = 20000


@dataclass
class Verdict:
    """One predicate outcome with witnesses / certificates."""

    name: str
    verdict: object  # True / False / "not applicable"
    witnesses: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    method: str = "exhaustive"
    seed: object = None

    def __bool__(self):
        return self.verdict is True

    def as_dict(self, include_witnesses=True):
        d = {"verdict": self.verdict, "method": self.method}
        if self.seed is not None:
            d["seed"] = self.seed
        if self.certificates:
            d["certificates"] = self.certificates
        if include_witnesses and self.witnesses:
            d["witnesses"] = self.witnesses
        return d


@dataclass
class ClassificationReport:
    geometry: str
    verdicts: dict

    def as_dict(self, include_witnesses=True):
        return {
            "geometry": self.geometry,
            "predicates": {k: v.as_dict(include_witnesses) for k, v in self.verdicts.items()},
        }


def _ambient_of(X: CoordGeometry):
    P = pg_of(X)
    if P is X:
        return P, tuple(range(X.n_points))
    return P, X.ambient_indices


def ambient_point_mask(X: CoordGeometry) -> int:
    P, idx = _ambient_of(X)
    return mask_of(idx)


# -- enough points ---------------------------------------------------------------


def _has_quadrilateral(G, plane_mask):
    """Four points of the plane, no three collinear."""
    pts = list(bits_of(plane_mask))
    for quad in itertools.combinations(pts, 4):
        ok = True
        for tri in itertools.combinations(quad, 3):
            line = G.line_through_pair(tri[0], tri[1])
            if line >> tri[2] & 1:
                ok = False
                break
        if ok:
            return quad
    return None


def _cached(X, key, fn):
    got = X._predicate_cache.get(key)
    if got is None:
        got = fn()
        X._predicate_cache[key] = got
    return got


def has_enough_points(X) -> Verdict:
    """Every plane of X contains a quadrilateral.

    The quotient-line reformulation (all lines of X/x have >= 3 points) is
    computed as a cross-check; it can be strictly stronger on geometries with
    two-point quotient lines (ruled quadrics), so only the sound implication
    quotient-form => plane-form is asserted.
    """
    if X.dim() < 2:
        raise DimensionTooLow(f"dim {X.dim()} < 2")
    return _cached(X, "enough_points", lambda: _has_enough_points(X))


def _has_enough_points(X) -> Verdict:
    verdict = True
    witnesses = []
    for pm in X.planes():
        if _has_quadrilateral(X, pm) is None:
            verdict = False
            witnesses.append({"plane": sorted(bits_of(pm))})
    quotient_form = True
    for x in range(X.n_points):
        Q = X.point_quotient(x)
        for line in Q.lines():
            if line.bit_count() < 3:
                quotient_form = False
                break
        if not quotient_form:
            break
    if quotient_form and not verdict:
        raise InternalContradiction("quotient-line form passed but a plane lacks a quadrilateral")
    out = Verdict("enough_points", verdict, witnesses)
    out.certificates["quotient_line_form"] = quotient_form
    return out


# -- locally projective ------------------------------------------------------------


def _local_dim_formula_at(X, x):
    """Dimension formula for all flat pairs through the point x."""
    through = [m for m in X.flats() if m >> x & 1]
    dims = {m: X.flat_dim(m) for m in through}
    coord = isinstance(X, CoordGeometry)
    for i, m1 in enumerate(through):
        for m2 in through[i:]:
            inter = m1 & m2
            d_meet = X.flat_dim(inter)
            if coord:
                d_join = (
                    linalg.rank(X.field, X.flat_rows(m1)[0] + X.flat_rows(m2)[0]) - 1
                )
            else:
                d_join = X.flat_dim(X.closure_mask(m1 | m2))
            if dims[m1] + dims[m2] != d_join + d_meet:
                return {"s1": sorted(bits_of(m1)), "s2": sorted(bits_of(m2))}
    return None


def is_locally_projective(X) -> Verdict:
    """X/x is a projective space for every x; checked both by running the
    projective axiom suite on each quotient and, independently, through the
    local dimension formula at each point.  The two routes must agree."""
    return _cached(X, "locally_projective", lambda: _is_locally_projective(X))


def _is_locally_projective(X) -> Verdict:
    witnesses = []
    verdict = True
    for x in range(X.n_points):
        Q = X.point_quotient(x)
        via_quotient = Q.n_points == 0 or check_projective_axioms(Q).is_projective
        w = _local_dim_formula_at(X, x)
        via_formula = w is None
        if via_quotient != via_formula:
            raise InternalContradiction(
                f"quotient projectivity and local dimension formula disagree at {x}"
            )
        if not via_quotient:
            verdict = False
            witnesses.append({"point": x, "dim_formula_witness": w})
    return Verdict("locally_projective", verdict, witnesses)


def check_line_condition(X: CoordGeometry) -> Verdict:
    """Every ambient line misses X or meets it at least twice.  A positive
    verdict forces local projectivity, which is asserted."""
    P, idx = _ambient_of(X)
    xmask = mask_of(idx)
    witnesses = []
    for line in P.lines():
        hit = (line & xmask).bit_count()
        if hit == 1:
            witnesses.append({"line": sorted(bits_of(line))})
    verdict = not witnesses
    if verdict and not is_locally_projective(X):
        raise InternalContradiction("line condition holds but X is not locally projective")
    return Verdict("line_condition", verdict, witnesses)


# -- point/line/plane axioms --------------------------------------------------------


def check_lp_axioms(X) -> Verdict:
    """Incidence axioms on X's points, lines and planes: unique joining
    line/plane, lines inside planes, and the plane-intersection axiom; on
    three-dimensional geometries also the two-plane form and the existence
    of four non-coplanar points."""
    lines = X.lines()
    planes = X.planes()
    n = X.n_points
    results = {}
    witnesses = []

    line_of = {}
    ok = True
    for m in lines:
        for a, b in itertools.combinations(bits_of(m), 2):
            if (a, b) in line_of:
                ok = False
                witnesses.append({"axiom": "lp1", "points": [a, b]})
            line_of[(a, b)] = m
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) not in line_of:
            ok = False
            witnesses.append({"axiom": "lp1", "points": [a, b]})
    results["lp1"] = ok and all(m.bit_count() >= 2 for m in lines)

    plane_of = {}
    ok = True
    for m in planes:
        found3 = False
        for tri in itertools.combinations(bits_of(m), 3):
            la = line_of.get((tri[0], tri[1]))
            if la is not None and not la >> tri[2] & 1:
                found3 = True
                key = tri
                if key in plane_of and plane_of[key] != m:
                    ok = False
                    witnesses.append({"axiom": "lp2", "points": list(tri)})
                plane_of[key] = m
        if not found3:
            ok = False
            witnesses.append({"axiom": "lp2", "plane": sorted(bits_of(m))})
    plane_set = set(planes)
    for tri in itertools.combinations(range(n), 3):
        la = line_of.get((tri[0], tri[1]))
        if la is None or la >> tri[2] & 1:
            continue
        pm = X.closure_mask(mask_of(tri))
        if pm not in plane_set:
            ok = False
            witnesses.append({"axiom": "lp2", "points": list(tri)})
    results["lp2"] = ok

    ok = True
    for m in planes:
        for a, b in itertools.combinations(bits_of(m), 2):
            la = line_of.get((a, b))
            if la is not None and la & ~m:
                ok = False
                witnesses.append({"axiom": "lp3", "plane": sorted(bits_of(m)), "points": [a, b]})
    results["lp3"] = ok

    # plane pairs through an outside point: (L1 v x) & (L2 v x) is a line
    ok = True
    for pm in planes:
        plane_lines = [m for m in lines if m & ~pm == 0]
        outside = list(bits_of(X.full_mask & ~pm))
        for l1, l2 in itertools.combinations(plane_lines, 2):
            for x in outside:
                j1 = X.closure_mask(l1 | (1 << x))
                j2 = X.closure_mask(l2 | (1 << x))
                inter = j1 & j2
                if X.flat_dim(inter) != 1:
                    ok = False
                    witnesses.append(
                        {
                            "axiom": "lp4",
                            "lines": [sorted(bits_of(l1)), sorted(bits_of(l2))],
                            "point": x,
                        }
                    )
                    break
            if not ok:
                break
        if not ok:
            break
    results["lp4"] = ok

    if X.dim() == 3:
        ok = True
        for m1, m2 in itertools.combinations(planes, 2):
            inter = m1 & m2
            if inter and X.flat_dim(inter) != 1:
                ok = False
                witnesses.append(
                    {"axiom": "lp4prime", "planes": [sorted(bits_of(m1)), sorted(bits_of(m2))]}
                )
        results["lp4prime"] = ok
        found = False
        for quad in itertools.combinations(range(n), 4):
            if X.flat_dim(X.closure_mask(mask_of(quad))) == 3:
                found = True
                break
        results["lp5"] = found
        if not found:
            witnesses.append({"axiom": "lp5"})

    verdict = all(results.values())
    out = Verdict("lp_axioms", verdict, witnesses)
    out.certificates = results
    return out


# -- bundle condition ----------------------------------------------------------------


def check_bundle_theorem(X, limit=BUNDLE_LIMIT, seed=BUNDLE_SEED) -> Verdict:
    """Among four lines with no three in a common plane, five coplanar pairs
    force the sixth.  Exhaustive when line_count^4 <= limit, else seeded
    random sampling (the seed is recorded)."""
    if X.dim() < 3:
        raise DimensionTooLow(f"dim {X.dim()} < 3")
    lines = X.lines()
    nl = len(lines)
    coplanar = {}

    def pair_coplanar(i, j):
        key = (i, j) if i < j else (j, i)
        got = coplanar.get(key)
        if got is None:
            got = X.flat_dim(X.closure_mask(lines[i] | lines[j])) <= 2
            coplanar[key] = got
        return got

    def triple_coplanar(i, j, k):
        return X.flat_dim(X.closure_mask(lines[i] | lines[j] | lines[k])) <= 2

    def check_tuple(tup):
        """Returns (counts_as_instance, failure_witness)."""
        pairs = list(itertools.combinations(tup, 2))
        flags = [pair_coplanar(i, j) for i, j in pairs]
        if sum(flags) != 5:
            return False, None
        for tri in itertools.combinations(tup, 3):
            if all(pair_coplanar(a, b) for a, b in itertools.combinations(tri, 2)):
                if triple_coplanar(*tri):
                    return False, None
        # five of six pairs coplanar and no three lines share a plane
        return True, [sorted(bits_of(lines[i])) for i in tup]

    instances = 0
    witnesses = []
    verdict = True
    concurrent = 0
    if nl**4 <= limit:
        method, used_seed = "exhaustive", None
        tuples = itertools.combinations(range(nl), 4)
    else:
        method, used_seed = "sampled", seed
        rng = random.Random(seed)
        tuples = (tuple(sorted(rng.sample(range(nl), 4))) for _ in range(BUNDLE_SAMPLES))
    for tup in tuples:
        hit, wit = check_tuple(tup)
        if hit:
            instances += 1
            verdict = False
            witnesses.append(wit)
            if len(witnesses) >= 5:
                break
    # count certified bundles (all six pairs coplanar, no three in one plane)
    out = Verdict("bundle_theorem", verdict, witnesses, method=method, seed=used_seed)
    out.certificates["violations"] = instances
    return out


def certified_bundles(X, limit=200000):
    """Concurrency data for complete bundles: 4-tuples of lines, pairwise
    coplanar, no three in a common plane; returns (count, all_concurrent)."""
    lines = X.lines()
    nl = len(lines)
    if nl**4 > limit * 24:
        raise DimensionTooLow("too many lines for exhaustive bundle certification")
    count = 0
    all_conc = True
    for tup in itertools.combinations(range(nl), 4):
        masks = [lines[i] for i in tup]
        if any(
            X.flat_dim(X.closure_mask(m1 | m2)) > 2
            for m1, m2 in itertools.combinations(masks, 2)
        ):
            continue
        if any(
            X.flat_dim(X.closure_mask(a | b | c)) <= 2
            for a, b, c in itertools.combinations(masks, 3)
        ):
            continue
        count += 1
        common = masks[0] & masks[1] & masks[2] & masks[3]
        if not common:
            all_conc = False
    return count, all_conc


# -- affino-projective family ----------------------------------------------------------


def is_affino_projective(X: CoordGeometry) -> Verdict:
    """Some ambient hyperplane H with X u H = P; hyperplanes scanned in
    canonical order, first certificate returned, count reported."""
    P, idx = _ambient_of(X)
    xmask = mask_of(idx)
    first = None
    count = 0
    for hm in P.hyperplanes():
        if (xmask | hm) == P.full_mask:
            count += 1
            if first is None:
                first = hm
    out = Verdict("affino_projective", first is not None)
    out.certificates["certificate_count"] = count
    if first is not None:
        out.certificates["hyperplane"] = sorted(bits_of(first))
        out.certificates["hyperplane_mask"] = first
    return out


def _lap_at_point(X, P, xmask, amb_x):
    """Hyperplanes H through amb_x such that every ambient line through amb_x
    meets X twice or lies inside H."""
    must_cover = 0
    for line in P.lines_through(amb_x):
        if (line & xmask).bit_count() < 2:
            must_cover |= line
    certs = [
        hm for hm in P.hyperplanes() if hm >> amb_x & 1 and must_cover & ~hm == 0
    ]
    return certs


def is_locally_affino_projective(X: CoordGeometry) -> Verdict:
    """For each point x a hyperplane H_x through x absorbing all tangent
    lines; cross-checked by testing X/x affino-projective inside P/x."""
    P, idx = _ambient_of(X)
    xmask = mask_of(idx)
    witnesses = []
    tangent_hyperplanes = {}
    verdict = True
    for local_x, amb_x in enumerate(idx):
        certs = _lap_at_point(X, P, xmask, amb_x)
        via_lines = bool(certs)
        via_quotient = _quotient_affino(X, P, xmask, local_x, amb_x)
        if via_lines != via_quotient:
            raise InternalContradiction(f"two affino routes disagree at point {local_x}")
        if via_lines:
            tangent_hyperplanes[local_x] = sorted(bits_of(certs[0]))
        else:
            verdict = False
            witnesses.append({"point": local_x})
    out = Verdict("locally_affino_projective", verdict, witnesses)
    if verdict:
        out.certificates["tangent_hyperplanes"] = tangent_hyperplanes
    return out


def _quotient_affino(X, P, xmask, local_x, amb_x):
    """X/x affino-projective inside P/x: some hyperplane class-set of P/x
    covers the classes without an X representative."""
    Q = P.point_quotient(amb_x)
    covered = set()
    for c, cmask in enumerate(Q.classes):
        if cmask & xmask:
            covered.add(c)
    missing = [c for c in range(Q.n_points) if c not in covered]
    if not missing:
        return True
    for hm in P.hyperplanes():
        if not hm >> amb_x & 1:
            continue
        hclasses = {Q.class_of_parent_point(y) for y in bits_of(hm & ~(1 << amb_x))}
        if all(c in hclasses for c in missing):
            return True
    return False


def is_mobius(X: CoordGeometry) -> Verdict:
    """At each point the union of the ambient tangent lines is exactly a
    hyperplane."""
    P, idx = _ambient_of(X)
    if P.dim() < 3:
        raise DimensionTooLow("ambient dimension < 3")
    if X.n_points <= 2:
        return Verdict("mobius", "not applicable")
    xmask = mask_of(idx)
    hyper = set(P.hyperplanes())
    witnesses = []
    tangent_planes = {}
    verdict = True
    for local_x, amb_x in enumerate(idx):
        union = 0
        for line in P.lines_through(amb_x):
            if line & xmask == 1 << amb_x:
                union |= line
        if union in hyper:
            tangent_planes[local_x] = sorted(bits_of(union))
        else:
            verdict = False
            witnesses.append({"point": local_x, "tangent_union_size": union.bit_count()})
    out = Verdict("mobius", verdict, witnesses)
    if verdict:
        out.certificates["tangent_hyperplanes"] = tangent_planes
    return out


def is_ovoid(X: CoordGeometry) -> Verdict:
    """Moebius, with every ambient line meeting X in at most two points."""
    P, idx = _ambient_of(X)
    if P.dim() < 3:
        raise DimensionTooLow("ambient dimension < 3")
    if X.n_points <= 2:
        return Verdict("ovoid", "not applicable")
    mob = is_mobius(X)
    xmask = mask_of(idx)
    witnesses = list(mob.witnesses)
    verdict = bool(mob)
    for line in P.lines():
        if (line & xmask).bit_count() > 2:
            verdict = False
            witnesses.append({"long_secant": sorted(bits_of(line))})
            break
    return Verdict("ovoid", verdict, witnesses)


def check_minimal_embedding(X: CoordGeometry) -> Verdict:
    """X/x = P/x for every x: each ambient line through x meets X again."""
    P, idx = _ambient_of(X)
    xmask = mask_of(idx)
    witnesses = []
    verdict = True
    for local_x, amb_x in enumerate(idx):
        for line in P.lines_through(amb_x):
            if (line & xmask).bit_count() < 2:
                verdict = False
                witnesses.append({"point": local_x, "tangent_line": sorted(bits_of(line))})
                break
    return Verdict("minimal_embedding", verdict, witnesses)


def full_quotient_points(X: CoordGeometry):
    """Local indices x with X/x = P/x (every ambient line through x is a
    secant); the admissible base points of the locally projective driver."""
    P, idx = _ambient_of(X)
    xmask = mask_of(idx)
    out = []
    for local_x, amb_x in enumerate(idx):
        if all((line & xmask).bit_count() >= 2 for line in P.lines_through(amb_x)):
            out.append(local_x)
    return tuple(out)


# -- aggregate -----------------------------------------------------------------------


ALL_PREDICATES = (
    "enough_points",
    "locally_projective",
    "line_condition",
    "lp_axioms",
    "bundle_theorem",
    "affino_projective",
    "locally_affino_projective",
    "mobius",
    "ovoid",
    "minimal_embedding",
)


def classify(X: CoordGeometry, predicates=None, limit=BUNDLE_LIMIT, seed=BUNDLE_SEED) -> ClassificationReport:
    """Run the requested predicates (all by default) and assemble a report."""
    wanted = tuple(predicates) if predicates else ALL_PREDICATES
    fns = {
        "enough_points": lambda: has_enough_points(X),
        "locally_projective": lambda: is_locally_projective(X),
        "line_condition": lambda: check_line_condition(X),
        "lp_axioms": lambda: check_lp_axioms(X),
        "bundle_theorem": lambda: check_bundle_theorem(X, limit=limit, seed=seed),
        "affino_projective": lambda: is_affino_projective(X),
        "locally_affino_projective": lambda: is_locally_affino_projective(X),
        "mobius": lambda: is_mobius(X),
        "ovoid": lambda: is_ovoid(X),
        "minimal_embedding": lambda: check_minimal_embedding(X),
    }
    verdicts = {}
    for name in wanted:
        try:
            verdicts[name] = fns[name]()
        except DimensionTooLow as exc:
            verdicts[name] = Verdict(name, "not applicable", [{"reason": str(exc)}])
    return ClassificationReport(X.label(), verdicts)
