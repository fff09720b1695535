"""Coordinatized projective spaces PG(n, q), semilinear maps and the partial
projective morphisms they induce, plus the quotient-space coordinate
isomorphism used throughout reconstruction.

Convention: a semilinear map acts as Phi(v) = M . v^sigma (apply the field
homomorphism coordinatewise, then the matrix).  This keeps kernels
K-subspaces and makes composition associative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .errors import InternalContradiction, NotProjective, SizeLimit, ZeroMap
from .geometry import (
    CoordGeometry,
    FiniteGeometry,
    Flat,
    PartialMorphism,
    bits_of,
    mask_of,
    quotient,
)
from .gf import GF, FieldHom, gf, identity_hom

PG_MAX_POINTS = 6000


@dataclass(frozen=True)
class ProjPoint:
    """A projective point as its normalized homogeneous coordinates."""

    field: GF
    coords: tuple

    @staticmethod
    def make(field: GF, coords) -> "ProjPoint":
        v = linalg.normalize_vec(field, tuple(coords))
        if v is None:
            raise ValueError("projective point needs a nonzero vector")
        return ProjPoint(field, v)

    def __repr__(self):
        return f"P{self.coords}"


@dataclass(frozen=True)
class LinearSubspace:
    """A vector subspace of K^(ambient_dim) as its reduced-echelon basis."""

    field: GF
    ambient_dim: int
    rows: tuple

    @staticmethod
    def from_vectors(field: GF, ambient_dim: int, vectors) -> "LinearSubspace":
        rows, _ = linalg.rref(field, list(vectors))
        return LinearSubspace(field, ambient_dim, rows)

    @staticmethod
    def zero(field: GF, ambient_dim: int) -> "LinearSubspace":
        return LinearSubspace(field, ambient_dim, ())

    @property
    def rank(self):
        return len(self.rows)

    @property
    def proj_dim(self):
        return self.rank - 1

    @property
    def pivots(self):
        return tuple(next(i for i, c in enumerate(r) if c) for r in self.rows)

    def contains(self, v):
        return linalg.in_span(self.field, self.rows, self.pivots, v)

    def proj_points(self):
        return [ProjPoint(self.field, v) for v in linalg.span_points(self.field, self.rows)]

    def __repr__(self):
        return f"subspace(rank {self.rank} of K^{self.ambient_dim})"


@dataclass(frozen=True)
class SemilinearMap:
    """sigma: K -> K' together with an (m+1) x (n+1) matrix over K'."""

    sigma: FieldHom
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))

    @property
    def source_field(self):
        return self.sigma.source

    @property
    def target_field(self):
        return self.sigma.target

    @property
    def n_in(self):
        return len(self.matrix[0])

    @property
    def n_out(self):
        return len(self.matrix)

    def apply_vec(self, v):
        return linalg.matvec(self.target_field, self.matrix, self.sigma.map_vec(v))

    def is_zero(self):
        return all(not any(r) for r in self.matrix)

    def rank(self):
        return linalg.rank(self.target_field, self.matrix)

    def scaled(self, c):
        return SemilinearMap(self.sigma, linalg.mat_scale(self.target_field, c, self.matrix))

    def canonical(self):
        """Scale so the first nonzero entry in row-major order is 1."""
        for row in self.matrix:
            for cval in row:
                if cval:
                    if cval == 1:
                        return self
                    return self.scaled(self.target_field.inv(cval))
        return self

    def compose(self, inner: "SemilinearMap") -> "SemilinearMap":
        """self after inner: matrix = M_self . (M_inner)^sigma_self."""
        if inner.target_field is not self.source_field:
            raise ValueError("fields do not chain")
        twisted = self.sigma.map_matrix(inner.matrix)
        return SemilinearMap(
            self.sigma.compose(inner.sigma),
            linalg.mat_mul(self.target_field, self.matrix, twisted),
        )

    def kernel(self) -> LinearSubspace:
        """{v in K^(n+1) : M v^sigma = 0} as a K-subspace."""
        K, K2 = self.source_field, self.target_field
        kb = linalg.kernel_basis(K2, self.matrix)
        if self.sigma.is_bijective():
            inv = self.sigma.inverse()
            rows, _ = linalg.rref(K, [inv.map_vec(r) for r in kb])
            return LinearSubspace(K, self.n_in, rows)
        if K.q**self.n_in > 1 << 20:
            raise SizeLimit("kernel enumeration too large")
        piv = tuple(next(i for i, c in enumerate(r) if c) for r in kb)
        vecs = [
            v
            for v in linalg.all_vectors(K, self.n_in)
            if linalg.in_span(K2, kb, piv, self.sigma.map_vec(v))
        ]
        rows, _ = linalg.rref(K, vecs)
        return LinearSubspace(K, self.n_in, rows)

    def __repr__(self):
        return f"semilinear({self.sigma}, {self.n_out}x{self.n_in})"


@dataclass(frozen=True)
class ProjPartialMap:
    """The projectivization of a semilinear map; undefined exactly on the
    projectivized kernel."""

    underlying: SemilinearMap
    exceptional: LinearSubspace

    @property
    def source_dim(self):
        return self.underlying.n_in - 1

    @property
    def target_dim(self):
        return self.underlying.n_out - 1

    def apply(self, x: ProjPoint):
        w = self.underlying.apply_vec(x.coords)
        v = linalg.normalize_vec(self.underlying.target_field, w)
        return None if v is None else ProjPoint(self.underlying.target_field, v)


# -- projective spaces ---------------------------------------------------------


@lru_cache(maxsize=None)
def build_pg(n: int, q: int) -> CoordGeometry:
    """The projective space PG(n, q) as a coordinate geometry; interned."""
    if not 1 <= n <= 5:
        raise SizeLimit(f"projective dimension {n} outside 1..5")
    K = gf(q)
    count = (q ** (n + 1) - 1) // (q - 1)
    if count > PG_MAX_POINTS:
        raise SizeLimit(f"PG({n},{q}) has {count} points; beyond desk scale")
    pts = linalg.all_proj_points(K, n + 1)
    return CoordGeometry(K, pts, is_full_pg=True, name=f"pg({n},{q})")


def pg_of(G: CoordGeometry) -> CoordGeometry:
    """The ambient projective space of an embedded geometry."""
    return G if G.ambient is None else G.ambient


@dataclass
class ProjectiveReport:
    p1: bool
    p2: bool
    p3: bool
    dim_formula: bool
    irreducible: bool
    witnesses: dict
    note: str = ""

    @property
    def is_projective(self):
        return self.p1 and self.p2 and self.p3 and self.dim_formula

    def as_dict(self):
        return {
            "p1": self.p1,
            "p2": self.p2,
            "p3": self.p3,
            "dimension_formula": self.dim_formula,
            "irreducible": self.irreducible,
            "is_projective": self.is_projective,
            "witnesses": self.witnesses,
            "note": self.note,
        }


def check_projective_axioms(G: FiniteGeometry, pair_limit=2_000_000) -> ProjectiveReport:
    """Point/line/triangle axioms plus the dimension formula on all flat pairs.

    The triangle (Veblen-Young) sweep runs literally on small universes.  When
    the two-points-one-line axiom holds, the sweep is equivalently organised
    per pair of concurrent lines: every two lines that each meet both legs off
    the crossing point must themselves meet; that form is exhaustive and far
    cheaper on the larger spaces.
    """
    witnesses = {}
    lines = G.lines()
    n = G.n_points

    # P1
    p1 = True
    pair_count = {}
    for line in lines:
        pts = list(bits_of(line))
        for a, b in itertools.combinations(pts, 2):
            pair_count[(a, b)] = pair_count.get((a, b), 0) + 1
    for a, b in itertools.combinations(range(n), 2):
        c = pair_count.get((a, b), 0)
        if c != 1:
            p1 = False
            witnesses["p1"] = {"points": [a, b], "lines_through": c}
            break

    # P2
    p2 = all(line.bit_count() >= 2 for line in lines)
    if not p2:
        witnesses["p2"] = {"short_line": sorted(bits_of(min(lines, key=int.bit_count)))}

    # P3
    if p1 and n > 16:
        p3, w = _veblen_young_fast(G, lines)
    else:
        p3, w = _veblen_young_literal(G, lines)
    if not p3:
        witnesses["p3"] = w

    # dimension formula over all flat pairs; on a coordinate backend the join
    # dimension is the rank of the stacked span bases, the meet is a cached
    # flat (intersections of flats are flats whenever G2 holds)
    dim_ok = True
    empty_meet_only = True
    flats = G.flats()
    dims = {m: G.flat_dim(m) for m in flats}
    coord = isinstance(G, CoordGeometry)
    if coord:
        K = G.field
        rows_of = {m: G.flat_rows(m)[0] for m in flats}
    checked = 0
    for i, m1 in enumerate(flats):
        d1 = dims[m1]
        for m2 in flats[i:]:
            checked += 1
            if checked > pair_limit:
                raise SizeLimit("flat-pair sweep beyond limit")
            inter = m1 & m2
            d_meet = dims.get(inter)
            if d_meet is None:
                d_meet = G.flat_dim(inter)
            if coord:
                d_join = linalg.rank(K, rows_of[m1] + rows_of[m2]) - 1
            else:
                d_join = G.flat_dim(G.closure_mask(m1 | m2))
            if d1 + dims[m2] != d_join + d_meet:
                dim_ok = False
                if inter:
                    empty_meet_only = False
                if "dim_formula" not in witnesses:
                    witnesses["dim_formula"] = {
                        "s1": sorted(bits_of(m1)),
                        "s2": sorted(bits_of(m2)),
                        "lhs": d1 + dims[m2],
                        "rhs": d_join + d_meet,
                    }
    irreducible = all(line.bit_count() >= 3 for line in lines)
    note = ""
    if p1 and p2 and not dim_ok and empty_meet_only:
        # every violation involves a disjoint pair: parallel-type failures only
        note = "not projective, locally projective candidate"
    return ProjectiveReport(p1, p2, p3, dim_ok, irreducible, witnesses, note)


def _veblen_young_literal(G, lines):
    """If a line meets two sides of a triangle off the common vertex, it
    meets the third side; checked over all triangles and lines."""
    n = G.n_points
    line_of = {}
    for m in lines:
        for a, b in itertools.combinations(bits_of(m), 2):
            line_of.setdefault((a, b), m)
    for tri in itertools.combinations(range(n), 3):
        a, b, c = tri
        lab = line_of.get((a, b))
        lbc = line_of.get((b, c))
        lac = line_of.get((a, c))
        if lab is None or lbc is None or lac is None:
            continue
        if lab >> c & 1:
            continue  # degenerate triangle
        for m in lines:
            if m >> b & 1:
                continue
            if m & lab and m & lbc and not m & lac:
                return False, {"triangle": list(tri), "line": sorted(bits_of(m))}
    return True, None


def _veblen_young_fast(G, lines):
    """Equivalent sweep when two points always span one line: for lines L1,
    L2 crossing at b, all the lines joining L1 - b to L2 - b pairwise meet."""
    n = G.n_points
    line_of = {}
    for m in lines:
        for a, c in itertools.combinations(bits_of(m), 2):
            line_of[(a, c)] = m
    lines_through = [G.lines_through(i) for i in range(n)]
    for b in range(n):
        through = lines_through[b]
        bbit = 1 << b
        for i, l1 in enumerate(through):
            pts1 = [x for x in bits_of(l1 & ~bbit)]
            for l2 in through[i + 1 :]:
                pts2 = [x for x in bits_of(l2 & ~bbit)]
                cross = set()
                for a in pts1:
                    for c in pts2:
                        cross.add(line_of[(a, c) if a < c else (c, a)])
                cross = sorted(cross)
                for j, m1 in enumerate(cross):
                    for m2 in cross[j + 1 :]:
                        if not m1 & m2:
                            return False, {
                                "vertex": b,
                                "legs": [sorted(bits_of(l1)), sorted(bits_of(l2))],
                                "lines": [sorted(bits_of(m1)), sorted(bits_of(m2))],
                            }
    return True, None


def decompose_irreducible(G: FiniteGeometry):
    """Partition into irreducible components: points are related when equal
    or joined by a line with at least three points."""
    rep = check_projective_axioms(G)
    if not (rep.p1 and rep.p2 and rep.p3):
        raise NotProjective("geometry fails the projective point/line axioms")
    parent = list(range(G.n_points))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for line in G.lines():
        if line.bit_count() >= 3:
            pts = list(bits_of(line))
            for x in pts[1:]:
                parent[find(x)] = find(pts[0])
    groups = {}
    for i in range(G.n_points):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(v) for v in sorted(groups.values()))


# -- semilinear actions ----------------------------------------------------------


def apply_semilinear(phi: SemilinearMap, x) -> ProjPoint | None:
    """Image point, or None when the vector lies in the kernel."""
    coords = x.coords if isinstance(x, ProjPoint) else tuple(x)
    w = phi.apply_vec(coords)
    v = linalg.normalize_vec(phi.target_field, w)
    return None if v is None else ProjPoint(phi.target_field, v)


def induced_partial(phi: SemilinearMap, check=True):
    """The partial projective morphism of a nonzero semilinear map, as both a
    coordinate-level map and a geometry PartialMorphism between PG spaces."""
    if phi.is_zero():
        raise ZeroMap("the zero map induces no projective morphism")
    ker = phi.kernel()
    pmap = ProjPartialMap(phi, ker)
    src = build_pg(phi.n_in - 1, phi.source_field.q)
    tgt = build_pg(phi.n_out - 1, phi.target_field.q)
    mapping = []
    e_mask = 0
    for i, v in enumerate(src.vectors):
        img = linalg.normalize_vec(phi.target_field, phi.apply_vec(v))
        if img is None:
            e_mask |= 1 << i
            mapping.append(None)
        else:
            mapping.append(tgt.point_index(img))
    pm = PartialMorphism(src, tgt, Flat(src, e_mask), tuple(mapping))
    if check:
        pm.validate()
    return pmap, pm


def proportional(phi1: SemilinearMap, phi2: SemilinearMap):
    """lambda with phi2 = lambda . phi1, or None (requires equal sigma)."""
    if phi1.sigma != phi2.sigma:
        return None
    if phi1.n_in != phi2.n_in or phi1.n_out != phi2.n_out:
        return None
    K2 = phi1.target_field
    lam = None
    for r1, r2 in zip(phi1.matrix, phi2.matrix):
        for a, b in zip(r1, r2):
            if a == 0 and b == 0:
                continue
            if a == 0 or b == 0:
                return None
            cand = K2.div(b, a)
            if lam is None:
                lam = cand
            elif lam != cand:
                return None
    return lam


# -- quotient coordinates ---------------------------------------------------------


@dataclass(frozen=True)
class QuotientCoords:
    """Coordinates for V/W: the echelon complement of W.

    project: V -> K^(n-w) reduces a vector against W's echelon basis and
    reads off the non-pivot coordinates; lift embeds them back on the free
    coordinates.  project . lift = identity, and project kills exactly W.
    """

    field: GF
    dim_v: int
    subspace: LinearSubspace
    proj_matrix: tuple
    lift_matrix: tuple

    @property
    def dim_q(self):
        return self.dim_v - self.subspace.rank

    def project(self, v):
        return linalg.matvec(self.field, self.proj_matrix, v)

    def lift(self, u):
        return linalg.matvec(self.field, self.lift_matrix, u)


def quotient_coords(W: LinearSubspace) -> QuotientCoords:
    K = W.field
    n = W.ambient_dim
    pivots = W.pivots
    free = [j for j in range(n) if j not in pivots]
    proj_rows = []
    for v in (linalg.unit_vec(n, j) for j in range(n)):
        red = linalg.reduce_against(K, W.rows, pivots, v)
        proj_rows.append(tuple(red[j] for j in free))
    proj = tuple(zip(*proj_rows))  # (n-w) x n
    lift = tuple(tuple(1 if j == f else 0 for f in free) for j in range(n))
    return QuotientCoords(K, n, W, proj, lift)


@dataclass
class QuotientIso:
    """Verified isomorphism between PG(V)/P(W) and PG(V/W)."""

    coords: QuotientCoords
    source_pg: CoordGeometry
    quotient_geometry: object
    target_pg: CoordGeometry
    class_to_target: tuple
    projection: PartialMorphism

    def as_point_map(self):
        return {c: t for c, t in enumerate(self.class_to_target)}


def quotient_iso(P: CoordGeometry, W: LinearSubspace, verify=True) -> QuotientIso:
    """The coordinate isomorphism  classes of PG(V) mod P(W)  <->  PG(V/W).

    W = 0 degenerates to the identity re-indexing.  The geometry-level
    bijection is checked to be an isomorphism (flats correspond both ways)
    when verify is set.
    """
    K = P.field
    qc = quotient_coords(W)
    e_mask = mask_of(i for i, v in enumerate(P.vectors) if W.contains(v))
    Q, pi = quotient(P, Flat(P, e_mask))
    if qc.dim_q < 1:
        raise SizeLimit("quotient collapses to a point or nothing")
    tgt = build_pg(qc.dim_q - 1, K.q)
    cls_to_tgt = []
    for rep in Q.reps:
        u = linalg.normalize_vec(K, qc.project(P.vectors[rep]))
        cls_to_tgt.append(tgt.point_index(u))
    iso = QuotientIso(qc, P, Q, tgt, tuple(cls_to_tgt), pi)
    if verify:
        _verify_quotient_iso(iso)
    return iso


def _verify_quotient_iso(iso: QuotientIso):
    Q, tgt = iso.quotient_geometry, iso.target_pg
    mapping = iso.class_to_target
    if len(set(mapping)) != len(mapping) or len(mapping) != tgt.n_points:
        raise InternalContradiction("quotient identification is not bijective")
    fwd = {c: t for c, t in enumerate(mapping)}
    q_flats = {mask_of(fwd[c] for c in bits_of(m)) for m in Q.flats()}
    if q_flats != set(tgt.flats()):
        raise InternalContradiction("quotient flats do not correspond to target flats")
