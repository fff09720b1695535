"""Recovering semilinear maps from geometry morphisms.

The base engine turns a partial morphism between full projective spaces into
the unique-up-to-scalar semilinear map inducing it: fix a frame on a
complement of the exceptional flat, rescale the frame images through the
unit point, read the field homomorphism off a coordinate line, extend
semilinearly, and verify against every point.  The drivers handle embedded
geometries: quotient at two base points, reconstruct each quotient leg
(extending through an affino-projective hyperplane first when needed),
normalize the pair to a common scalar, and glue along the fibred product of
the two quotients.  A final sweep over all of X replaces any case analysis:
either the induced map agrees everywhere or the reconstruction fails loudly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import linalg
from .classify import (
    _lap_at_point,
    full_quotient_points,
    has_enough_points,
    is_affino_projective,
)
from .errors import (
    CapExceeded,
    ExceptionalNotFlat,
    FieldClauseViolated,
    FingeoError,
    ImageInLine,
    ImageInPlane,
    InconsistentExtension,
    InternalContradiction,
    LiftInconsistent,
    NoBasePair,
    NotAffinoProjective,
    NotProportional,
    ReductionsDisagree,
    SigmaNotHomomorphism,
    VerificationFailed,
    ZeroMap,
)
from .geometry import (
    CoordGeometry,
    Flat,
    GeometryMorphism,
    PartialMorphism,
    bits_of,
    check_morphism,
    flat_preimage_condition,
    mask_of,
    subgeometry,
)
from .gf import GF, FieldHom, list_homomorphisms
from .projective import (
    LinearSubspace,
    SemilinearMap,
    build_pg,
    pg_of,
    quotient_coords,
)


class NotEnoughPoints(FingeoError):
    pass


# -- instances ------------------------------------------------------------------


@dataclass(frozen=True)
class PartialPointMap:
    """A point map on a full projective space with coordinate images; None
    marks the undefined (exceptional) locus."""

    source: CoordGeometry
    target_field: GF
    target_dim: int
    images: tuple

    def undefined_mask(self):
        return mask_of(i for i, v in enumerate(self.images) if v is None)


@dataclass(frozen=True)
class MorphismInstance:
    """A total morphism from an embedded geometry X into PG(m, q')."""

    geometry: CoordGeometry
    target_field: GF
    target_dim: int
    images: tuple
    declared_kind: str = "locally-projective"

    @property
    def source_field(self):
        return self.geometry.field

    def image_rank(self):
        return linalg.rank(self.target_field, self.images)

    def validate(self, target_geometry=None):
        """Morphism check against an explicit target PG geometry (built on
        demand when the target is small enough)."""
        tgt = target_geometry
        if tgt is None:
            tgt = build_pg(self.target_dim, self.target_field.q)
        mapping = tuple(tgt.point_index(v) for v in self.images)
        rep = check_morphism(GeometryMorphism(self.geometry, tgt, mapping))
        return rep

    @staticmethod
    def restrict_semilinear(phi: SemilinearMap, X: CoordGeometry, kind="locally-projective"):
        """The fixture builder: restrict the induced map of phi to X."""
        P = pg_of(X)
        idx = X.ambient_indices if X.ambient_indices is not None else range(X.n_points)
        images = []
        for i in idx:
            w = linalg.normalize_vec(phi.target_field, phi.apply_vec(P.vectors[i]))
            if w is None:
                raise ZeroMap("kernel of the generator meets X")
            images.append(w)
        return MorphismInstance(X, phi.target_field, phi.n_out - 1, tuple(images), kind)


@dataclass
class ReconstructionResult:
    phi: SemilinearMap
    exceptional: LinearSubspace
    base_points: tuple
    certificate: dict = field(default_factory=dict)


# -- base engine ------------------------------------------------------------------


def _as_point_map(psi) -> PartialPointMap:
    if isinstance(psi, PartialPointMap):
        return psi
    if isinstance(psi, PartialMorphism):
        src, tgt = psi.source, psi.target
        if not (isinstance(src, CoordGeometry) and src.is_full_pg):
            raise ValueError("source must be a full projective space")
        if not isinstance(tgt, CoordGeometry):
            raise ValueError("target must carry coordinates")
        images = tuple(None if y is None else tgt.vectors[y] for y in psi.map)
        return PartialPointMap(src, tgt.field, tgt.dim(), images)
    raise TypeError(f"cannot interpret {type(psi).__name__} as a partial point map")


def reconstruct_ftpg(psi) -> SemilinearMap:
    """The semilinear map (canonically scaled) inducing a partial morphism
    between full projective spaces whose image is not contained in a line.

    Frame procedure: the undefined set must be a flat E and the map constant
    on its join classes; the coordinate complement of E carries the canonical
    frame (unit vectors plus their sum); frame images are rescaled through
    the unit point; the homomorphism is read off the first frame line and
    verified exhaustively; the semilinear extension is compared against
    every point of the source.
    """
    pm = _as_point_map(psi)
    src = pm.source
    K, K2 = src.field, pm.target_field
    n1 = src.ncoords
    m1 = pm.target_dim + 1

    undef = pm.undefined_mask()
    if src.closure_mask(undef) != undef:
        raise ExceptionalNotFlat("the undefined set is not a flat")

    defined_images = [v for v in pm.images if v is not None]
    img_rows, _ = linalg.rref(K2, defined_images)
    if len(img_rows) < 3:
        raise ImageInLine(f"image spans a rank-{len(img_rows)} subspace")

    if undef:
        seen = {}
        for i, img in enumerate(pm.images):
            if img is None:
                continue
            key = src.closure_mask(undef | (1 << i))
            prev = seen.setdefault(key, img)
            if prev != img:
                raise VerificationFailed(f"map is not constant on the class of point {i}")

    e_rows, e_piv = src.span_rows(undef)
    free = [j for j in range(n1) if j not in e_piv]
    d1 = len(free)
    if d1 < 3:
        raise VerificationFailed("exceptional flat too large for the image span")
    frame_vecs = [linalg.unit_vec(n1, j) for j in free]
    frame_idx = [src.point_index(v) for v in frame_vecs]
    w = [pm.images[i] for i in frame_idx]
    if any(v is None for v in w):
        raise InternalContradiction("frame point maps into the exceptional flat")
    wr, _ = linalg.rref(K2, w)

    def image_of_sum(i, j, lam=1):
        pvec = linalg.vec_add(K, frame_vecs[i], linalg.vec_scale(K, lam, frame_vecs[j]))
        y = pm.images[src.point_index(pvec)]
        if y is None:
            raise VerificationFailed("a frame line meets the exceptional flat")
        return y

    def pair_solve(i, j, y):
        ab = linalg.solve(K2, linalg.transpose((w[i], w[j])), y)
        if ab is None or ab[0] == 0 or ab[1] == 0:
            raise VerificationFailed("image of a frame-line point left the frame plane")
        return ab

    independent = {
        (i, j): linalg.rank(K2, (w[i], w[j])) == 2
        for i in range(d1)
        for j in range(i + 1, d1)
    }

    if len(wr) == d1:
        # independent frame images: rescale through the unit point
        u_vec = frame_vecs[0]
        for fv in frame_vecs[1:]:
            u_vec = linalg.vec_add(K, u_vec, fv)
        z = pm.images[src.point_index(u_vec)]
        if z is None:
            raise VerificationFailed("unit point maps into the exceptional flat")
        alphas = linalg.solve(K2, linalg.transpose(w), z)
        if alphas is None or any(a == 0 for a in alphas):
            raise VerificationFailed("unit image is not in general position")
        vpp = [linalg.vec_scale(K2, a, wi) for a, wi in zip(alphas, w)]
    else:
        # dependent frame images (possible only for a non-surjective sigma,
        # when the full kernel has no rational point): chain relative scales
        # through pairwise sum points; proportional images form classes and
        # every cross-class pair is usable, so the chain connects
        gamma = [None] * d1
        gamma[0] = 1
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for j in range(d1):
                    if gamma[j] is not None:
                        continue
                    key = (i, j) if i < j else (j, i)
                    if not independent[key]:
                        continue
                    a, b = pair_solve(i, j, image_of_sum(i, j))
                    gamma[j] = K2.mul(gamma[i], K2.div(b, a))
                    nxt.append(j)
            frontier = nxt
        if any(g is None for g in gamma):
            raise ImageInLine("frame images are proportional; image lies in a line")
        vpp = [linalg.vec_scale(K2, g, wi) for g, wi in zip(gamma, w)]

    # sigma from the first frame line with independent endpoint images
    si, sj = next((i, j) for (i, j), ind in sorted(independent.items()) if ind)
    pair_cols = linalg.transpose((vpp[si], vpp[sj]))
    table = [0] * K.q
    for lam in range(1, K.q):
        y = image_of_sum(si, sj, lam)
        ab = linalg.solve(K2, pair_cols, y)
        if ab is None or ab[0] == 0:
            raise VerificationFailed("image of a frame-line point left the frame plane")
        table[lam] = K2.div(ab[1], ab[0])
    sigma = FieldHom(K, K2, tuple(table))
    if not sigma.preserves_structure():
        raise SigmaNotHomomorphism(f"extracted table {table} is not a ring homomorphism")

    # matrix: frame coordinates (coefficients on the frame modulo E),
    # sigma-twisted, then the rescaled frame images
    basis_cols = frame_vecs + list(e_rows)
    Binv = linalg.inverse(K, linalg.transpose(basis_cols))
    if Binv is None:
        raise InternalContradiction("frame plus exceptional basis is singular")
    R = Binv[:d1]
    M = linalg.mat_mul(K2, linalg.transpose(vpp), sigma.map_matrix(R))
    phi = SemilinearMap(sigma, M)

    for i, v in enumerate(src.vectors):
        got = linalg.normalize_vec(K2, phi.apply_vec(v))
        want = pm.images[i]
        if got != want:
            raise VerificationFailed(f"reconstruction disagrees at point {i}: {got} vs {want}")
    return phi.canonical()


# -- quotient transport -------------------------------------------------------------


@dataclass
class QuotientLeg:
    """One leg of the two-point pipeline: the map induced on P/x_i carried to
    canonical quotient coordinates."""

    base_index: int
    base_vec: tuple
    base_image: tuple
    qc_source: object  # V -> V/<v_i>
    qc_target: object  # V' -> V'/<v_i'>
    point_map: PartialPointMap


def _ambient_data(inst: MorphismInstance):
    X = inst.geometry
    P = pg_of(X)
    idx = X.ambient_indices if X.ambient_indices is not None else tuple(range(X.n_points))
    return X, P, idx


def _field_clause(K: GF, K2: GF):
    if not (K.q >= 4 or (K.q == 3 and K2.p == 3)):
        raise FieldClauseViolated(
            f"|K| = {K.q} needs |K| >= 4 or |K| = 3 = char K' (char K' = {K2.p})"
        )


def _require_image_not_in_plane(inst: MorphismInstance):
    r = inst.image_rank()
    if r < 4:
        raise ImageInPlane(f"image spans a rank-{r} subspace")


def _require_enough_points(inst: MorphismInstance):
    if not has_enough_points(inst.geometry):
        raise NotEnoughPoints("a plane of X has no quadrilateral")


def _lp_leg(inst: MorphismInstance, xi: int) -> QuotientLeg:
    """Transport of the induced map X/xi -> P'/phi(xi) to PG(n-1, q), valid
    when X/xi fills P/xi."""
    X, P, idx = _ambient_data(inst)
    K, K2 = P.field, inst.target_field
    v_i = P.vectors[idx[xi]]
    v_i_img = inst.images[xi]
    qc = quotient_coords(LinearSubspace.from_vectors(K, P.ncoords, [v_i]))
    qcp = quotient_coords(LinearSubspace.from_vectors(K2, inst.target_dim + 1, [v_i_img]))
    src_q = build_pg(qc.dim_q - 1, K.q)
    images = [None] * src_q.n_points
    touched = [False] * src_q.n_points
    for x, amb in enumerate(idx):
        u = linalg.normalize_vec(K, qc.project(P.vectors[amb]))
        if u is None:
            continue  # x is the base point itself
        t = src_q.point_index(u)
        img = linalg.normalize_vec(K2, qcp.project(inst.images[x]))
        if touched[t]:
            if images[t] != img:
                raise InternalContradiction(f"quotient map ill-defined on class {t}")
        else:
            touched[t] = True
            images[t] = img
    if not all(touched):
        raise NoBasePair(f"X/{xi} does not fill the ambient quotient")
    return QuotientLeg(xi, v_i, v_i_img, qc, qcp, PartialPointMap(src_q, K2, qcp.dim_q - 1, tuple(images)))


def induced_quotient_map(inst: MorphismInstance, x0: int, validate=True) -> PartialMorphism:
    """The geometry-level partial morphism X/x0 -> P'/phi(x0) with
    exceptional flat F/x0, F the fiber of phi(x0)."""
    X, P, idx = _ambient_data(inst)
    K2 = inst.target_field
    tgt = build_pg(inst.target_dim, K2.q)
    x0_img = inst.images[x0]
    Qs = X.point_quotient(x0)
    Qt = tgt.point_quotient(tgt.point_index(x0_img))
    mapping = []
    e_mask = 0
    for c, rep_class in enumerate(Qs.classes):
        member_images = {inst.images[x] for x in bits_of(rep_class)}
        if x0_img in member_images:
            if member_images != {x0_img}:
                raise InternalContradiction(f"class {c} straddles the fiber of the base image")
            e_mask |= 1 << c
            mapping.append(None)
        else:
            target_classes = {
                Qt.class_of_parent_point(tgt.point_index(im)) for im in member_images
            }
            if len(target_classes) != 1:
                raise InternalContradiction(f"class {c} maps into several target classes")
            mapping.append(target_classes.pop())
    pm = PartialMorphism(Qs, Qt, Flat(Qs, Qs.closure_mask(e_mask)), tuple(mapping))
    if pm.exceptional.mask != e_mask:
        raise ExceptionalNotFlat("fiber classes do not form a flat of the quotient")
    if validate:
        pm.validate()
        # image of the quotient map spans at least a plane whenever the
        # original image is not inside a plane
        if inst.image_rank() >= 4:
            reps = [inst.images[(m & -m).bit_length() - 1] for m in Qs.classes]
            qcp = quotient_coords(
                LinearSubspace.from_vectors(K2, inst.target_dim + 1, [x0_img])
            )
            proj = [qcp.project(r) for r in reps if any(qcp.project(r))]
            if linalg.rank(K2, proj) < 3:
                raise InternalContradiction("quotient image collapsed into a line")
    return pm


# -- pair normalization and gluing ----------------------------------------------------


def _global_matrix(K2, leg_or_coords, phi: SemilinearMap):
    """L'_i . A_i . sigma(Q_i): the V -> V' matrix computing a representative
    of the quotient-level image."""
    qc, qcp = leg_or_coords
    inner = linalg.mat_mul(K2, phi.matrix, phi.sigma.map_matrix(qc.proj_matrix))
    return linalg.mat_mul(K2, qcp.lift_matrix, inner)


def _pair_coords(K, K2, v1, v2, v1p, v2p, n1, m1):
    q12 = quotient_coords(LinearSubspace.from_vectors(K, n1, [v1, v2]))
    q12p = quotient_coords(LinearSubspace.from_vectors(K2, m1, [v1p, v2p]))
    return q12, q12p


def _reduction(K2, G, q12, q12p):
    """Q'_12 . G . L_12: the induced map on the double quotients."""
    return linalg.mat_mul(K2, q12p.proj_matrix, linalg.mat_mul(K2, G, q12.lift_matrix))


def normalize_pair(phi1: SemilinearMap, phi2: SemilinearMap, v1, v2, v1p, v2p) -> SemilinearMap:
    """Scale phi1 so the two reductions modulo the base pair coincide.

    The scalar comes from the first matrix entry where phi1's reduction is
    nonzero; full equality of the reductions is then verified.
    """
    if phi1.sigma != phi2.sigma:
        raise NotProportional("the two legs carry different field homomorphisms")
    K, K2 = phi1.source_field, phi1.target_field
    n1, m1 = len(v1), len(v1p)
    qc1 = quotient_coords(LinearSubspace.from_vectors(K, n1, [v1]))
    qc2 = quotient_coords(LinearSubspace.from_vectors(K, n1, [v2]))
    qp1 = quotient_coords(LinearSubspace.from_vectors(K2, m1, [v1p]))
    qp2 = quotient_coords(LinearSubspace.from_vectors(K2, m1, [v2p]))
    q12, q12p = _pair_coords(K, K2, v1, v2, v1p, v2p, n1, m1)
    B1 = _reduction(K2, _global_matrix(K2, (qc1, qp1), phi1), q12, q12p)
    B2 = _reduction(K2, _global_matrix(K2, (qc2, qp2), phi2), q12, q12p)
    if all(not any(r) for r in B1) or all(not any(r) for r in B2):
        raise NotProportional("a reduction modulo the base pair vanished")
    lam = None
    for r1, r2 in zip(B1, B2):
        for a, b in zip(r1, r2):
            if a:
                lam = K2.div(b, a)
                break
        if lam is not None:
            break
    scaled = phi1.scaled(lam) if lam is not None else phi1
    B1s = linalg.mat_scale(K2, lam, B1) if lam is not None else B1
    if lam is None or lam == 0 or B1s != B2:
        raise NotProportional("reductions are not proportional")
    return scaled


def glue_fibred_product(phi1: SemilinearMap, phi2: SemilinearMap, v1, v2, v1p, v2p) -> SemilinearMap:
    """The unique V -> V' map reducing to phi_i on both single-point
    quotients, lifted column by column: the two representatives of the image
    of a basis vector differ by an element of <v1'> + <v2'>."""
    if phi1.sigma != phi2.sigma:
        raise ReductionsDisagree("the two legs carry different field homomorphisms")
    K, K2 = phi1.source_field, phi1.target_field
    n1, m1 = len(v1), len(v1p)
    if linalg.rank(K, (v1, v2)) != 2 or linalg.rank(K2, (v1p, v2p)) != 2:
        raise LiftInconsistent("base vectors must be independent on both sides")
    qc1 = quotient_coords(LinearSubspace.from_vectors(K, n1, [v1]))
    qc2 = quotient_coords(LinearSubspace.from_vectors(K, n1, [v2]))
    qp1 = quotient_coords(LinearSubspace.from_vectors(K2, m1, [v1p]))
    qp2 = quotient_coords(LinearSubspace.from_vectors(K2, m1, [v2p]))
    G1 = _global_matrix(K2, (qc1, qp1), phi1)
    G2 = _global_matrix(K2, (qc2, qp2), phi2)
    q12, q12p = _pair_coords(K, K2, v1, v2, v1p, v2p, n1, m1)
    if _reduction(K2, G1, q12, q12p) != _reduction(K2, G2, q12, q12p):
        raise ReductionsDisagree("reductions modulo the base pair differ; normalize first")

    pair_cols = linalg.transpose((v1p, v2p))
    cols = []
    for j in range(n1):
        w1 = tuple(row[j] for row in G1)
        w2 = tuple(row[j] for row in G2)
        diff = linalg.vec_sub(K2, w1, w2)
        c = linalg.solve(K2, pair_cols, diff)
        if c is None:
            raise LiftInconsistent(f"column {j} lift leaves <v1'> + <v2'>")
        cols.append(linalg.vec_sub(K2, w1, linalg.vec_scale(K2, c[0], v1p)))
    M = linalg.transpose(cols)
    phi = SemilinearMap(phi1.sigma, M)
    # kernel correspondence: the base directions map into each other's spans
    img1 = phi.apply_vec(v1)
    img2 = phi.apply_vec(v2)
    if linalg.rank(K2, (img1, v1p)) > 1 or linalg.rank(K2, (img2, v2p)) > 1:
        raise LiftInconsistent("base directions do not map into the base image lines")
    return phi


# -- drivers -----------------------------------------------------------------------


def _admissible_pairs(inst, admissible):
    adm = set(admissible)
    for i in range(inst.geometry.n_points):
        if i not in adm:
            continue
        for j in range(inst.geometry.n_points):
            if j == i or j not in adm:
                continue
            if inst.images[i] != inst.images[j]:
                yield (i, j)


def _pick_pair(inst, admissible, pair_rank):
    for rank_seen, pair in enumerate(_admissible_pairs(inst, admissible)):
        if rank_seen == pair_rank:
            return pair
    raise NoBasePair(f"no admissible base pair at rank {pair_rank}")


def _verify_against_instance(phi: SemilinearMap, inst: MorphismInstance):
    X, P, idx = _ambient_data(inst)
    K2 = inst.target_field
    for x, amb in enumerate(idx):
        got = linalg.normalize_vec(K2, phi.apply_vec(P.vectors[amb]))
        if got is None:
            raise VerificationFailed(f"kernel of the reconstruction meets X at {x}")
        if got != inst.images[x]:
            raise VerificationFailed(f"reconstruction disagrees with the input at point {x}")


def _finish(phi_raw: SemilinearMap, inst, pair, extra_cert=None) -> ReconstructionResult:
    _verify_against_instance(phi_raw, inst)
    scale = next(c for row in phi_raw.matrix for c in row if c)
    phi = phi_raw.canonical()
    cert = {
        "base_points": [list(inst.geometry.vectors[pair[0]]), list(inst.geometry.vectors[pair[1]])],
        "verified_points": inst.geometry.n_points,
        "sigma_power": phi.sigma.frobenius_power,
        "scalar_normalization": scale,
    }
    if extra_cert:
        cert.update(extra_cert)
    return ReconstructionResult(phi, phi.kernel(), pair, cert)


def reconstruct_locally_projective(inst: MorphismInstance, pair_rank=0) -> ReconstructionResult:
    """Two-point reconstruction for X embedded with X/x = P/x at the base
    points: quotient legs through the base pair, base reconstruction on each,
    scalar normalization, fibred-product gluing, then total verification."""
    _require_enough_points(inst)
    _require_image_not_in_plane(inst)
    admissible = full_quotient_points(inst.geometry)
    pair = _pick_pair(inst, admissible, pair_rank)
    leg1 = _lp_leg(inst, pair[0])
    leg2 = _lp_leg(inst, pair[1])
    psi1 = reconstruct_ftpg(leg1.point_map)
    psi2 = reconstruct_ftpg(leg2.point_map)
    v1, v2 = leg1.base_vec, leg2.base_vec
    v1p, v2p = leg1.base_image, leg2.base_image
    psi1 = normalize_pair(psi1, psi2, v1, v2, v1p, v2p)
    phi = glue_fibred_product(psi1, psi2, v1, v2, v1p, v2p)
    return _finish(phi, inst, pair)


def extend_affino(inst: MorphismInstance, hyperplane_mask=None) -> PartialPointMap:
    """Extend a morphism on an affino-projective X to a partial map on all
    of P: off X, the image is the common point of the closures of the images
    of the secant lines through the point (lines not inside the certifying
    hyperplane); points with empty intersection become the exceptional set,
    which must close up to a flat."""
    X, P, idx = _ambient_data(inst)
    K, K2 = P.field, inst.target_field
    _field_clause(K, K2)
    if linalg.rank(K2, inst.images) < 3:
        raise ImageInLine("image of the affino-projective geometry lies in a line")
    if hyperplane_mask is None:
        ap = is_affino_projective(X)
        if not ap:
            raise NotAffinoProjective(f"{X.label()} has no completing hyperplane")
        hyperplane_mask = ap.certificates["hyperplane_mask"]
    H = hyperplane_mask
    xmask = mask_of(idx)
    local_of = {amb: x for x, amb in enumerate(idx)}
    amb_images = [None] * P.n_points
    for x, amb in enumerate(idx):
        amb_images[amb] = inst.images[x]
    for p in bits_of(P.full_mask & ~xmask):
        common = None
        for line in P.lines_through(p):
            if line & ~H == 0:
                continue
            locs = [local_of[a] for a in bits_of(line & xmask)]
            if len(locs) < 2:
                continue
            rows, _ = linalg.rref(K2, [inst.images[a] for a in locs])
            common = rows if common is None else linalg.intersect_spans(K2, common, rows)
            if common == ():
                break
        if common is None or len(common) == 0:
            continue  # exceptional candidate
        if len(common) > 1:
            raise InconsistentExtension(f"ambient point {p} has a multi-dimensional image trace")
        amb_images[p] = linalg.normalize_vec(K2, common[0])
    e_mask = mask_of(i for i, v in enumerate(amb_images) if v is None)
    if P.closure_mask(e_mask) != e_mask:
        raise ExceptionalNotFlat("undefined points do not form a flat")
    out = PartialPointMap(P, K2, inst.target_dim, tuple(amb_images))
    _check_partial_point_map(out)
    for x, amb in enumerate(idx):
        if amb_images[amb] != inst.images[x]:
            raise InconsistentExtension("extension altered a value on X")
    return out


def _check_partial_point_map(pm: PartialPointMap):
    """Necessary partial-morphism conditions on a coordinate point map:
    constant on exceptional join classes, and per line collinear images with
    an injective-or-constant restriction."""
    P, K2 = pm.source, pm.target_field
    e_mask = pm.undefined_mask()
    if e_mask:
        seen = {}
        for i, img in enumerate(pm.images):
            if img is None:
                continue
            key = P.closure_mask(e_mask | (1 << i))
            prev = seen.setdefault(key, img)
            if prev != img:
                raise InconsistentExtension(f"extension not constant on the class of {i}")
    for line in P.lines():
        vals = [pm.images[i] for i in bits_of(line) if pm.images[i] is not None]
        if len(vals) < 2:
            continue
        distinct = set(vals)
        if len(distinct) == 1:
            continue
        if len(distinct) != len(vals):
            raise InconsistentExtension("a line maps neither injectively nor constantly")
        if linalg.rank(K2, vals) > 2:
            raise InconsistentExtension("images of a line are not collinear")


def reconstruct_affino_projective(inst: MorphismInstance, hyperplane_mask=None) -> ReconstructionResult:
    """Reconstruction for a total morphism on an affino-projective geometry:
    extend through the hyperplane, then run the base engine."""
    ext = extend_affino(inst, hyperplane_mask)
    phi = reconstruct_ftpg(ext)
    pair = (0, 1)
    for j in range(1, inst.geometry.n_points):
        if inst.images[j] != inst.images[0]:
            pair = (0, j)
            break
    return _finish(phi, inst, pair)


def _affino_leg(inst: MorphismInstance, xi: int) -> QuotientLeg:
    """Quotient leg factoring through the fiber of the base image: quotient X
    by the fiber F, extend the induced affino-projective map on X/F over
    P/span(F), reconstruct, then precompose with V/<v_i> -> V/span(F)."""
    X, P, idx = _ambient_data(inst)
    K, K2 = P.field, inst.target_field
    n1, m1 = P.ncoords, inst.target_dim + 1
    v_i = P.vectors[idx[xi]]
    v_i_img = inst.images[xi]

    fiber = [x for x in range(X.n_points) if inst.images[x] == v_i_img]
    W = LinearSubspace.from_vectors(K, n1, [P.vectors[idx[x]] for x in fiber])
    qcF = quotient_coords(W)
    if qcF.dim_q < 3:
        raise NoBasePair("fiber quotient too small to carry the reconstruction")
    src_q = build_pg(qcF.dim_q - 1, K.q)
    qcp = quotient_coords(LinearSubspace.from_vectors(K2, m1, [v_i_img]))

    fiber_set = set(fiber)
    images = {}
    for x, amb in enumerate(idx):
        if x in fiber_set:
            continue
        u = linalg.normalize_vec(K, qcF.project(P.vectors[amb]))
        if u is None:
            raise InternalContradiction("a point outside the fiber projects to zero")
        t = src_q.point_index(u)
        img = linalg.normalize_vec(K2, qcp.project(inst.images[x]))
        if img is None:
            raise InternalContradiction("a point outside the fiber maps onto the base image")
        prev = images.setdefault(t, img)
        if prev != img:
            raise InternalContradiction(f"fiber quotient map ill-defined on class {t}")

    sub_points = sorted(images)
    Y = subgeometry(src_q, sub_points)
    inner = MorphismInstance(
        Y,
        K2,
        qcp.dim_q - 1,
        tuple(images[t] for t in sub_points),
        "affino-projective",
    )
    ext = extend_affino(inner)
    psiF = reconstruct_ftpg(ext)

    # precompose with the projection V/<v_i> -> V/span(F)
    qc1 = quotient_coords(LinearSubspace.from_vectors(K, n1, [v_i]))
    C = linalg.mat_mul(K, qcF.proj_matrix, qc1.lift_matrix)
    A = linalg.mat_mul(K2, psiF.matrix, psiF.sigma.map_matrix(C))
    return QuotientLeg(xi, v_i, v_i_img, qc1, qcp, None), SemilinearMap(psiF.sigma, A)


def affino_admissible_points(inst: MorphismInstance):
    """Points whose quotient X/x is affino-projective inside P/x."""
    X, P, idx = _ambient_data(inst)
    xmask = mask_of(idx)
    out = []
    for x, amb in enumerate(idx):
        if _lap_at_point(X, P, xmask, amb):
            out.append(x)
    return tuple(out)


def reconstruct_locally_affino(inst: MorphismInstance, pair_rank=0) -> ReconstructionResult:
    """Two-point reconstruction where the quotients at the base points are
    affino-projective: each leg factors through the fiber of the base image,
    is extended over the completing hyperplane, and reconstructed; the legs
    are then normalized and glued exactly as in the locally projective case."""
    _field_clause(inst.source_field, inst.target_field)
    _require_enough_points(inst)
    _require_image_not_in_plane(inst)
    admissible = affino_admissible_points(inst)
    pair = _pick_pair(inst, admissible, pair_rank)
    leg1, psi1 = _affino_leg(inst, pair[0])
    leg2, psi2 = _affino_leg(inst, pair[1])
    v1, v2 = leg1.base_vec, leg2.base_vec
    v1p, v2p = leg1.base_image, leg2.base_image
    psi1 = normalize_pair(psi1, psi2, v1, v2, v1p, v2p)
    phi = glue_fibred_product(psi1, psi2, v1, v2, v1p, v2p)
    return _finish(phi, inst, pair)


# -- certification -----------------------------------------------------------------


def certify_side_conditions(result: ReconstructionResult, inst: MorphismInstance) -> dict:
    """Globally-defined and embedding certificates for a finished
    reconstruction: injective input forces trivial kernel (for the
    affino family only once no ambient point is tangent to all of X), and an
    embedding input forces the induced map on P to embed."""
    X, P, idx = _ambient_data(inst)
    K2 = inst.target_field
    report = {"injective": len(set(inst.images)) == len(inst.images)}

    if inst.declared_kind in ("affino-projective", "locally-affino-projective"):
        xmask = mask_of(idx)
        tangent_point = None
        for p in bits_of(P.full_mask & ~xmask):
            if all(
                (P.line_through_pair(p, amb) & xmask).bit_count() == 1 for amb in idx
            ):
                tangent_point = p
                break
        report["tangent_point_hypothesis"] = tangent_point is None
        if tangent_point is not None:
            report["tangent_point"] = tangent_point
    else:
        report["tangent_point_hypothesis"] = True

    if report["injective"] and report["tangent_point_hypothesis"]:
        report["kernel_zero"] = result.exceptional.rank == 0
    elif report["injective"]:
        report["kernel_zero"] = "not applicable"

    embedding = False
    if report["injective"]:
        image_vecs = sorted(set(inst.images))
        im_geo = CoordGeometry(K2, image_vecs)
        im_index = {v: i for i, v in enumerate(image_vecs)}
        inverse = [0] * len(image_vecs)
        for x, img in enumerate(inst.images):
            inverse[im_index[img]] = x
        embedding = flat_preimage_condition(GeometryMorphism(im_geo, X, tuple(inverse)))
    report["embedding_input"] = embedding

    if embedding:
        ext_ok = result.exceptional.rank == 0
        if ext_ok:
            ext_images = [
                linalg.normalize_vec(K2, result.phi.apply_vec(v)) for v in P.vectors
            ]
            ext_ok = None not in ext_images and len(set(ext_images)) == len(ext_images)
            if ext_ok:
                vecs = sorted(set(ext_images))
                pim = CoordGeometry(K2, vecs)
                vidx = {v: i for i, v in enumerate(vecs)}
                inv = [0] * len(vecs)
                for i, img in enumerate(ext_images):
                    inv[vidx[img]] = i
                ext_ok = flat_preimage_condition(GeometryMorphism(pim, P, tuple(inv)))
        report["extension_embedding"] = bool(ext_ok)
    return report


# -- exhaustive oracle -------------------------------------------------------------


def brute_force_oracle(inst: MorphismInstance, cap=1 << 24) -> tuple:
    """All semilinear maps (canonical forms, one per scalar class) whose
    induced map agrees with the instance on X and whose kernel misses X,
    found by enumerating every matrix for every field homomorphism."""
    X, P, idx = _ambient_data(inst)
    K, K2 = P.field, inst.target_field
    n1, m1 = P.ncoords, inst.target_dim + 1
    homs = list_homomorphisms(K, K2)
    total = (K2.q ** (n1 * m1)) * max(len(homs), 1)
    if total > cap:
        raise CapExceeded(f"{total} candidate maps exceed the cap {cap}")
    found = {}
    src_vecs = [P.vectors[a] for a in idx]
    expected = list(inst.images)
    leads = [next(i for i, c in enumerate(y) if c) for y in expected]
    rows_list = list(linalg.all_vectors(K2, n1))
    R = len(rows_list)
    mul = K2._mul
    for sigma in homs:
        twisted = [sigma.map_vec(v) for v in src_vecs]
        tables = []
        for tv in twisted:
            tables.append([linalg.dot(K2, row, tv) for row in rows_list])
        npts = len(src_vecs)
        for mat in itertools.product(range(R), repeat=m1):
            ok = True
            for t in range(npts):
                At = tables[t]
                y = expected[t]
                lead = leads[t]
                lam = 0
                good = True
                for j in range(m1):
                    wj = At[mat[j]]
                    yj = y[j]
                    if j < lead or (j > lead and yj == 0):
                        if wj:
                            good = False
                            break
                    elif j == lead:
                        if wj == 0:
                            good = False
                            break
                        lam = wj
                    else:
                        if wj != mul[lam][yj]:
                            good = False
                            break
                if not good:
                    ok = False
                    break
            if ok:
                phi = SemilinearMap(sigma, tuple(rows_list[r] for r in mat)).canonical()
                found[(sigma.table, phi.matrix)] = phi
    return tuple(found.values())


# -- fibred product identity --------------------------------------------------------


def fibred_product_identity(K: GF, v1, v2) -> bool:
    """Full-enumeration check that v -> ([v], [v]) is a bijection of K^n onto
    the fibred product of the two single-direction quotients over the joint
    quotient."""
    n = len(v1)
    if linalg.rank(K, (v1, v2)) != 2:
        raise ValueError("directions must be independent")
    qc1 = quotient_coords(LinearSubspace.from_vectors(K, n, [v1]))
    qc2 = quotient_coords(LinearSubspace.from_vectors(K, n, [v2]))
    qc12 = quotient_coords(LinearSubspace.from_vectors(K, n, [v1, v2]))
    lift_pairs = [(qc1.project(v), qc2.project(v)) for v in linalg.all_vectors(K, n)]
    if len(set(lift_pairs)) != K.q**n:
        return False
    fibred = set()
    for a in linalg.all_vectors(K, n - 1):
        ra = qc12.project(qc1.lift(a))
        for b in linalg.all_vectors(K, n - 1):
            if ra == qc12.project(qc2.lift(b)):
                fibred.add((a, b))
    return fibred == set(lift_pairs)
