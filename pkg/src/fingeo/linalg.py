"""Exact row-echelon linear algebra over GF(q).

Vectors are tuples of field encodings, matrices are tuples of row tuples.
Everything is pure and allocation-light; these routines sit under every
enumeration kernel in the package.
"""

from __future__ import annotations

import itertools

from .gf import GF, FieldHom


def zero_vec(n):
    return (0,) * n


def unit_vec(n, j):
    return tuple(1 if i == j else 0 for i in range(n))


def is_zero_vec(v):
    return not any(v)


def vec_add(K: GF, u, v):
    add = K.add
    return tuple(add(a, b) for a, b in zip(u, v))


def vec_sub(K: GF, u, v):
    sub = K.sub
    return tuple(sub(a, b) for a, b in zip(u, v))


def vec_scale(K: GF, c, v):
    mul = K.mul
    return tuple(mul(c, a) for a in v)


def dot(K: GF, u, v):
    add, mul = K.add, K.mul
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = add(acc, mul(a, b))
    return acc


def matvec(K: GF, M, v):
    return tuple(dot(K, row, v) for row in M)


def mat_mul(K: GF, A, B):
    cols = tuple(zip(*B))
    return tuple(tuple(dot(K, row, col) for col in cols) for row in A)


def mat_scale(K: GF, c, M):
    return tuple(vec_scale(K, c, row) for row in M)


def identity_matrix(n):
    return tuple(unit_vec(n, i) for i in range(n))


def transpose(M):
    return tuple(zip(*M))


def sigma_vec(sigma: FieldHom, v):
    return sigma.map_vec(v)


def sigma_matrix(sigma: FieldHom, M):
    return sigma.map_matrix(M)


def normalize_vec(K: GF, v):
    """Scale so the leftmost nonzero entry is 1; None for the zero vector."""
    for c in v:
        if c:
            if c == 1:
                return tuple(v)
            inv = K.inv(c)
            return tuple(K.mul(inv, a) for a in v)
    return None


def rref(K: GF, rows):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    work = [list(r) for r in rows if any(r)]
    if not work:
        return (), ()
    add, neg, mul, invt = K._add, K._neg, K._mul, K._inv
    ncols = len(work[0])
    pivots = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, len(work)):
            if work[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = invt[work[r][col]]
        if inv != 1:
            mrow = mul[inv]
            work[r] = [mrow[a] for a in work[r]]
        row_r = work[r]
        for i in range(len(work)):
            if i != r and work[i][col]:
                mrow = mul[neg[work[i][col]]]
                wi = work[i]
                work[i] = [add[a][mrow[b]] if b else a for a, b in zip(wi, row_r)]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return tuple(tuple(work[i]) for i in range(r)), tuple(pivots)


def rank(K: GF, rows):
    return len(rref(K, rows)[0])


def reduce_against(K: GF, basis_rows, pivots, v):
    """Eliminate v's pivot coordinates against an rref basis."""
    add, neg, mul = K._add, K._neg, K._mul
    v = list(v)
    for row, piv in zip(basis_rows, pivots):
        c = v[piv]
        if c:
            mrow = mul[neg[c]]
            v = [add[a][mrow[b]] if b else a for a, b in zip(v, row)]
    return tuple(v)


def in_span(K: GF, basis_rows, pivots, v):
    add, neg, mul = K._add, K._neg, K._mul
    v = list(v)
    for row, piv in zip(basis_rows, pivots):
        c = v[piv]
        if c:
            mrow = mul[neg[c]]
            v = [add[a][mrow[b]] if b else a for a, b in zip(v, row)]
    return not any(v)


def rref_extend(K: GF, basis_rows, pivots, v):
    """Insert one vector into an rref basis; returns (rows, pivots) unchanged
    when v already lies in the span."""
    red = reduce_against(K, basis_rows, pivots, v)
    lead = next((i for i, c in enumerate(red) if c), None)
    if lead is None:
        return basis_rows, pivots
    if red[lead] != 1:
        red = vec_scale(K, K.inv(red[lead]), red)
    rows = []
    pivs = []
    placed = False
    for row, piv in zip(basis_rows, pivots):
        if not placed and lead < piv:
            rows.append(red)
            pivs.append(lead)
            placed = True
        if row[lead]:
            row = vec_sub(K, row, vec_scale(K, row[lead], red))
        rows.append(row)
        pivs.append(piv)
    if not placed:
        rows.append(red)
        pivs.append(lead)
    return tuple(rows), tuple(pivs)


def kernel_basis(K: GF, M):
    """RREF basis of {v : M v = 0}."""
    if not M:
        return ()
    ncols = len(M[0])
    rows, pivots = rref(K, M)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    basis = []
    for j in free:
        v = [0] * ncols
        v[j] = 1
        for row, piv in zip(rows, pivots):
            # pivot coordinate solves row . v = 0
            v[piv] = K.neg(row[j])
        basis.append(tuple(v))
    out, _ = rref(K, basis)
    return out


def solve(K: GF, A, b):
    """One solution x of A x = b, or None.  A is rows of an m x n matrix."""
    n = len(A[0]) if A else len(b)
    aug = [tuple(row) + (bb,) for row, bb in zip(A, b)]
    rows, pivots = rref(K, aug)
    x = [0] * n
    for row, piv in zip(rows, pivots):
        if piv == n:
            return None  # inconsistent: pivot in the constant column
        x[piv] = row[n]
    return tuple(x)


def inverse(K: GF, M):
    n = len(M)
    aug = [tuple(row) + unit_vec(n, i) for i, row in enumerate(M)]
    rows, pivots = rref(K, aug)
    if list(pivots) != list(range(n)):
        return None
    return tuple(row[n:] for row in rows)


def intersect_spans(K: GF, rows1, rows2):
    """RREF basis of span(rows1) & span(rows2)."""
    if not rows1 or not rows2:
        return ()
    stacked = tuple(rows1) + tuple(rows2)
    coeffs = kernel_basis(K, transpose(stacked))
    r1 = len(rows1)
    vecs = []
    for c in coeffs:
        v = zero_vec(len(rows1[0]))
        for ci, row in zip(c[:r1], rows1):
            if ci:
                v = vec_add(K, v, vec_scale(K, ci, row))
        if any(v):
            vecs.append(v)
    out, _ = rref(K, vecs)
    return out


def span_points(K: GF, basis_rows):
    """All normalized projective representatives in the row span.

    Enumerates (q^r - 1)/(q - 1) coefficient vectors whose leading entry is 1,
    so no deduplication is needed.
    """
    r = len(basis_rows)
    if r == 0:
        return []
    q = K.q
    pts = []
    for lead in range(r):
        tail_width = r - lead - 1
        for t in range(q**tail_width):
            coeff = (0,) * lead + (1,) + _digits(t, q, tail_width)
            v = zero_vec(len(basis_rows[0]))
            for c, row in zip(coeff, basis_rows):
                if c:
                    v = vec_add(K, v, vec_scale(K, c, row))
            pts.append(normalize_vec(K, v))
    return pts


def _digits(n, q, width):
    out = []
    for _ in range(width):
        out.append(n % q)
        n //= q
    return tuple(out)


def all_vectors(K: GF, n):
    """All q^n coordinate vectors, ascending lexicographic."""
    return itertools.product(range(K.q), repeat=n)


def all_proj_points(K: GF, n):
    """All normalized length-n vectors (leftmost nonzero entry 1), ascending
    lexicographic; these are the canonical projective point representatives."""
    return [v for v in all_vectors(K, n) if any(v) and normalize_vec(K, v) == v]
