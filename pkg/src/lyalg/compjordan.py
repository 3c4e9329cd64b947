"""Split composition algebras, Jordan algebras, and their trace-zero views.

Everything here is verified at construction time over exact rationals.
Composition builders check unit laws, the polarized degree two equation and
polarized norm multiplicativity on all basis tuples.  Jordan builders check
the linearized Jordan identity and the associativity of the generic trace
form; for the 27-dimensional algebra those sweeps run as overflow-guarded
int64 numpy contractions after clearing denominators, which keeps them
exact and fast.  The trace-zero view packages what the two-ingredient Lie
algebra constructions consume: the star product and normalized trace form
in a torus eigenbasis, the inner pair derivations restricted to the slice,
and a weight-adapted basis of their span.
"""

import re
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from . import buildtools as bt
from . import linalg as la
from .linalg import F0, F1
from .matrixalg import split_sym_form

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class CompAlg:
    """Unital algebra over Q whose quadratic norm admits composition.

    tab[i][j] is the dense coordinate vector of e_i e_j.  gram is the polar
    form of the norm, so n(x) = gram(x, x) / 2 and tr(x) = gram(x, 1).
    Instances are built through build_composition and must be treated as
    read-only; the builders cache and share them.
    """

    def __init__(self, kind, tab, gram, unit, labels):
        self.kind = kind
        self.dim = len(tab)
        self.tab = tab
        self.gram = gram
        self.unit = unit
        self.labels = labels
        self._int = None

    def mul(self, x, y):
        out = la.zero_vec(self.dim)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = self.tab[i]
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                f = xi * yj
                for k, cv in enumerate(row[j]):
                    if cv != 0:
                        out[k] += f * cv
        return out

    def polar(self, x, y):
        return la.dot(x, la.mat_vec(self.gram, y))

    def norm(self, x):
        return self.polar(x, x) * HALF

    def trace(self, x):
        return self.polar(x, self.unit)

    def conj(self, x):
        return la.vec_sub(la.vec_scale(self.trace(x), self.unit), x)

    def commutator(self, x, y):
        return la.vec_sub(self.mul(x, y), self.mul(y, x))

    def associator(self, x, y, z):
        return la.vec_sub(self.mul(self.mul(x, y), z),
                          self.mul(x, self.mul(y, z)))


def _table_k():
    tab = [[[F1]]]
    gram = [[Fraction(2)]]
    return tab, gram, [F1], ["1"]


def _table_K():
    # two orthogonal idempotents p, q with p + q = 1
    tab = [[la.zero_vec(2) for _ in range(2)] for _ in range(2)]
    tab[0][0][0] = F1
    tab[1][1][1] = F1
    gram = [[F0, F1], [F1, F0]]
    return tab, gram, [F1, F1], ["p", "q"]


def _table_Q():
    # 2x2 matrix units E11, E12, E21, E22; the norm is the determinant
    tab = [[la.zero_vec(4) for _ in range(4)] for _ in range(4)]
    unit = {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}
    for a, (i, j) in unit.items():
        for b, (k, l) in unit.items():
            if j == k:
                tab[a][b][{(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}[(i, l)]] = F1
    gram = la.zeros(4, 4)
    gram[0][3] = gram[3][0] = F1
    gram[1][2] = gram[2][1] = Fraction(-1)
    return tab, gram, [F1, F0, F0, F1], ["E11", "E12", "E21", "E22"]


def _table_O():
    # vector-matrix model: basis p, u1, u2, u3, v1, v2, v3, q where p, q are
    # the diagonal idempotents and u, v the two off-diagonal 3-vector slots.
    # The cross terms carry signs (-, +); the verifier rejects same-sign
    # choices, which break norm multiplicativity.
    tab = [[la.zero_vec(8) for _ in range(8)] for _ in range(8)]
    P, Q = 0, 7
    U = [1, 2, 3]
    V = [4, 5, 6]
    tab[P][P][P] = F1
    tab[Q][Q][Q] = F1
    for m in range(3):
        tab[P][U[m]][U[m]] = F1
        tab[U[m]][Q][U[m]] = F1
        tab[Q][V[m]][V[m]] = F1
        tab[V[m]][P][V[m]] = F1
        tab[U[m]][V[m]][P] = F1
        tab[V[m]][U[m]][Q] = F1
    for m in range(3):
        n_, r = (m + 1) % 3, (m + 2) % 3
        tab[U[m]][U[n_]][V[r]] = F1
        tab[U[n_]][U[m]][V[r]] = -F1
        tab[V[m]][V[n_]][U[r]] = -F1
        tab[V[n_]][V[m]][U[r]] = F1
    gram = la.zeros(8, 8)
    gram[P][Q] = gram[Q][P] = F1
    for m in range(3):
        gram[U[m]][V[m]] = gram[V[m]][U[m]] = Fraction(-1)
    unit = la.zero_vec(8)
    unit[P] = unit[Q] = F1
    return tab, gram, unit, ["p", "u1", "u2", "u3", "v1", "v2", "v3", "q"]


def _verify_composition(c):
    n = c.dim
    for i in range(n):
        for j in range(n):
            if c.gram[i][j] != c.gram[j][i]:
                raise ValueError("norm polar form is not symmetric")
    if la.rank(c.gram) != n:
        raise ValueError("norm form is degenerate")
    for i in range(n):
        e = la.basis_vec(n, i)
        if c.mul(c.unit, e) != e or c.mul(e, c.unit) != e:
            raise ValueError("unit law fails")
    trv = [c.trace(la.basis_vec(n, i)) for i in range(n)]
    # polarized degree two equation on basis pairs
    for i in range(n):
        for j in range(n):
            v = la.vec_add(c.tab[i][j], c.tab[j][i])
            v[j] -= trv[i]
            v[i] -= trv[j]
            v = la.vec_add(v, la.vec_scale(c.gram[i][j], c.unit))
            if any(v):
                raise ValueError("degree two equation fails")
    # polarized norm multiplicativity on basis 4-tuples
    ap = [[la.mat_vec(c.gram, c.tab[r][s]) for s in range(n)] for r in range(n)]
    for i in range(n):
        for j in range(n):
            gij = c.gram[i][j]
            for k in range(n):
                for l in range(n):
                    s = la.dot(c.tab[i][k], ap[j][l]) + la.dot(c.tab[i][l], ap[j][k])
                    if s != gij * c.gram[k][l]:
                        raise ValueError("norm is not multiplicative")
    # trace form symmetric and associative
    tf = [[c.trace(c.tab[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if tf[i][j] != tf[j][i]:
                raise ValueError("trace form is not symmetric")
            for k in range(n):
                lhs = sum((c.tab[i][j][s2] * tf[s2][k] for s2 in range(n)), F0)
                rhs = sum((c.tab[j][k][s2] * tf[i][s2] for s2 in range(n)), F0)
                if lhs != rhs:
                    raise ValueError("trace form is not associative")
    # alternativity, in symmetrized form
    aso = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                aso[(i, j, k)] = c.associator(la.basis_vec(n, i),
                                              la.basis_vec(n, j),
                                              la.basis_vec(n, k))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if any(la.vec_add(aso[(i, j, k)], aso[(j, i, k)])):
                    raise ValueError("algebra is not left alternative")
                if any(la.vec_add(aso[(i, j, k)], aso[(i, k, j)])):
                    raise ValueError("algebra is not right alternative")


@lru_cache(maxsize=None)
def build_composition(kind):
    """Split composition algebra over Q: "k", "K", "Q" or "O".

    Dimensions 1, 2, 4, 8.  All four come with the split (isotropic for
    dim > 1) norm form, and every defining identity is re-proved on the
    structure constants before the object is returned.
    """
    builders = {"k": _table_k, "K": _table_K, "Q": _table_Q, "O": _table_O}
    if kind not in builders:
        raise ValueError("unknown composition algebra %r" % kind)
    tab, gram, unit, labels = builders[kind]()
    c = CompAlg(kind, tab, gram, unit, labels)
    _verify_composition(c)
    return c


def comp_derivation(c, a, b):
    """Inner derivation of a composition algebra for an ordered pair.

    Columns are (1/4) ([[a, b], z] + 3 (a, z, b)) over the basis, with
    (a, z, b) the associator.  Alternating in (a, b); kills the unit.
    """
    ab = c.commutator(a, b)
    cols = []
    for k in range(c.dim):
        z = la.basis_vec(c.dim, k)
        w = la.vec_add(c.commutator(ab, z),
                       la.vec_scale(Fraction(3), c.associator(a, z, b)))
        cols.append(la.vec_scale(QUARTER, w))
    return la.transpose(cols)


def derivation_space(dim, mulfn):
    """Basis of all matrices satisfying the Leibniz rule for mulfn.

    Solves the full linear system over the dim^2 matrix entries, so it is
    meant for small algebras and for cross-checking the span of the pair
    derivations against the whole derivation algebra.
    """
    from . import fastnum

    tab = [[mulfn(la.basis_vec(dim, i), la.basis_vec(dim, j))
            for j in range(dim)] for i in range(dim)]
    rows = []
    for i in range(dim):
        for j in range(dim):
            for a in range(dim):
                co = {}
                for cc, v in enumerate(tab[i][j]):
                    if v:
                        co[(a, cc)] = co.get((a, cc), F0) + v
                for s in range(dim):
                    v = tab[s][j][a]
                    if v:
                        co[(s, i)] = co.get((s, i), F0) - v
                    v = tab[i][s][a]
                    if v:
                        co[(s, j)] = co.get((s, j), F0) - v
                den = 1
                for v in co.values():
                    den = lcm(den, v.denominator)
                row = sorted((r * dim + c2, int(v * den))
                             for (r, c2), v in co.items() if v)
                if row:
                    rows.append(row)
    ker = fastnum.sparse_int_kernel(rows, dim * dim)
    return [[[Fraction(v[r * dim + c2]) for c2 in range(dim)]
             for r in range(dim)] for v in ker]


class JordanAlg:
    """Commutative unital algebra over Q with a generic trace functional.

    tracev holds the values of the generic trace on the basis, normalized
    so the unit traces to the degree.  form, when set, is the bilinear
    form of a spin factor and switches the pair derivation convention in
    the trace-zero view.  Treat instances as read-only.
    """

    def __init__(self, kind, tab, degree, tracev, unit, labels,
                 form=None, signs=None):
        self.kind = kind
        self.dim = len(tab)
        self.tab = tab
        self.degree = degree
        self.tracev = tracev
        self.unit = unit
        self.labels = labels
        self.form = form
        self.signs = signs
        self._int = None

    def mul(self, x, y):
        out = la.zero_vec(self.dim)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = self.tab[i]
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                f = xi * yj
                for k, cv in enumerate(row[j]):
                    if cv != 0:
                        out[k] += f * cv
        return out

    def gentrace(self, x):
        return la.dot(self.tracev, x)

    def right_mult(self, x):
        cols = [self.mul(la.basis_vec(self.dim, k), x) for k in range(self.dim)]
        return la.transpose(cols)


def jordan_derivation(j, x, y):
    """Commutator of the two right multiplications, an inner derivation."""
    rx = j.right_mult(x)
    ry = j.right_mult(y)
    return la.mat_sub(la.mat_mul(rx, ry), la.mat_mul(ry, rx))


def _int_table(tab):
    """Dense structure constants as (int64 tensor, common denominator)."""
    n = len(tab)
    s = 1
    for row in tab:
        for cell in row:
            for v in cell:
                s = lcm(s, v.denominator)
    arr = np.zeros((n, n, n), dtype=np.int64)
    for i, row in enumerate(tab):
        for j, cell in enumerate(row):
            for k, v in enumerate(cell):
                if v:
                    iv = v.numerator * (s // v.denominator)
                    if abs(iv) >= bt.INT64_GUARD:
                        raise OverflowError("structure constant too large")
                    arr[i, j, k] = iv
    return arr, s


def _verify_jordan(j):
    n = j.dim
    for a in range(n):
        e = la.basis_vec(n, a)
        if j.mul(j.unit, e) != e:
            raise ValueError("unit law fails")
    for i in range(n):
        for k in range(i):
            if j.tab[i][k] != j.tab[k][i]:
                raise ValueError("product is not commutative")
    if j.gentrace(j.unit) != j.degree:
        raise ValueError("the unit must trace to the degree")
    t, s = _int_table(j.tab)
    j._int = (t, s)
    tli, _ = bt.int_rows([j.tracev])
    tv = tli[0]
    bt.guard_bound(n, t, tv.reshape(1, -1))
    tf = np.einsum('ijc,c->ij', t, tv)
    if not np.array_equal(tf, tf.T):
        raise ValueError("trace form is not symmetric")
    bt.guard_bound(n, t, tf)
    if not np.array_equal(np.einsum('ijc,ck->ijk', t, tf),
                          np.einsum('jkc,ic->ijk', t, tf)):
        raise ValueError("trace form is not associative")
    # linearized Jordan identity: the full symmetrization of
    # [R_x, R_{y z}] over each basis triple must vanish
    r = t.transpose(1, 2, 0)
    bt.guard_bound(n, t, r)
    rp = np.einsum('jkc,cab->jkab', t, r)
    bt.guard_bound(6 * n, r, rp)
    for i in range(n):
        off = np.triu_indices(n - i)
        jj = off[0] + i
        kk = off[1] + i
        rpp = rp[jj, kk]
        t1 = np.matmul(r[i], rpp) - np.matmul(rpp, r[i])
        t2 = np.matmul(r[jj], rp[i, kk]) - np.matmul(rp[i, kk], r[jj])
        t3 = np.matmul(r[kk], rp[i, jj]) - np.matmul(rp[i, jj], r[kk])
        if (t1 + t2 + t3).any():
            raise ValueError("Jordan identity fails on a basis triple")


def build_jordan_spin(m):
    """Spin factor on an m-dimensional split quadratic space.

    Product (a 1 + v)(b 1 + w) = (a b + phi(v, w)) 1 + a w + b v, degree 2,
    with phi the split symmetric form.
    """
    if m < 1:
        raise ValueError("need at least one vector direction")
    phi = split_sym_form(m)
    dim = m + 1
    tab = [[la.zero_vec(dim) for _ in range(dim)] for _ in range(dim)]
    tab[0][0][0] = F1
    for i in range(1, dim):
        tab[0][i][i] = F1
        tab[i][0][i] = F1
        for k in range(1, dim):
            tab[i][k][0] = phi.gram[i - 1][k - 1]
    tracev = [Fraction(2)] + [F0] * m
    labels = ["1"] + ["v%d" % i for i in range(1, dim)]
    j = JordanAlg("JV(%d)" % m, tab, 2, tracev, la.basis_vec(dim, 0),
                  labels, form=phi)
    _verify_jordan(j)
    return j


def _herm_basis(c, n, signs):
    mats = []
    labels = []
    for i in range(n):
        m = [[la.zero_vec(c.dim) for _ in range(n)] for _ in range(n)]
        m[i][i] = list(c.unit)
        mats.append(m)
        labels.append("E%d" % (i + 1))
    for i in range(n):
        for j in range(i + 1, n):
            for b in range(c.dim):
                m = [[la.zero_vec(c.dim) for _ in range(n)] for _ in range(n)]
                m[i][j] = la.basis_vec(c.dim, b)
                m[j][i] = la.vec_scale(Fraction(signs[i] * signs[j]),
                                       c.conj(la.basis_vec(c.dim, b)))
                mats.append(m)
                labels.append("%s[%d%d]" % (c.labels[b], i + 1, j + 1))
    return mats, labels


def _herm_mat_mul(c, x, y, n):
    z = [[la.zero_vec(c.dim) for _ in range(n)] for _ in range(n)]
    for r in range(n):
        for t in range(n):
            xv = x[r][t]
            if not any(xv):
                continue
            for s in range(n):
                yv = y[t][s]
                if any(yv):
                    z[r][s] = la.vec_add(z[r][s], c.mul(xv, yv))
    return z


def _herm_coords(c, n, signs, z):
    co = []
    uidx = next(i for i, uv in enumerate(c.unit) if uv != 0)
    for i in range(n):
        d = z[i][i]
        lam = d[uidx] / c.unit[uidx]
        if la.vec_sub(d, la.vec_scale(lam, c.unit)) != la.zero_vec(c.dim):
            raise ValueError("diagonal entry is not a scalar multiple of 1")
        co.append(lam)
    for i in range(n):
        for j in range(i + 1, n):
            mirror = la.vec_scale(Fraction(signs[i] * signs[j]), c.conj(z[i][j]))
            if z[j][i] != mirror:
                raise ValueError("product left the hermitian subspace")
            co.extend(z[i][j])
    return co


@lru_cache(maxsize=None)
def build_jordan_hermitian(ckind, n, signs=None):
    """Hermitian n x n matrices over a composition algebra, symmetrized.

    signs twists the hermitian condition by a diagonal of +-1 entries,
    which changes the rational form without changing the dimension; the
    default is the untwisted identity choice.  The Jordan identity check
    rejects invalid inputs such as octonion entries at size 4.
    """
    c = build_composition(ckind)
    if n < 2:
        raise ValueError("matrix size must be at least 2")
    signs = tuple(signs) if signs is not None else (1,) * n
    if len(signs) != n or any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be +-1 of length n")
    mats, labels = _herm_basis(c, n, signs)
    dim = len(mats)
    tab = [[None] * dim for _ in range(dim)]
    for a in range(dim):
        for b2 in range(a, dim):
            zf = _herm_mat_mul(c, mats[a], mats[b2], n)
            zb = _herm_mat_mul(c, mats[b2], mats[a], n)
            sym = [[la.vec_scale(HALF, la.vec_add(zf[r][s], zb[r][s]))
                    for s in range(n)] for r in range(n)]
            v = _herm_coords(c, n, signs, sym)
            tab[a][b2] = v
            tab[b2][a] = v
    tracev = [F1] * n + [F0] * (dim - n)
    unit = la.zero_vec(dim)
    for i in range(n):
        unit[i] = F1
    j = JordanAlg("H%d(%s)" % (n, ckind), tab, n, tracev, unit, labels,
                  signs=signs)
    _verify_jordan(j)
    return j


@lru_cache(maxsize=None)
def build_jordan(spec):
    """Jordan algebra from a short name.

    "k" is the one-dimensional algebra of degree 1, "Hn(C)" the hermitian
    n x n matrices over the composition algebra C in {k, K, Q, O}, and
    "JV(m)" the spin factor on an m-dimensional split quadratic space.
    Hermitian algebras over k get an alternating-sign twist so their
    derivation algebras contain a split torus; the other entry algebras
    are already split, so they keep the identity choice.
    """
    if spec == "k":
        j = JordanAlg("k", [[[F1]]], 1, [F1], [F1], ["1"])
        _verify_jordan(j)
        return j
    m = re.fullmatch(r"H(\d+)\(([kKQO])\)", spec)
    if m:
        n = int(m.group(1))
        ck = m.group(2)
        signs = tuple((-1) ** i for i in range(n)) if ck == "k" else None
        return build_jordan_hermitian(ck, n, signs)
    m = re.fullmatch(r"JV\((\d+)\)", spec)
    if m:
        return build_jordan_spin(int(m.group(1)))
    raise ValueError("unknown jordan algebra spec %r" % spec)


def _spin_pair_map(j, x, y):
    """Pair map z -> phi(v, z) w - phi(w, z) v on the vector part."""
    phi = j.form
    m = phi.dim
    out = la.zeros(j.dim, j.dim)
    vx = x[1:]
    wy = y[1:]
    for c in range(m):
        a = phi.apply(vx, la.basis_vec(m, c))
        b = phi.apply(wy, la.basis_vec(m, c))
        for r in range(m):
            val = a * wy[r] - b * vx[r]
            if val != 0:
                out[r + 1][c + 1] = val
    return out


class TraceAdmissible:
    """Trace-zero slice of a composition or Jordan algebra.

    Carries, all in the coordinates of a fixed torus eigenbasis of the
    slice: the star product x * y = x y - t(x y) 1, the normalized trace
    form t(x y), the restricted inner pair derivations with their
    coordinates over a weight-adapted basis of their span, and the span
    coordinates of the split torus itself.
    """

    def __init__(self, tag, amb, vecs, labels, weights, stab, tform, dt,
                 dcoords, dspan, dweights, tor_coords):
        self.tag = tag
        self.amb = amb
        self.vecs = vecs
        self.n0 = len(vecs)
        self.labels = labels
        self.weights = weights
        self.rank = len(weights[0]) if weights else 0
        self.stab = stab
        self.tform = tform
        self.dt = dt
        self.dcoords = dcoords
        self.dspan = dspan
        self.dweights = dweights
        self.tor_coords = tor_coords

    def star(self, i, j):
        return self.stab[i][j]

    def tp(self, i, j):
        return self.tform[i][j]

    def dmat(self, i, j):
        if i == j:
            return la.zeros(self.n0, self.n0)
        if i < j:
            return self.dt[(i, j)]
        return la.mat_scale(-F1, self.dt[(j, i)])

    def dco(self, i, j):
        if i == j:
            return la.zero_vec(len(self.dspan))
        if i < j:
            return self.dcoords[(i, j)]
        return [-x for x in self.dcoords[(j, i)]]


def _x0_labels(tag, amblabels, vecs):
    out = []
    for idx, v in enumerate(vecs):
        nz = [(i, c) for i, c in enumerate(v) if c != 0]
        if len(nz) == 1 and nz[0][1] == 1:
            out.append(amblabels[nz[0][0]])
        elif len(nz) == 2 and nz[0][1] == 1 and nz[1][1] == -1:
            out.append("%s-%s" % (amblabels[nz[0][0]], amblabels[nz[1][0]]))
        elif len(nz) == 2 and nz[0][1] == -1 and nz[1][1] == 1:
            out.append("%s-%s" % (amblabels[nz[1][0]], amblabels[nz[0][0]]))
        else:
            out.append("%s0_%d" % (tag, idx))
    return out


def _amb_int(amb):
    if amb._int is None:
        amb._int = _int_table(amb.tab)
    return amb._int


def _flat(m):
    return [v for row in m for v in row]


def _mat_combo(mats, co):
    out = la.zeros(len(mats[0]), len(mats[0][0]))
    for c, m in zip(co, mats):
        if c != 0:
            out = la.mat_add(out, la.mat_scale(c, m))
    return out


def _vec_combo(vecs, co):
    out = la.zero_vec(len(vecs[0]))
    for c, v in zip(co, vecs):
        if c != 0:
            out = la.vec_add(out, la.vec_scale(c, v))
    return out


def _offdiag(m):
    n = len(m)
    return any(m[r][c] != 0 for r in range(n) for c in range(n) if r != c)


def _pair_tables_small(amb, tl, vecs, bc, dpair):
    n0 = len(vecs)
    prows = []
    tform = la.zeros(n0, n0)
    for i in range(n0):
        for j in range(n0):
            p = amb.mul(vecs[i], vecs[j])
            tv = la.dot(tl, p)
            tform[i][j] = tv
            prows.append(la.vec_sub(p, la.vec_scale(tv, amb.unit)))
    sco = bc.coords_rows(prows)
    stab = [[sco[i * n0 + j] for j in range(n0)] for i in range(n0)]
    prs = [(i, j) for i in range(n0) for j in range(i + 1, n0)]
    damb = {}
    imgs = []
    for (i, j) in prs:
        m = dpair(vecs[i], vecs[j])
        damb[(i, j)] = m
        for v in vecs:
            imgs.append(la.mat_vec(m, v))
    dtfull = {}
    if prs:
        ico = bc.coords_rows(imgs)
        for idx, (i, j) in enumerate(prs):
            dtfull[(i, j)] = la.transpose(ico[idx * n0:(idx + 1) * n0])
    return stab, tform, dtfull, damb


def _pair_tables_big(amb, tl, vecs, bc):
    """Same contract as the small path, pushed through int64 batches."""
    tint, s = _amb_int(amb)
    n = amb.dim
    n0 = len(vecs)
    b, sb = bt.int_rows(vecs)
    r = tint.transpose(1, 2, 0)
    bt.guard_bound(n, b, r)
    rb = np.einsum('ia,arc->irc', b, r)
    bt.guard_bound(n, rb, rb)
    m = np.einsum('irs,jst->ijrt', rb, rb)
    dt = m - m.transpose(1, 0, 2, 3)
    sdt = (s * sb) ** 2
    bt.guard_bound(n * n, b, b, tint)
    p2 = np.einsum('ia,jb,abc->ijc', b, b, tint, optimize=True)
    sp2 = sb * sb * s
    tli, st = bt.int_rows([tl])
    bt.guard_bound(n, p2, tli)
    tvals = np.einsum('ijc,c->ij', p2, tli[0])
    ui, su = bt.int_rows([amb.unit])
    bt.guard_bound(2 * st * su, p2)
    bt.guard_bound(2, tvals, ui)
    star = p2 * (st * su) - tvals[:, :, None] * ui[0][None, None, :]
    co, cs = bc.coords_int(star.reshape(n0 * n0, n), sp2 * st * su)
    stab = [[[Fraction(int(co[i * n0 + j, l]), cs) for l in range(n0)]
             for j in range(n0)] for i in range(n0)]
    tform = [[Fraction(int(tvals[i, j]), sp2 * st) for j in range(n0)]
             for i in range(n0)]
    bt.guard_bound(n, dt, b)
    img = np.einsum('ijrc,kc->ijrk', dt, b)
    co2, cs2 = bc.coords_int(
        img.transpose(0, 1, 3, 2).reshape(n0 * n0 * n0, n), sdt * sb)
    dtfull = {}
    damb = {}
    for i in range(n0):
        for j in range(i + 1, n0):
            dtfull[(i, j)] = [[Fraction(int(co2[(i * n0 + j) * n0 + k, l]), cs2)
                               for k in range(n0)] for l in range(n0)]
            damb[(i, j)] = [[Fraction(int(dt[i, j, rr, cc]), sdt)
                             for cc in range(n)] for rr in range(n)]
    # spot-check one slot of each batch against the direct implementations
    if n0 >= 2:
        if damb[(0, 1)] != jordan_derivation(amb, vecs[0], vecs[1]):
            raise ArithmeticError("integer batch disagrees with the direct pair map")
        p = amb.mul(vecs[0], vecs[1])
        if tform[0][1] != la.dot(tl, p):
            raise ArithmeticError("integer batch disagrees with the trace form")
        rec = la.vec_scale(tform[0][1], amb.unit)
        rec = la.vec_add(rec, _vec_combo(vecs, stab[0][1]))
        if rec != p:
            raise ArithmeticError("integer batch disagrees with the star product")
    return stab, tform, dtfull, damb


def _diagonal_coeffs(dspan0, n0):
    rows = []
    for rr in range(n0):
        for cc in range(n0):
            if rr != cc:
                rows.append([m[rr][cc] for m in dspan0])
    return la.kernel_basis(rows, len(dspan0))


def _toral_search(dspan0):
    """Hunt for a rationally diagonalizable element of the span.

    Tries the basis elements and geometric-coefficient combinations; used
    when no element of the span is diagonal on the natural basis, as for
    the sign-twisted hermitian algebras over k.  Raises ArithmeticError
    when the span has no split part to find.
    """
    ns = len(dspan0)
    cands = [la.basis_vec(ns, i) for i in range(ns)]
    for k in range(2, 30):
        cands.append([Fraction(k) ** i for i in range(ns)])
        cands.append([Fraction(-k) ** i for i in range(ns)])
    for co in cands:
        m = _mat_combo(dspan0, co)
        try:
            split = bt.rational_eigensplit(m)
        except ArithmeticError:
            continue
        if len(split) >= 2:
            return [co]
    raise ArithmeticError("no split torus found in the derivation span")


def _leibniz_check(tint, mats):
    es, _ = bt.int_rows([_flat(m) for m in mats])
    n = tint.shape[0]
    es = es.reshape(len(mats), n, n)
    bt.guard_bound(2 * n, es, tint)
    lhs = np.einsum('sab,ijb->sija', es, tint)
    rhs = np.einsum('sci,cja->sija', es, tint) + np.einsum('scj,ica->sija', es, tint)
    if not np.array_equal(lhs, rhs):
        raise ArithmeticError("a spanning pair derivation fails the Leibniz rule")


def _equivariance_check(dspan0, dtfull, n0):
    """Exhaustive check that conjugating a pair derivation by a span
    element matches moving the element into the pair slots."""
    def dm(a, b):
        if a < b:
            return dtfull[(a, b)], F1
        return dtfull[(b, a)], -F1

    for e in dspan0:
        for (i, j), dij in dtfull.items():
            lhs = la.mat_sub(la.mat_mul(e, dij), la.mat_mul(dij, e))
            rhs = la.zeros(n0, n0)
            for c in range(n0):
                ci = e[c][i]
                if ci != 0 and c != j:
                    m, sg = dm(c, j)
                    rhs = la.mat_add(rhs, la.mat_scale(sg * ci, m))
                cj = e[c][j]
                if cj != 0 and c != i:
                    m, sg = dm(i, c)
                    rhs = la.mat_add(rhs, la.mat_scale(sg * cj, m))
            if lhs != rhs:
                raise ArithmeticError("pair derivation map is not equivariant")


def _build_view(amb, tag, tl, vecs, labels, dpair, tor_amb, depth):
    if depth > 2:
        raise AssertionError("eigenbasis rebase did not stabilize")
    n0 = len(vecs)
    bc = bt.BatchCoords(vecs)
    big = isinstance(amb, JordanAlg) and amb.form is None and amb.dim >= 15
    if big:
        stab, tform, dtfull, damb = _pair_tables_big(amb, tl, vecs, bc)
    else:
        stab, tform, dtfull, damb = _pair_tables_small(amb, tl, vecs, bc, dpair)
    pairs = sorted(dtfull)
    flats = {p: _flat(dtfull[p]) for p in pairs}
    nzpairs = [p for p in pairs if any(flats[p])]
    if nzpairs:
        sel = bt.independent_rows([flats[p] for p in nzpairs])
        span_pairs = [nzpairs[i] for i in sel]
    else:
        span_pairs = []
    dspan0 = [dtfull[p] for p in span_pairs]
    if tor_amb is not None:
        tor_res = []
        for t in tor_amb:
            colco = bc.coords_rows([la.mat_vec(t, v) for v in vecs])
            tor_res.append(la.transpose(colco))
        if any(_offdiag(t) for t in tor_res):
            raise ArithmeticError("torus stayed non-diagonal after a rebase")
    else:
        coeffs = _diagonal_coeffs(dspan0, n0) if dspan0 else []
        if not coeffs and dspan0:
            coeffs = _toral_search(dspan0)
        tor_res = [_mat_combo(dspan0, co) for co in coeffs]
        if any(_offdiag(t) for t in tor_res):
            # move to a common eigenbasis of the discovered torus, then
            # rebuild every table in the new coordinates
            vnew, _ = bt.simultaneous_eigenbasis(tor_res)
            newvecs = [la.normalize_primitive(_vec_combo(vecs, co)) for co in vnew]
            toramb = [_mat_combo([damb[p] for p in span_pairs], co)
                      for co in coeffs]
            newlabels = ["%s0_%d" % (tag, i) for i in range(n0)]
            return _build_view(amb, tag, tl, newvecs, newlabels, dpair,
                               toramb, depth + 1)
    weights = [tuple(t[i][i] for t in tor_res) for i in range(n0)]
    if dspan0:
        if tor_res:
            # ad t scales the matrix unit E_ab by w_a - w_b when t is
            # diagonal, so the joint eigenspaces of the span are its
            # slices by the weight-difference class of the support; each
            # slice of a span element stays in the span
            byclass = {}
            for a in range(n0):
                for b in range(n0):
                    mu = tuple(wa - wb for wa, wb in zip(weights[a], weights[b]))
                    byclass.setdefault(mu, []).append((a, b))
            dspan, dweights = [], []
            for mu in sorted(byclass):
                pos = byclass[mu]
                rows = [r for r in ([m[a][b] for (a, b) in pos] for m in dspan0)
                        if any(r)]
                if not rows:
                    continue
                for i in bt.independent_rows(rows):
                    piece = la.zeros(n0, n0)
                    for (a, b), v in zip(pos, rows[i]):
                        piece[a][b] = v
                    dspan.append(piece)
                    dweights.append(mu)
            if len(dspan) != len(dspan0):
                raise ArithmeticError("weight slices lost derivation rank")
        else:
            dspan = dspan0
            dweights = [() for _ in dspan0]
        fbc = bt.BatchCoords([_flat(m) for m in dspan])
        allco = fbc.coords_rows([flats[p] for p in pairs])
        dcoords = {p: allco[idx] for idx, p in enumerate(pairs)}
        tor_coords = fbc.coords_rows([_flat(t) for t in tor_res])
    else:
        dspan = []
        dweights = []
        dcoords = {p: [] for p in pairs}
        tor_coords = []
    if span_pairs:
        tint, _ = _amb_int(amb)
        _leibniz_check(tint, [damb[p] for p in span_pairs])
    if n0 <= 8:
        _equivariance_check(dspan0, dtfull, n0)
    return TraceAdmissible(tag, amb, vecs, labels, weights, stab, tform,
                           dtfull, dcoords, dspan, dweights, tor_coords)


@lru_cache(maxsize=None)
def trace_admissible_view(amb):
    """Trace-zero view of a composition or Jordan algebra.

    The normalized trace is half the composition trace, or the generic
    trace over the degree; both make the unit trace to 1 and keep the
    trace form associative.  Spin factors use the bilinear-form pair map
    as their derivation convention; everything else uses the inner pair
    derivations of the ambient algebra.  The result is cached per object.
    """
    if isinstance(amb, CompAlg):
        tag = amb.kind
        tl = [amb.trace(la.basis_vec(amb.dim, i)) * HALF
              for i in range(amb.dim)]

        def dpair(x, y):
            return comp_derivation(amb, x, y)
    elif isinstance(amb, JordanAlg):
        tag = amb.kind
        tl = [tv / amb.degree for tv in amb.tracev]
        if amb.form is not None:
            def dpair(x, y):
                return _spin_pair_map(amb, x, y)
        else:
            def dpair(x, y):
                return jordan_derivation(amb, x, y)
    else:
        raise TypeError("expected a composition or Jordan algebra")
    vecs = la.kernel_basis([tl], amb.dim)
    if not vecs:
        return TraceAdmissible(tag, amb, [], [], [], [], [], {}, {}, [], [], [])
    labels = _x0_labels(tag, amb.labels, vecs)
    return _build_view(amb, tag, tl, vecs, labels, dpair, None, 0)
