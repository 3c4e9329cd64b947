"""Classical matrix Lie algebras and the three tensor-space families.

The orthogonal and symplectic algebras are realized on split bilinear
forms (hyperbolic planes, plus a one-dimensional tail in odd dimension),
so each one comes with a torus that acts diagonally on the natural basis.
The three reductive-pair families on V1 (+) V2, sl2 (x) sym0(V2) and
sl(V1) (x) sl(V2) are produced directly from their closed product
formulas, with exact rational coefficients.
"""

from fractions import Fraction

from . import linalg as la
from .algebra import Algebra, LYAlgebra
from .buildtools import (MatSpanSolver, _Coords, operator_algebra_from_basis,
                         simultaneous_eigenbasis, sp_mul)
from .envelope import SpMat, sp_commutator

F0 = Fraction(0)
F1 = Fraction(1)
F2 = Fraction(2)


class BilinForm:
    """Nondegenerate bilinear form, symmetric (eps=1) or skew (eps=-1)."""

    def __init__(self, gram: la.Matrix, eps: int):
        if eps not in (1, -1):
            raise ValueError("eps must be +-1")
        n = len(gram)
        for i in range(n):
            for j in range(n):
                if gram[i][j] != eps * gram[j][i]:
                    raise ValueError("gram matrix has the wrong symmetry")
        if la.rank(gram) != n:
            raise ValueError("form is degenerate")
        self.gram = [[Fraction(v) for v in row] for row in gram]
        self.eps = eps
        self.dim = n

    def apply(self, u: la.Vec, v: la.Vec) -> Fraction:
        return sum((u[i] * self.gram[i][j] * v[j]
                    for i in range(self.dim) for j in range(self.dim)), F0)


def split_sym_form(n: int, tail: int = 1) -> BilinForm:
    return BilinForm(la.sym_split_gram(n, tail=tail), 1)


def split_skew_form(n: int) -> BilinForm:
    return BilinForm(la.skew_split_gram(n), -1)


def form_torus_weights(form: BilinForm):
    """Per-V-basis-vector weight tuples for the standard torus of the
    split form: hyperbolic pair a contributes (+1, -1) in slot a."""
    m = form.dim // 2
    out = []
    for i in range(form.dim):
        w = [F0] * m
        if i < 2 * m:
            w[i // 2] = F1 if i % 2 == 0 else -F1
        out.append(tuple(w))
    return m, out


def phi_map(form: BilinForm, i: int, j: int) -> SpMat:
    """The map z -> phi(e_i, z) e_j - eps phi(e_j, z) e_i as a matrix."""
    out: SpMat = {}
    for c in range(form.dim):
        if form.gram[i][c] != 0:
            out[(j, c)] = out.get((j, c), F0) + form.gram[i][c]
        if form.gram[j][c] != 0:
            out[(i, c)] = out.get((i, c), F0) - form.eps * form.gram[j][c]
    return {k: v for k, v in out.items() if v != 0}


def skew_map_family(form: BilinForm, name: str = "") -> Algebra:
    """so(V, phi) or sp(V, phi) on its phi_{v,w} basis, torus included."""
    n = form.dim
    pairs = [(i, j) for i in range(n) for j in range(i + (1 if form.eps == 1 else 0), n)]
    mats = [phi_map(form, i, j) for (i, j) in pairs]
    r, vw = form_torus_weights(form)
    weights = [tuple(a + b for a, b in zip(vw[i], vw[j])) for (i, j) in pairs]
    cartan = []
    for a in range(r):
        idx = pairs.index((2 * a, 2 * a + 1))
        h = la.zero_vec(len(pairs))
        h[idx] = -F1
        cartan.append(h)
    labels = ["phi(%d,%d)" % p for p in pairs]
    return operator_algebra_from_basis(mats, labels=labels, name=name,
                                       weights=weights, cartan=cartan)


def sl_ops(n: int):
    """Operator basis of sl(n): the n-1 simple coroot diagonals first,
    then off-diagonal units.  Returns (mats, labels, weights, cartan)."""
    mats = []
    labels = []
    weights = []
    for t in range(n - 1):
        mats.append({(t, t): F1, (t + 1, t + 1): -F1})
        labels.append("h%d" % t)
        weights.append(tuple([F0] * (n - 1)))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            mats.append({(i, j): F1})
            labels.append("E(%d,%d)" % (i, j))
            w = []
            for t in range(n - 1):
                w.append(Fraction((1 if i == t else (-1 if i == t + 1 else 0))
                                  - (1 if j == t else (-1 if j == t + 1 else 0))))
            weights.append(tuple(w))
    cartan = [la.basis_vec(len(mats), t) for t in range(n - 1)]
    return mats, labels, weights, cartan


def build_matrix_lie(kind: str, n: int, tail: int = 1, name: str = "") -> Algebra:
    """Split classical Lie algebra on its canonical operator basis."""
    if kind == "sl":
        mats, labels, weights, cartan = sl_ops(n)
        return operator_algebra_from_basis(mats, labels=labels,
                                           name=name or "sl%d" % n,
                                           weights=weights, cartan=cartan)
    if kind == "gl":
        mats = []
        labels = []
        weights = []
        for i in range(n):
            for j in range(n):
                mats.append({(i, j): F1})
                labels.append("E(%d,%d)" % (i, j))
                weights.append(tuple(Fraction((1 if i == t else 0)
                                              - (1 if j == t else 0))
                                     for t in range(n)))
        cartan = [la.basis_vec(n * n, i * n + i) for i in range(n)]
        return operator_algebra_from_basis(mats, labels=labels,
                                           name=name or "gl%d" % n,
                                           weights=weights, cartan=cartan)
    if kind == "so":
        return skew_map_family(split_sym_form(n, tail=tail),
                               name=name or "so%d" % n)
    if kind == "sp":
        if n % 2:
            raise ValueError("sp needs an even-dimensional space")
        return skew_map_family(split_skew_form(n), name=name or "sp%d" % n)
    raise ValueError("unknown kind %r" % kind)


def lts_orthosymplectic_sum(form1: BilinForm, form2: BilinForm,
                            name: str = "") -> LYAlgebra:
    """Lie triple system V1 (x) V2 inside skew(V1 (+) V2).

    Binary product is zero; the ternary product applies the form-pair maps
    componentwise.  Reducible parameter ranges are built anyway and noted.
    """
    if form1.eps != form2.eps:
        raise ValueError("forms must share eps")
    eps = Fraction(form1.eps)
    n1, n2 = form1.dim, form2.dim
    g1, g2 = form1.gram, form2.gram

    def idx(a, b):
        return a * n2 + b

    ternary = {}
    dim = n1 * n2
    for i in range(dim):
        a1, b1 = divmod(i, n2)
        for j in range(i + 1, dim):
            a2, b2 = divmod(j, n2)
            for k in range(dim):
                a3, b3 = divmod(k, n2)
                acc: dict[int, Fraction] = {}
                c = g2[b1][b2]
                if c != 0:
                    if g1[a1][a3] != 0:
                        l = idx(a2, b3)
                        acc[l] = acc.get(l, F0) + c * g1[a1][a3]
                    if g1[a2][a3] != 0:
                        l = idx(a1, b3)
                        acc[l] = acc.get(l, F0) - eps * c * g1[a2][a3]
                c = g1[a1][a2]
                if c != 0:
                    if g2[b1][b3] != 0:
                        l = idx(a3, b2)
                        acc[l] = acc.get(l, F0) + c * g2[b1][b3]
                    if g2[b2][b3] != 0:
                        l = idx(a3, b1)
                        acc[l] = acc.get(l, F0) - eps * c * g2[b2][b3]
                ent = sorted((l, v) for l, v in acc.items() if v != 0)
                if ent:
                    ternary[(i, j, k)] = ent
    labels = ["x%d*y%d" % divmod(i, n2) for i in range(dim)]
    ly = LYAlgebra(dim, {}, ternary, labels=labels, name=name)
    r1, vw1 = form_torus_weights(form1)
    r2, vw2 = form_torus_weights(form2)
    ly.weights = [vw1[i // n2] + vw2[i % n2] for i in range(dim)]
    if form1.eps == 1 and (n1 == 2 or (n1 == 1 and n2 <= 2)):
        ly.notes.append("reducible module for the even part")
    return ly


def _sp_trace_mul(a: SpMat, b: SpMat) -> Fraction:
    return sum((v * b[(c, r)] for (r, c), v in a.items() if (c, r) in b), F0)


def _sp_anticommutator(a: SpMat, b: SpMat) -> SpMat:
    out = sp_mul(a, b)
    for k, v in sp_mul(b, a).items():
        out[k] = out.get(k, F0) + v
    return {k: v for k, v in out.items() if v != 0}


def sym0_basis(form: BilinForm):
    """Weight-adapted basis of the trace-zero phi-symmetric maps.

    Solved from the defining equations, then refined into a simultaneous
    eigenbasis of the standard torus of skew(V, phi).  Returns
    (mats, weight tuples).
    """
    n = form.dim
    g = form.gram
    eqs = []
    # f^T G = G f, entry by entry, over row-major unknowns f[r][c]
    for i in range(n):
        for j in range(n):
            row = la.zero_vec(n * n)
            for k in range(n):
                row[k * n + i] += g[k][j]
                row[k * n + j] -= g[i][k]
            eqs.append(row)
    tr = la.zero_vec(n * n)
    for r in range(n):
        tr[r * n + r] = F1
    eqs.append(tr)
    ker = la.kernel_basis(eqs)
    m, _ = form_torus_weights(form)
    hmats = [{k: -v for k, v in phi_map(form, 2 * a, 2 * a + 1).items()}
             for a in range(m)]
    solver = _Coords([list(v) for v in ker])
    restricted = []
    for h in hmats:
        cols = []
        for v in ker:
            fm = {(r, c): v[r * n + c] for r in range(n) for c in range(n)
                  if v[r * n + c] != 0}
            cm = sp_commutator(h, fm)
            flat = la.zero_vec(n * n)
            for (r, c), val in cm.items():
                flat[r * n + c] = val
            co = solver.coords(flat)
            if co is None:
                raise ArithmeticError("torus does not preserve sym0")
            cols.append(co)
        restricted.append(la.transpose(cols))
    vecs, tups = simultaneous_eigenbasis(restricted)
    mats = []
    for co in vecs:
        flat = la.zero_vec(n * n)
        for c, kv in zip(co, ker):
            if c != 0:
                flat = [x + c * y for x, y in zip(flat, kv)]
        flat = la.normalize_primitive(flat)
        mats.append({(r, c): flat[r * n + c] for r in range(n)
                     for c in range(n) if flat[r * n + c] != 0})
    return mats, tups


SL2_OPS = [
    {(0, 0): F1, (1, 1): -F1},        # h
    {(0, 1): F1},                     # e
    {(1, 0): F1},                     # f
]
SL2_WEIGHTS = [(F0,), (F2,), (-F2,)]


def ly_sp_tensor_sym(n2: int, eps2: int, name: str = "") -> LYAlgebra:
    """LY-algebra sl2 (x) sym0(V2) from the closed product formulas."""
    if eps2 == -1 and (n2 % 2 or n2 < 4):
        raise ValueError("skew V2 needs even dimension >= 4")
    if eps2 == 1 and n2 < 3:
        raise ValueError("symmetric V2 needs dimension >= 3")
    form2 = split_sym_form(n2) if eps2 == 1 else split_skew_form(n2)
    amats = SL2_OPS
    asolver = MatSpanSolver(amats)
    fmats, fweights = sym0_basis(form2)
    fsolver = MatSpanSolver(fmats)
    na, nf = len(amats), len(fmats)
    dim = na * nf
    ninv = Fraction(1, n2)

    def acoords(m):
        co = asolver.coords(m)
        if co is None:
            raise ArithmeticError("left factor escaped sl2")
        return co

    def fcoords(m):
        co = fsolver.coords(m)
        if co is None:
            raise ArithmeticError("right factor escaped sym0")
        return co

    def tensor_entry(ca, cf):
        return sorted((s * nf + t, va * vf)
                      for s, va in enumerate(ca) if va != 0
                      for t, vf in enumerate(cf) if vf != 0)

    binary = {}
    ternary = {}
    for i in range(dim):
        s1, t1 = divmod(i, nf)
        for j in range(i + 1, dim):
            s2, t2 = divmod(j, nf)
            comm_a = sp_commutator(amats[s1], amats[s2])
            anti_f = _sp_anticommutator(fmats[t1], fmats[t2])
            trf = _sp_trace_mul(fmats[t1], fmats[t2])
            adj = dict(anti_f)
            if trf != 0:
                for d in range(n2):
                    adj[(d, d)] = adj.get((d, d), F0) - 2 * ninv * trf
            adj = {k: v for k, v in adj.items() if v != 0}
            ca = [v / 2 for v in acoords(comm_a)]
            cf = fcoords(adj)
            ent = [(l, v) for l, v in tensor_entry(ca, cf) if v != 0]
            if ent:
                binary[(i, j)] = ent
            tra = _sp_trace_mul(amats[s1], amats[s2])
            for k in range(dim):
                s3, t3 = divmod(k, nf)
                acc: dict[int, Fraction] = {}
                if trf != 0:
                    dd = acoords(sp_commutator(comm_a, amats[s3]))
                    for l, v in tensor_entry([x * ninv * trf for x in dd],
                                             la.basis_vec(nf, t3)):
                        acc[l] = acc.get(l, F0) + v
                if tra != 0:
                    ff = fcoords(sp_commutator(
                        sp_commutator(fmats[t1], fmats[t2]), fmats[t3]))
                    for l, v in tensor_entry(la.basis_vec(na, s3),
                                             [x * tra / 2 for x in ff]):
                        acc[l] = acc.get(l, F0) + v
                ent = sorted((l, v) for l, v in acc.items() if v != 0)
                if ent:
                    ternary[(i, j, k)] = ent
    labels = ["a%d*f%d" % divmod(i, nf) for i in range(dim)]
    ly = LYAlgebra(dim, binary, ternary, labels=labels, name=name)
    ly.weights = [SL2_WEIGHTS[i // nf] + fweights[i % nf] for i in range(dim)]
    return ly


def ly_sl_tensor_sl(n1: int, n2: int, name: str = "") -> LYAlgebra:
    """LY-algebra sl(V1) (x) sl(V2) from the closed product formulas."""
    if not (2 <= n1 <= n2):
        raise ValueError("need 2 <= n1 <= n2")
    amats, _, aweights, _ = sl_ops(n1)
    fmats, _, fweights, _ = sl_ops(n2)
    asolver = MatSpanSolver(amats)
    fsolver = MatSpanSolver(fmats)
    na, nf = len(amats), len(fmats)
    dim = na * nf
    inv1, inv2 = Fraction(1, n1), Fraction(1, n2)

    def coords_or_die(solver, m, side):
        co = solver.coords(m)
        if co is None:
            raise ArithmeticError("%s factor escaped sl" % side)
        return co

    def traceless_anti(mats, idx1, idx2, n, inv):
        out = _sp_anticommutator(mats[idx1], mats[idx2])
        tr = _sp_trace_mul(mats[idx1], mats[idx2])
        if tr != 0:
            for d in range(n):
                out[(d, d)] = out.get((d, d), F0) - 2 * inv * tr
        return {k: v for k, v in out.items() if v != 0}, tr

    def tensor_entry(ca, cf):
        return sorted((s * nf + t, va * vf)
                      for s, va in enumerate(ca) if va != 0
                      for t, vf in enumerate(cf) if vf != 0)

    binary = {}
    ternary = {}
    for i in range(dim):
        s1, t1 = divmod(i, nf)
        for j in range(i + 1, dim):
            s2, t2 = divmod(j, nf)
            comm_a = sp_commutator(amats[s1], amats[s2])
            comm_f = sp_commutator(fmats[t1], fmats[t2])
            anti_f, trf = traceless_anti(fmats, t1, t2, n2, inv2)
            anti_a, tra = traceless_anti(amats, s1, s2, n1, inv1)
            acc: dict[int, Fraction] = {}
            ca = [v / 2 for v in coords_or_die(asolver, comm_a, "left")]
            cf = coords_or_die(fsolver, anti_f, "right")
            for l, v in tensor_entry(ca, cf):
                acc[l] = acc.get(l, F0) + v
            ca2 = coords_or_die(asolver, anti_a, "left")
            cf2 = [v / 2 for v in coords_or_die(fsolver, comm_f, "right")]
            for l, v in tensor_entry(ca2, cf2):
                acc[l] = acc.get(l, F0) + v
            ent = sorted((l, v) for l, v in acc.items() if v != 0)
            if ent:
                binary[(i, j)] = ent
            for k in range(dim):
                s3, t3 = divmod(k, nf)
                acc = {}
                if trf != 0:
                    dd = coords_or_die(
                        asolver, sp_commutator(comm_a, amats[s3]), "left")
                    for l, v in tensor_entry([x * inv2 * trf for x in dd],
                                             la.basis_vec(nf, t3)):
                        acc[l] = acc.get(l, F0) + v
                if tra != 0:
                    ff = coords_or_die(
                        fsolver, sp_commutator(comm_f, fmats[t3]), "right")
                    for l, v in tensor_entry(la.basis_vec(na, s3),
                                             [x * inv1 * tra for x in ff]):
                        acc[l] = acc.get(l, F0) + v
                ent = sorted((l, v) for l, v in acc.items() if v != 0)
                if ent:
                    ternary[(i, j, k)] = ent
    labels = ["a%d*f%d" % divmod(i, nf) for i in range(dim)]
    ly = LYAlgebra(dim, binary, ternary, labels=labels, name=name)
    ly.weights = [aweights[i // nf] + fweights[i % nf] for i in range(dim)]
    return ly


def check_coincidence(a: LYAlgebra, b: LYAlgebra, basis_map: la.Matrix) -> bool:
    """True iff basis_map carries both products of a exactly onto b.

    basis_map columns are the images in b of a's basis vectors; it must be
    invertible (ValueError otherwise).
    """
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    n = a.dim
    if la.rank(basis_map) != n:
        raise ValueError("basis map is not invertible")
    imgs = [[basis_map[r][c] for r in range(n)] for c in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            av = [F0] * n
            for l, v in a.b(i, j):
                av[l] = v
            if la.mat_vec(basis_map, av) != b.binary_vec(imgs[i], imgs[j]):
                return False
            for k in range(n):
                av = [F0] * n
                for l, v in a.t(i, j, k):
                    av[l] = v
                if la.mat_vec(basis_map, av) != b.ternary_vec(
                        imgs[i], imgs[j], imgs[k]):
                    return False
    return True
