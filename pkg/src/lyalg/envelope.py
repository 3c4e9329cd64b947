"""Standard enveloping algebra of a binary-ternary algebra, and the way back.

The enveloping construction puts the span of the inner maps D(x, y) =
[x, y, .] in front of m and defines

    [D, D']  = matrix commutator, re-expressed in the chosen D-basis,
    [D, x]   = D x,
    [x, y]   = D(x, y) + x.y .

Everything is exact.  Independent D-generators are selected with a mod-p
elimination, then certified over Q: the selected set is independent because
its mod-p rank equals its size, and it spans because every generator (and
every commutator) is re-expressed in it with exact coordinates that are
verified entry by entry.  A commutator that fails to lie in the span is a
genuine sixth-axiom failure and is reported as such, never papered over.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .algebra import Algebra, LYAlgebra, Sparse
from .fastnum import PRIMES
from .linalg import F0, Vec, inv as mat_inv, mat_vec

SpMat = dict[tuple[int, int], Fraction]  # (row, col) -> coeff, zero entries absent


class LYStructureError(Exception):
    """Raised when the formal enveloping bracket cannot close (axiom failure)."""

    def __init__(self, axiom: str, witness: tuple):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} fails at {witness}")


def d_op_sparse(ly: LYAlgebra, i: int, j: int) -> SpMat:
    out: SpMat = {}
    for k in range(ly.dim):
        for l, c in ly.t(i, j, k):
            out[(l, k)] = c
    return out


def sp_commutator(a: SpMat, b: SpMat) -> SpMat:
    bycol_a: dict[int, list] = {}
    for (r, c), v in a.items():
        bycol_a.setdefault(r, []).append((c, v))
    bycol_b: dict[int, list] = {}
    for (r, c), v in b.items():
        bycol_b.setdefault(r, []).append((c, v))
    out: SpMat = {}
    for (r, m), v in a.items():
        for c, w in bycol_b.get(m, []):
            key = (r, c)
            out[key] = out.get(key, F0) + v * w
    for (r, m), v in b.items():
        for c, w in bycol_a.get(m, []):
            key = (r, c)
            out[key] = out.get(key, F0) - v * w
    return {k: v for k, v in out.items() if v != 0}


class _ClassSolver:
    """Basis selection and exact coordinates inside one weight class of maps."""

    def __init__(self, vectors: list[SpMat], prime_idx: int = 0):
        self.support = sorted({k for v in vectors for k in v})
        self.pos = {k: i for i, k in enumerate(self.support)}
        self.vectors = vectors
        p = PRIMES[prime_idx]
        ns = len(self.support)
        basis_mod = np.zeros((0, ns), dtype=np.int64)
        piv_of_row: list[int] = []
        self.chosen: list[int] = []
        for idx, v in enumerate(vectors):
            row = self._row_mod(v, p)
            for bi, pc in enumerate(piv_of_row):
                if row[pc]:
                    row = (row - row[pc] * basis_mod[bi]) % p
            nz = np.nonzero(row)[0]
            if len(nz) == 0:
                continue
            pc = int(nz[0])
            row = row * pow(int(row[pc]), p - 2, p) % p
            basis_mod = np.vstack([basis_mod, row])
            piv_of_row.append(pc)
            self.chosen.append(idx)
        self.pivcols = piv_of_row
        # exact inverse of the pivot submatrix (rows: pivot coords, cols: chosen)
        sub_t = [[vectors[ci].get(self.support[pc], F0) for ci in self.chosen]
                 for pc in self.pivcols]
        self.pinv = mat_inv(sub_t) if self.chosen else []

    def _row_mod(self, v: SpMat, p: int) -> np.ndarray:
        row = np.zeros(len(self.support), dtype=np.int64)
        den = 1
        for x in v.values():
            den = den * x.denominator // gcd(den, x.denominator)
        for k, x in v.items():
            row[self.pos[k]] = int(x * den) % p
        return row

    def coords(self, v: SpMat) -> list[Fraction] | None:
        """Exact coordinates of v in the chosen vectors, or None if outside."""
        if any(k not in self.pos for k in v):
            return None
        if not self.chosen:
            return None if v else []
        rhs = [v.get(self.support[pc], F0) for pc in self.pivcols]
        c = mat_vec(self.pinv, rhs)
        # verify on the full support
        resid = dict(v)
        for ct, ci in zip(c, self.chosen):
            if ct == 0:
                continue
            for k, x in self.vectors[ci].items():
                resid[k] = resid.get(k, F0) - ct * x
        if any(x != 0 for x in resid.values()):
            return None
        return c


@dataclass
class EnvelopingPair:
    """A Lie algebra with a marked reductive split g = h (+) m."""
    g: Algebra
    h_index: list[int]
    m_index: list[int]
    d_pairs: list[tuple[int, int]]
    ly: LYAlgebra


def build_enveloping(ly: LYAlgebra) -> EnvelopingPair:
    n = ly.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ops = {(i, j): d_op_sparse(ly, i, j) for (i, j) in pairs}

    if ly.weights is not None:
        def wkey(i, j):
            return tuple(a + b for a, b in zip(ly.weights[i], ly.weights[j]))
    else:
        def wkey(i, j):
            return ()

    classes: dict[tuple, list] = {}
    for (i, j) in pairs:
        if ops[(i, j)]:
            classes.setdefault(wkey(i, j), []).append((i, j))

    solvers: dict[tuple, _ClassSolver] = {}
    basis_pairs: list[tuple[int, int]] = []
    class_offset: dict[tuple, int] = {}
    gen_coords: dict[tuple[int, int], Sparse] = {}
    class_coords: dict[tuple, list] = {}
    for key in sorted(classes):
        vecs = [ops[pq] for pq in classes[key]]
        for attempt in range(len(PRIMES)):
            sv = _ClassSolver(vecs, prime_idx=attempt)
            all_c = [sv.coords(v) for v in vecs]
            if all(c is not None for c in all_c):
                break
        else:
            raise ArithmeticError("generator span not certified at any prime")
        solvers[key] = sv
        class_offset[key] = len(basis_pairs)
        class_coords[key] = all_c
        basis_pairs.extend(classes[key][ci] for ci in sv.chosen)

    b = len(basis_pairs)
    for key, plist in classes.items():
        off = class_offset[key]
        for pq, c in zip(plist, class_coords[key]):
            gen_coords[pq] = [(off + t, x) for t, x in enumerate(c) if x != 0]

    def coords_of(mat: SpMat, key: tuple, witness) -> Sparse:
        if not mat:
            return []
        sv = solvers.get(key)
        c = sv.coords(mat) if sv is not None else None
        if c is None:
            raise LYStructureError("LY6", witness)
        off = class_offset[key]
        return [(off + t, x) for t, x in enumerate(c) if x != 0]

    dim_g = b + n
    table: dict[tuple[int, int], Sparse] = {}
    # h-h: commutators of the basis maps
    for s in range(b):
        ps = basis_pairs[s]
        for t in range(s + 1, b):
            pt = basis_pairs[t]
            comm = sp_commutator(ops[ps], ops[pt])
            key = tuple(a + c for a, c in zip(wkey(*ps), wkey(*pt)))
            ent = coords_of(comm, key, (ps, pt))
            if ent:
                table[(s, t)] = ent
    # h-m: the maps acting
    for t, pt in enumerate(basis_pairs):
        for k in range(n):
            ent = [(b + l, c) for l, c in ly.t(pt[0], pt[1], k)]
            if ent:
                table[(t, b + k)] = ent
    # m-m: D(x, y) + x.y
    for (i, j) in pairs:
        ent = list(gen_coords.get((i, j), []))
        ent += [(b + k, c) for k, c in ly.b(i, j)]
        if ent:
            table[(b + i, b + j)] = sorted(ent)

    labels = [f"D({ly.labels[i]},{ly.labels[j]})" for (i, j) in basis_pairs]
    labels += list(ly.labels)
    g = Algebra(dim_g, table, labels=labels,
                name=f"env({ly.name})" if ly.name else "env")
    if ly.weights is not None:
        g.weights = [wkey(*pq) for pq in basis_pairs] + list(ly.weights)
    return EnvelopingPair(g, list(range(b)), list(range(b, dim_g)),
                          basis_pairs, ly)


def ly_from_reductive_indices(g: Algebra, h_index: list[int],
                              m_index: list[int], name: str = "") -> LYAlgebra:
    """Binary-ternary algebra on the m-part of a split given by basis indices."""
    hset = set(h_index)
    mpos = {gi: a for a, gi in enumerate(m_index)}
    if hset & set(mpos) or len(h_index) + len(m_index) != g.dim:
        raise ValueError("h and m indices must partition the basis")
    nm = len(m_index)

    def proj_m(ent: Sparse) -> Sparse:
        return [(mpos[k], c) for k, c in ent if k in mpos]

    def proj_h(ent: Sparse) -> Sparse:
        return [(k, c) for k, c in ent if k in hset]

    binary = {}
    ternary = {}
    for a in range(nm):
        for bb in range(a + 1, nm):
            ent = g.bk(m_index[a], m_index[bb])
            binary[(a, bb)] = proj_m(ent)
            hpart = proj_h(ent)
            for k in range(nm):
                acc: dict[int, Fraction] = {}
                for hidx, c in hpart:
                    for l, d in g.bk(hidx, m_index[k]):
                        if l in mpos:
                            t = mpos[l]
                            acc[t] = acc.get(t, F0) + c * d
                ternary[(a, bb, k)] = [(t, v) for t, v in sorted(acc.items()) if v != 0]
    ly = LYAlgebra(nm, binary, ternary,
                   labels=[g.labels[i] for i in m_index], name=name)
    if g.weights is not None:
        ly.weights = [g.weights[i] for i in m_index]
    return ly


def ly_from_reductive(g: Algebra, h_basis: list[Vec], m_basis: list[Vec],
                      name: str = "") -> LYAlgebra:
    """General-position version: h and m given by spanning vectors."""
    basis = list(h_basis) + list(m_basis)
    if len(basis) != g.dim:
        raise ValueError("h and m must together have full dimension")
    binv = mat_inv([[basis[j][i] for j in range(g.dim)] for i in range(g.dim)])
    nh, nm = len(h_basis), len(m_basis)

    def split(v: Vec) -> tuple[Vec, Vec]:
        c = mat_vec(binv, v)
        return c[:nh], c[nh:]

    def bin_bk(a, bb):
        _, mm = split(g.bracket(m_basis[a], m_basis[bb]))
        return list(enumerate(mm))

    cache: dict[tuple[int, int], Vec] = {}

    def ter_bk(a, bb, k):
        key = (a, bb)
        if key not in cache:
            hh, _ = split(g.bracket(m_basis[a], m_basis[bb]))
            cache[key] = [sum((hh[t] * h_basis[t][i] for t in range(nh)), F0)
                          for i in range(g.dim)]
        _, mm = split(g.bracket(cache[key], m_basis[k]))
        return list(enumerate(mm))

    return LYAlgebra.from_ops(nm, bin_bk, ter_bk, name=name)


def is_reductive_split(g: Algebra, h_index: list[int], m_index: list[int]) -> bool:
    """[h, h] in h and [h, m] in m on the given index split."""
    hset, mset = set(h_index), set(m_index)
    for i in h_index:
        for j in h_index:
            if i < j and any(k not in hset for k, _ in g.bk(i, j)):
                return False
        for j in m_index:
            if any(k not in mset for k, _ in g.bk(i, j)):
                return False
    return True
