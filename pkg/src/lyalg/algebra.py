"""Structure-constant containers for anticommutative and binary-ternary algebras.

An Algebra stores an anticommutative bilinear bracket on a based vector
space over Q; an LYAlgebra additionally stores a ternary bracket that is
anticommutative in its first two arguments.  Both keep sparse tables:
only pairs i < j (and triples with i < j) are stored, everything else
follows by sign.

Optional attributes carried by constructions and used by the checkers and
classifiers, never serialized: `weights` (a grading vector per basis index
making structure constants vanish off the grading) and `cartan` (vectors
spanning a split toral subalgebra whose ad-action is diagonal on the basis).
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import F0, Vec, fr

Sparse = list[tuple[int, Fraction]]


def _clean(entries) -> Sparse:
    out = [(int(k), fr(c)) for k, c in entries if c != 0]
    out.sort(key=lambda t: t[0])
    ks = [k for k, _ in out]
    if len(set(ks)) != len(ks):
        raise ValueError("duplicate target index in sparse entry")
    return out


def sparse_to_vec(entries: Sparse, dim: int) -> Vec:
    v = [F0] * dim
    for k, c in entries:
        v[k] = c
    return v


class Algebra:
    """Anticommutative algebra given by structure constants."""

    def __init__(self, dim: int, table: dict[tuple[int, int], Sparse],
                 labels: list[str] | None = None, name: str = ""):
        self.dim = dim
        self.labels = list(labels) if labels else [f"e{i}" for i in range(dim)]
        if len(self.labels) != dim:
            raise ValueError("label count != dim")
        self.table: dict[tuple[int, int], Sparse] = {}
        for (i, j), ent in table.items():
            if not (0 <= i < j < dim):
                raise ValueError(f"bad pair key ({i},{j})")
            ent = _clean(ent)
            if ent:
                if any(not 0 <= k < dim for k, _ in ent):
                    raise ValueError("target index out of range")
                self.table[(i, j)] = ent
        self.name = name
        self.weights: list[tuple] | None = None
        self.cartan: list[Vec] | None = None
        self._cache: dict = {}

    @classmethod
    def from_bracket(cls, dim: int, bk, labels=None, name: str = "") -> "Algebra":
        """Build from a callable bk(i, j) -> sparse entries or dense vector."""
        table = {}
        for i in range(dim):
            for j in range(i + 1, dim):
                v = bk(i, j)
                ent = list(enumerate(v)) if isinstance(v, list) and v and not isinstance(v[0], tuple) else v
                table[(i, j)] = _clean(ent)
        return cls(dim, table, labels=labels, name=name)

    def bk(self, i: int, j: int) -> Sparse:
        """[e_i, e_j] as sparse entries."""
        if i == j:
            return []
        if i < j:
            return self.table.get((i, j), [])
        return [(k, -c) for k, c in self.table.get((j, i), [])]

    def bracket(self, x: Vec, y: Vec) -> Vec:
        out = [F0] * self.dim
        nz_x = [(i, c) for i, c in enumerate(x) if c != 0]
        nz_y = [(j, c) for j, c in enumerate(y) if c != 0]
        for i, a in nz_x:
            for j, b in nz_y:
                if i == j:
                    continue
                ab = a * b
                for k, c in self.bk(i, j):
                    out[k] += ab * c
        return out

    def ad(self, x: Vec) -> list[Vec]:
        """Matrix of ad(x) = [x, .] acting on column coordinates."""
        cols = []
        for j in range(self.dim):
            col = [F0] * self.dim
            for i, a in enumerate(x):
                if a == 0 or i == j:
                    continue
                for k, c in self.bk(i, j):
                    col[k] += a * c
            cols.append(col)
        return [[cols[j][k] for j in range(self.dim)] for k in range(self.dim)]

    def nnz(self) -> int:
        return sum(len(v) for v in self.table.values())

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"<Algebra{tag} dim={self.dim} nnz={self.nnz()}>"


class LYAlgebra:
    """Binary-ternary algebra; both brackets anticommutative in the leading pair."""

    def __init__(self, dim: int,
                 binary: dict[tuple[int, int], Sparse],
                 ternary: dict[tuple[int, int, int], Sparse],
                 labels: list[str] | None = None, name: str = ""):
        self.dim = dim
        self.labels = list(labels) if labels else [f"e{i}" for i in range(dim)]
        if len(self.labels) != dim:
            raise ValueError("label count != dim")
        self.binary: dict[tuple[int, int], Sparse] = {}
        for (i, j), ent in binary.items():
            if not (0 <= i < j < dim):
                raise ValueError(f"bad pair key ({i},{j})")
            ent = _clean(ent)
            if ent:
                self.binary[(i, j)] = ent
        self.ternary: dict[tuple[int, int, int], Sparse] = {}
        for (i, j, k), ent in ternary.items():
            if not (0 <= i < j < dim and 0 <= k < dim):
                raise ValueError(f"bad triple key ({i},{j},{k})")
            ent = _clean(ent)
            if ent:
                self.ternary[(i, j, k)] = ent
        self.name = name
        self.weights: list[tuple] | None = None
        self.cartan: list[Vec] | None = None
        self.notes: list[str] = []
        self._cache: dict = {}

    @classmethod
    def from_ops(cls, dim: int, bin_bk, ter_bk, labels=None, name: str = "") -> "LYAlgebra":
        binary = {}
        ternary = {}
        for i in range(dim):
            for j in range(i + 1, dim):
                binary[(i, j)] = _clean(bin_bk(i, j))
                for k in range(dim):
                    ternary[(i, j, k)] = _clean(ter_bk(i, j, k))
        return cls(dim, binary, ternary, labels=labels, name=name)

    def b(self, i: int, j: int) -> Sparse:
        if i == j:
            return []
        if i < j:
            return self.binary.get((i, j), [])
        return [(k, -c) for k, c in self.binary.get((j, i), [])]

    def t(self, i: int, j: int, k: int) -> Sparse:
        if i == j:
            return []
        if i < j:
            return self.ternary.get((i, j, k), [])
        return [(l, -c) for l, c in self.ternary.get((j, i, k), [])]

    def binary_vec(self, x: Vec, y: Vec) -> Vec:
        out = [F0] * self.dim
        for i, a in enumerate(x):
            if a == 0:
                continue
            for j, b in enumerate(y):
                if b == 0 or i == j:
                    continue
                ab = a * b
                for k, c in self.b(i, j):
                    out[k] += ab * c
        return out

    def ternary_vec(self, x: Vec, y: Vec, z: Vec) -> Vec:
        out = [F0] * self.dim
        for i, a in enumerate(x):
            if a == 0:
                continue
            for j, b in enumerate(y):
                if b == 0 or i == j:
                    continue
                ab = a * b
                for k, c in enumerate(z):
                    if c == 0:
                        continue
                    abc = ab * c
                    for l, d in self.t(i, j, k):
                        out[l] += abc * d
        return out

    def d_op(self, i: int, j: int) -> list[Vec]:
        """Matrix of the inner map z -> [e_i, e_j, z]."""
        m = [[F0] * self.dim for _ in range(self.dim)]
        for k in range(self.dim):
            for l, c in self.t(i, j, k):
                m[l][k] = c
        return m

    def nnz(self) -> tuple[int, int]:
        return (sum(len(v) for v in self.binary.values()),
                sum(len(v) for v in self.ternary.values()))

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        nb, nt = self.nnz()
        return f"<LYAlgebra{tag} dim={self.dim} nnz=({nb},{nt})>"
