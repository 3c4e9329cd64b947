"""Reading and writing the on-disk JSON format.

One shared schema for both algebra kinds:

    {"dim": n, "labels": [...],
     "binary":  [[i, j, [[k, "c"], ...]], ...],
     "ternary": [[i, j, k, [[l, "c"], ...]], ...]}

Indices are 0-based with i < j; coefficients are rational strings ("3",
"-3/4").  A plain Lie algebra is a file with an empty "ternary" list.
Output is canonical: sorted keys and entries, compact separators, one
trailing newline, so printing is byte-deterministic and print-parse-print
is the identity.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import Algebra, LYAlgebra


def fr_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _coeffs_obj(entries):
    return [[k, fr_str(c)] for k, c in entries]


def _coeffs_parse(obj):
    return [(int(k), Fraction(str(c))) for k, c in obj]


def algebra_to_obj(alg: Algebra) -> dict:
    binary = [[i, j, _coeffs_obj(ent)] for (i, j), ent in sorted(alg.table.items())]
    return {"dim": alg.dim, "labels": list(alg.labels), "binary": binary, "ternary": []}


def ly_to_obj(ly: LYAlgebra) -> dict:
    binary = [[i, j, _coeffs_obj(ent)] for (i, j), ent in sorted(ly.binary.items())]
    ternary = [[i, j, k, _coeffs_obj(ent)] for (i, j, k), ent in sorted(ly.ternary.items())]
    return {"dim": ly.dim, "labels": list(ly.labels), "binary": binary, "ternary": ternary}


def obj_to_algebra(obj: dict, name: str = "") -> Algebra:
    if obj.get("ternary"):
        raise ValueError("file has ternary entries; load it as an LY algebra")
    table = {(int(i), int(j)): _coeffs_parse(ent) for i, j, ent in obj.get("binary", [])}
    return Algebra(int(obj["dim"]), table, labels=obj.get("labels"), name=name)


def obj_to_ly(obj: dict, name: str = "") -> LYAlgebra:
    binary = {(int(i), int(j)): _coeffs_parse(ent) for i, j, ent in obj.get("binary", [])}
    ternary = {(int(i), int(j), int(k)): _coeffs_parse(ent)
               for i, j, k, ent in obj.get("ternary", [])}
    return LYAlgebra(int(obj["dim"]), binary, ternary, labels=obj.get("labels"), name=name)


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def save(path: str, thing) -> None:
    obj = ly_to_obj(thing) if isinstance(thing, LYAlgebra) else algebra_to_obj(thing)
    with open(path, "w") as f:
        f.write(dumps(obj))


def load(path: str, mode: str = "auto"):
    """Load a JSON file; mode is 'lie', 'ly' or 'auto' (by ternary content)."""
    with open(path) as f:
        obj = json.load(f)
    if mode == "lie":
        return obj_to_algebra(obj)
    if mode == "ly":
        return obj_to_ly(obj)
    return obj_to_ly(obj) if obj.get("ternary") else obj_to_algebra(obj)
