"""JSON interchange for the library types.

Scalars are strings: ``"3"``, ``"-2/5"`` (reduced, positive denominator) or
``{"re": "1/2", "im": "-1"}`` for Gaussian rationals.  Every parse error is a
:class:`SchemaError` carrying a JSON pointer to the offending value.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from math import gcd

from .dgla import DglaPresentation, GradedElement
from .fedosov import CentralSeries, SymplecticModel, WeylElement, WeylForm
from .gerbe import ChainData, StackDatum
from .hochschild import AlgebraPresentation, HochschildCochain
from .scalars import ArtinianSeries, GaussianRational
from .simplicial import Cochain, DescentDatum, DglaMorphism, Nerve, SimplicialDglaSheaf

__all__ = ["SchemaError", "dumps", "loads", "to_json", "from_json", "scalar_to_json",
           "scalar_from_json", "dgla_to_json", "dgla_from_json", "element_to_json",
           "element_from_json", "same_dgla"]

_RAT = re.compile(r"^(-?)(0|[1-9][0-9]*)(?:/([1-9][0-9]*))?$")


class SchemaError(ValueError):
    def __init__(self, pointer, message):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")


def _ptr(path, *more):
    parts = list(path) + list(more)
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in parts) if parts else ""


# -- scalars ----------------------------------------------------------------------------

def _rat_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def scalar_to_json(c):
    if isinstance(c, GaussianRational):
        if c.im == 0:
            return _rat_str(c.re)
        return {"re": _rat_str(c.re), "im": _rat_str(c.im)}
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise TypeError(f"not an exact scalar: {c!r}")
    return _rat_str(c)


def _parse_rat(v, path):
    if isinstance(v, bool):
        raise SchemaError(_ptr(path), "booleans are not scalars")
    if isinstance(v, int):
        return v
    if not isinstance(v, str):
        raise SchemaError(_ptr(path), f"expected a rational string, got {type(v).__name__}")
    m = _RAT.match(v)
    if not m:
        raise SchemaError(_ptr(path), f"malformed rational {v!r}")
    sign, num, den = m.groups()
    num = int(num)
    if sign and num == 0:
        raise SchemaError(_ptr(path), "negative zero")
    if den is None:
        return -num if sign else num
    den = int(den)
    if den == 1 or gcd(num, den) != 1:
        raise SchemaError(_ptr(path), f"unreduced fraction {v!r}")
    if num == 0:
        raise SchemaError(_ptr(path), f"unreduced fraction {v!r}")
    return Fraction(-num if sign else num, den)


def scalar_from_json(v, path=()):
    if isinstance(v, dict):
        _keys(v, {"re", "im"}, path, required={"re", "im"})
        im = _parse_rat(v["im"], list(path) + ["im"])
        re_ = _parse_rat(v["re"], list(path) + ["re"])
        if im == 0:
            raise SchemaError(_ptr(path), "real value written as a Gaussian rational")
        return GaussianRational(re_, im)
    return _parse_rat(v, path)


# -- generic helpers --------------------------------------------------------------------

def _keys(obj, allowed, path, required=()):
    if not isinstance(obj, dict):
        raise SchemaError(_ptr(path), "expected an object")
    for k in required:
        if k not in obj:
            raise SchemaError(_ptr(path, k), "missing required field")
    for k in obj:
        if k not in allowed:
            raise SchemaError(_ptr(path, k), "unknown field")


def _int(v, path, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(_ptr(path), "expected an integer")
    if lo is not None and v < lo:
        raise SchemaError(_ptr(path), f"must be >= {lo}")
    return v


def _list(v, path, length=None):
    if not isinstance(v, list):
        raise SchemaError(_ptr(path), "expected an array")
    if length is not None and len(v) != length:
        raise SchemaError(_ptr(path), f"expected {length} entries, got {len(v)}")
    return v


def _matrix_from(v, path, rows=None, cols=None):
    _list(v, path, rows)
    out = []
    for i, row in enumerate(v):
        _list(row, list(path) + [i], cols)
        out.append([scalar_from_json(c, list(path) + [i, j]) for j, c in enumerate(row)])
    return out


def _matrix_to(M):
    return [[scalar_to_json(c) for c in row] for row in M]


def _vec_from(v, path, n=None):
    _list(v, path, n)
    return [scalar_from_json(c, list(path) + [i]) for i, c in enumerate(v)]


def _label(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise SchemaError(_ptr(path), "index labels must be integers or strings")
    return v


def _simplex(v, path):
    _list(v, path)
    return tuple(_label(x, list(path) + [i]) for i, x in enumerate(v))


def _type(obj, name, path):
    if not isinstance(obj, dict):
        raise SchemaError(_ptr(path), "expected an object")
    if obj.get("type") != name:
        raise SchemaError(_ptr(path, "type"), f"expected type {name!r}")


# -- ArtinianSeries ---------------------------------------------------------------------

def series_to_json(s: ArtinianSeries):
    return {"type": "ArtinianSeries", "trunc": s.trunc, "pole": s.pole,
            "coeffs": [scalar_to_json(c) for c in s.coeffs]}


def series_from_json(obj, path=()):
    _type(obj, "ArtinianSeries", path)
    _keys(obj, {"type", "trunc", "pole", "coeffs"}, path, {"trunc", "coeffs"})
    N = _int(obj["trunc"], list(path) + ["trunc"], 0)
    pole = _int(obj.get("pole", 0), list(path) + ["pole"], 0)
    if pole > 1:
        raise SchemaError(_ptr(path, "pole"), "pole order must be 0 or 1")
    cs = _vec_from(obj["coeffs"], list(path) + ["coeffs"], N + pole + 1)
    return ArtinianSeries(cs, N, pole)


# -- DGLA -------------------------------------------------------------------------------

def dgla_to_json(L: DglaPresentation):
    diff = {}
    for p in L.degrees:
        if (p + 1) not in L.dims:
            continue
        M = [[0] * L.dims[p] for _ in range(L.dims[p + 1])]
        nz = False
        for a in range(L.dims[p]):
            for r, c in L.basis_d(p, a):
                M[r][a] = c
                nz = True
        if nz:
            diff[str(p)] = _matrix_to(M)
    out = {"type": "DglaPresentation", "name": L.name,
           "dims": {str(p): n for p, n in L.dims.items()},
           "differential": diff,
           "bracket": [[p, a, q, b, k, scalar_to_json(c)]
                       for p, a, q, b, k, c in sorted(L.bracket_entries(), key=lambda e: e[:5])]}
    if L.labels:
        out["labels"] = {str(p): list(v) for p, v in L.labels.items()}
    return out


def _deg(s, path):
    try:
        return int(s)
    except (TypeError, ValueError):
        raise SchemaError(_ptr(path), f"degree key {s!r} is not an integer") from None


def dgla_from_json(obj, path=()):
    _type(obj, "DglaPresentation", path)
    _keys(obj, {"type", "name", "dims", "differential", "bracket", "labels"}, path, {"dims"})
    dims = {}
    if not isinstance(obj["dims"], dict):
        raise SchemaError(_ptr(path, "dims"), "expected an object")
    for k, v in obj["dims"].items():
        dims[_deg(k, list(path) + ["dims", k])] = _int(v, list(path) + ["dims", k], 0)
    diff = {}
    dd = obj.get("differential", {})
    if not isinstance(dd, dict):
        raise SchemaError(_ptr(path, "differential"), "expected an object")
    for k, M in dd.items():
        p = _deg(k, list(path) + ["differential", k])
        if p not in dims or (p + 1) not in dims:
            raise SchemaError(_ptr(path, "differential", k), "degree outside the presentation")
        M = _matrix_from(M, list(path) + ["differential", k], dims[p + 1], dims[p])
        diff[p] = [(r, a, M[r][a]) for r in range(dims[p + 1]) for a in range(dims[p]) if M[r][a]]
    br = []
    for i, e in enumerate(_list(obj.get("bracket", []), list(path) + ["bracket"])):
        ep = list(path) + ["bracket", i]
        _list(e, ep, 6)
        p, a, q, b, k = (_int(e[j], ep + [j]) for j in range(5))
        for deg, idx, j in ((p, a, 1), (q, b, 3), (p + q, k, 4)):
            if deg not in dims or not 0 <= idx < dims[deg]:
                raise SchemaError(_ptr(ep, j), "basis index out of range")
        br.append((p, a, q, b, k, scalar_from_json(e[5], ep + [5])))
    labels = obj.get("labels")
    if labels is not None:
        labels = {_deg(k, list(path) + ["labels", k]): list(v) for k, v in labels.items()}
    return DglaPresentation(dims, diff, br, name=obj.get("name", "L"), labels=labels)


def same_dgla(L1, L2):
    return (L1.dims == L2.dims and sorted(L1.bracket_entries()) == sorted(L2.bracket_entries())
            and sorted(L1.differential_entries()) == sorted(L2.differential_entries()))


def element_to_json(x: GradedElement):
    return {"type": "GradedElement", "trunc": x.trunc,
            "comps": {str(p): [[scalar_to_json(c) for c in row] for row in vec]
                      for p, vec in sorted(x.comps.items())}}


def element_from_json(obj, owner: DglaPresentation, path=()):
    _type(obj, "GradedElement", path)
    _keys(obj, {"type", "trunc", "comps"}, path, {"trunc"})
    N = _int(obj["trunc"], list(path) + ["trunc"], 0)
    comps = {}
    for k, vec in obj.get("comps", {}).items():
        p = _deg(k, list(path) + ["comps", k])
        if p not in owner.dims:
            raise SchemaError(_ptr(path, "comps", k), f"degree {p} not in {owner.name}")
        comps[p] = _matrix_from(vec, list(path) + ["comps", k], owner.dims[p], N + 1)
    return GradedElement(owner, N, comps)


# -- algebras and cochains --------------------------------------------------------------

def algebra_to_json(A: AlgebraPresentation):
    return {"type": "AlgebraPresentation", "name": A.name, "dim": A.dim,
            "unit": None if A.unit is None else [scalar_to_json(c) for c in A.unit],
            "mult": [[a, b, k, scalar_to_json(c)]
                     for (a, b), row in sorted(A.table.items()) for k, c in sorted(row.items())]}


def algebra_from_json(obj, path=()):
    _type(obj, "AlgebraPresentation", path)
    _keys(obj, {"type", "name", "dim", "unit", "mult"}, path, {"dim", "mult"})
    n = _int(obj["dim"], list(path) + ["dim"], 1)
    mult = []
    for i, e in enumerate(_list(obj["mult"], list(path) + ["mult"])):
        ep = list(path) + ["mult", i]
        _list(e, ep, 4)
        a, b, k = (_int(e[j], ep + [j], 0) for j in range(3))
        for j, v in enumerate((a, b, k)):
            if v >= n:
                raise SchemaError(_ptr(ep, j), "basis index out of range")
        mult.append((a, b, k, scalar_from_json(e[3], ep + [3])))
    unit = obj.get("unit")
    if unit is not None:
        unit = _vec_from(unit, list(path) + ["unit"], n)
    try:
        return AlgebraPresentation(n, mult, unit, name=obj.get("name", "A"))
    except ValueError as e:
        raise SchemaError(_ptr(path, "unit"), str(e)) from None


def cochain_to_json(D: HochschildCochain):
    return {"type": "HochschildCochain", "degree": D.degree,
            "tensor": [[list(ins), k, scalar_to_json(c)]
                       for ins, row in sorted(D.tensor.items()) for k, c in sorted(row.items())]}


def cochain_from_json(obj, algebra, path=()):
    _type(obj, "HochschildCochain", path)
    _keys(obj, {"type", "degree", "tensor"}, path, {"degree", "tensor"})
    k = _int(obj["degree"], list(path) + ["degree"], 0)
    t = {}
    for i, e in enumerate(_list(obj["tensor"], list(path) + ["tensor"])):
        ep = list(path) + ["tensor", i]
        _list(e, ep, 3)
        ins = tuple(_int(v, ep + [0, j], 0) for j, v in enumerate(_list(e[0], ep + [0], k)))
        out = _int(e[1], ep + [1], 0)
        if out >= algebra.dim or any(v >= algebra.dim for v in ins):
            raise SchemaError(_ptr(ep), "basis index out of range")
        row = t.setdefault(ins, {})
        row[out] = row.get(out, 0) + scalar_from_json(e[2], ep + [2])
    return HochschildCochain(algebra, k, t)


# -- nerves, sheaves, stacks ------------------------------------------------------------

def nerve_to_json(X: Nerve):
    return {"type": "Nerve", "index_set": list(X.index_set),
            "simplices": [list(s) for s in X.simplices]}


def nerve_from_json(obj, path=()):
    _type(obj, "Nerve", path)
    _keys(obj, {"type", "index_set", "simplices"}, path, {"index_set"})
    idx = [_label(v, list(path) + ["index_set", i])
           for i, v in enumerate(_list(obj["index_set"], list(path) + ["index_set"]))]
    simp = None
    if "simplices" in obj:
        simp = [_simplex(s, list(path) + ["simplices", i])
                for i, s in enumerate(_list(obj["simplices"], list(path) + ["simplices"]))]
        for i, s in enumerate(simp):
            for j, v in enumerate(s):
                if v not in idx:
                    raise SchemaError(_ptr(path, "simplices", i, j), f"unknown index {v!r}")
    try:
        return Nerve(idx, simplices=simp)
    except ValueError as e:
        raise SchemaError(_ptr(path, "simplices"), str(e)) from None


def morphism_to_json(f: DglaMorphism):
    mats = {}
    for p, cols in sorted(f.cols.items()):
        ents = [[r, c, scalar_to_json(v)] for c, rows in sorted(cols.items())
                for r, v in sorted(rows)]
        if ents:
            mats[str(p)] = ents
    return {"type": "DglaMorphism", "matrices": mats}


def morphism_from_json(obj, source, target, path=()):
    _type(obj, "DglaMorphism", path)
    _keys(obj, {"type", "matrices"}, path, {"matrices"})
    mats = {}
    for k, ents in obj["matrices"].items():
        p = _deg(k, list(path) + ["matrices", k])
        m = {}
        for i, e in enumerate(_list(ents, list(path) + ["matrices", k])):
            ep = list(path) + ["matrices", k, i]
            _list(e, ep, 3)
            m[(_int(e[0], ep + [0], 0), _int(e[1], ep + [1], 0))] = scalar_from_json(e[2], ep + [2])
        mats[p] = m
    try:
        return DglaMorphism(source, target, mats)
    except ValueError as e:
        raise SchemaError(_ptr(path, "matrices"), str(e)) from None


def _named_objects(objs, reader, path):
    if not isinstance(objs, dict):
        raise SchemaError(_ptr(path), "expected an object of named definitions")
    return {name: reader(o, list(path) + [name]) for name, o in objs.items()}


def _names_by_identity(objs):
    names = {}
    for o in objs:
        if id(o) not in names:
            names[id(o)] = getattr(o, "name", None) or f"obj{len(names)}"
    used = {}
    for k in list(names):
        n = names[k]
        if n in used.values():
            n = f"{n}_{len(used)}"
        used[k] = n
    return used


def sheaf_to_json(S: SimplicialDglaSheaf):
    names = _names_by_identity([S.algebras[s] for s in S.nerve.simplices])
    dglas = {}
    for s in S.nerve.simplices:
        L = S.algebras[s]
        dglas[names[id(L)]] = dgla_to_json(L)
    return {"type": "SimplicialDglaSheaf", "nerve": nerve_to_json(S.nerve), "dglas": dglas,
            "algebras": [[list(s), names[id(S.algebras[s])]] for s in S.nerve.simplices],
            "restrictions": [[list(s), list(t), morphism_to_json(r)]
                             for (s, t), r in sorted(S.restrictions.items())]}


def sheaf_from_json(obj, path=()):
    _type(obj, "SimplicialDglaSheaf", path)
    _keys(obj, {"type", "nerve", "dglas", "algebras", "restrictions"}, path,
          {"nerve", "dglas", "algebras"})
    X = nerve_from_json(obj["nerve"], list(path) + ["nerve"])
    dglas = _named_objects(obj["dglas"], dgla_from_json, list(path) + ["dglas"])
    algs = {}
    for i, e in enumerate(_list(obj["algebras"], list(path) + ["algebras"])):
        ep = list(path) + ["algebras", i]
        _list(e, ep, 2)
        if e[1] not in dglas:
            raise SchemaError(_ptr(ep, 1), f"unknown DGLA {e[1]!r}")
        algs[_simplex(e[0], ep + [0])] = dglas[e[1]]
    res = {}
    for i, e in enumerate(_list(obj.get("restrictions", []), list(path) + ["restrictions"])):
        ep = list(path) + ["restrictions", i]
        _list(e, ep, 3)
        s, t = _simplex(e[0], ep + [0]), _simplex(e[1], ep + [1])
        if s not in algs or t not in algs:
            raise SchemaError(_ptr(ep), "restriction between unknown simplices")
        res[(s, t)] = morphism_from_json(e[2], algs[t], algs[s], ep + [2])
    try:
        return SimplicialDglaSheaf(X, algs, res)
    except ValueError as e:
        raise SchemaError(_ptr(path), str(e)) from None


def _algebra_table(algs, path):
    return _named_objects(algs, algebra_from_json, path)


def stack_to_json(S: StackDatum):
    names = _names_by_identity([S.algebras[i] for i in S.nerve.index_set])
    return {"type": "StackDatum", "name": S.name, "nerve": nerve_to_json(S.nerve),
            "algebras": {names[id(S.algebras[i])]: algebra_to_json(S.algebras[i])
                         for i in S.nerve.index_set},
            "assign": [[i, names[id(S.algebras[i])]] for i in S.nerve.index_set],
            "G": [[i, j, _matrix_to(M)] for (i, j), M in sorted(S.G.items(), key=str)],
            "c": [[i, j, k, [scalar_to_json(v) for v in vec]]
                  for (i, j, k), vec in sorted(S.c.items(), key=str)]}


def stack_from_json(obj, path=()):
    _type(obj, "StackDatum", path)
    _keys(obj, {"type", "name", "nerve", "algebras", "assign", "G", "c"}, path,
          {"nerve", "algebras", "assign", "G", "c"})
    X = nerve_from_json(obj["nerve"], list(path) + ["nerve"])
    algs = _algebra_table(obj["algebras"], list(path) + ["algebras"])
    per = {}
    for n, e in enumerate(_list(obj["assign"], list(path) + ["assign"])):
        ep = list(path) + ["assign", n]
        _list(e, ep, 2)
        if e[1] not in algs:
            raise SchemaError(_ptr(ep, 1), f"unknown algebra {e[1]!r}")
        per[_label(e[0], ep + [0])] = algs[e[1]]
    G = {}
    for n, e in enumerate(_list(obj["G"], list(path) + ["G"])):
        ep = list(path) + ["G", n]
        _list(e, ep, 3)
        i, j = _label(e[0], ep + [0]), _label(e[1], ep + [1])
        if i not in per or j not in per:
            raise SchemaError(_ptr(ep), "unknown index")
        G[(i, j)] = _matrix_from(e[2], ep + [2], per[i].dim, per[j].dim)
    c = {}
    for n, e in enumerate(_list(obj["c"], list(path) + ["c"])):
        ep = list(path) + ["c", n]
        _list(e, ep, 4)
        key = tuple(_label(e[m], ep + [m]) for m in range(3))
        if key[0] not in per:
            raise SchemaError(_ptr(ep, 0), "unknown index")
        c[key] = _vec_from(e[3], ep + [3], per[key[0]].dim)
    try:
        return StackDatum(X, per, G, c, name=obj.get("name", "S"))
    except (ValueError, KeyError) as e:
        raise SchemaError(_ptr(path), f"invalid stack datum: {e}") from None


def chain_data_to_json(CD: ChainData):
    names = _names_by_identity([CD.algebras[s] for s in CD.nerve.simplices])
    return {"type": "ChainData", "nerve": nerve_to_json(CD.nerve),
            "algebras": {names[id(CD.algebras[s])]: algebra_to_json(CD.algebras[s])
                         for s in CD.nerve.simplices},
            "assign": [[list(s), names[id(CD.algebras[s])]] for s in CD.nerve.simplices],
            "G": [[list(s), list(t), _matrix_to(M)] for (s, t), M in CD.G.items()],
            "c": [[list(s), list(t), list(r), [scalar_to_json(v) for v in vec]]
                  for (s, t, r), vec in CD.c.items()]}


def chain_data_from_json(obj, path=()):
    _type(obj, "ChainData", path)
    _keys(obj, {"type", "nerve", "algebras", "assign", "G", "c"}, path,
          {"nerve", "algebras", "assign", "G", "c"})
    X = nerve_from_json(obj["nerve"], list(path) + ["nerve"])
    algs = _algebra_table(obj["algebras"], list(path) + ["algebras"])
    per = {}
    for n, e in enumerate(_list(obj["assign"], list(path) + ["assign"])):
        ep = list(path) + ["assign", n]
        _list(e, ep, 2)
        if e[1] not in algs:
            raise SchemaError(_ptr(ep, 1), f"unknown algebra {e[1]!r}")
        per[_simplex(e[0], ep + [0])] = algs[e[1]]
    G = {}
    for n, e in enumerate(_list(obj["G"], list(path) + ["G"])):
        ep = list(path) + ["G", n]
        _list(e, ep, 3)
        s, t = _simplex(e[0], ep + [0]), _simplex(e[1], ep + [1])
        if s not in per or t not in per:
            raise SchemaError(_ptr(ep), "unknown simplex")
        G[(s, t)] = _matrix_from(e[2], ep + [2], per[s].dim, per[t].dim)
    c = {}
    for n, e in enumerate(_list(obj["c"], list(path) + ["c"])):
        ep = list(path) + ["c", n]
        _list(e, ep, 4)
        key = tuple(_simplex(e[m], ep + [m]) for m in range(3))
        if key[0] not in per:
            raise SchemaError(_ptr(ep, 0), "unknown simplex")
        c[key] = _vec_from(e[3], ep + [3], per[key[0]].dim)
    try:
        return ChainData(X, per, G, c)
    except (ValueError, KeyError) as e:
        raise SchemaError(_ptr(path), f"invalid chain data: {e}") from None


# -- Cech cochains and descent data -----------------------------------------------------

def cech_cochain_to_json(x: Cochain):
    return {"type": "Cochain", "level": x.level,
            "parts": [[[list(s) for s in key], element_to_json(v)]
                      for key, v in x.parts.items() if not v.is_zero()],
            "trunc": x.trunc}


def cech_cochain_from_json(obj, C, path=()):
    _type(obj, "Cochain", path)
    _keys(obj, {"type", "level", "parts", "trunc"}, path, {"level", "parts", "trunc"})
    lvl = _int(obj["level"], list(path) + ["level"], 0)
    N = _int(obj["trunc"], list(path) + ["trunc"], 0)
    if lvl > C.cap:
        raise SchemaError(_ptr(path, "level"), "level above the cap")
    keys = {tuple(tuple(s) for s in k): k for k in C.keys(lvl)}
    parts = {}
    for i, e in enumerate(_list(obj["parts"], list(path) + ["parts"])):
        ep = list(path) + ["parts", i]
        _list(e, ep, 2)
        key = tuple(_simplex(s, ep + [0, j]) for j, s in enumerate(_list(e[0], ep + [0])))
        if key not in keys:
            raise SchemaError(_ptr(ep, 0), f"{key} is not a chain of level {lvl}")
        k = keys[key]
        parts[k] = element_from_json(e[1], C.block(lvl, k), ep + [1])
        if parts[k].trunc != N:
            raise SchemaError(_ptr(ep, 1, "trunc"), "truncation differs from the cochain's")
    for k in C.keys(lvl):
        parts.setdefault(k, GradedElement.zero(C.block(lvl, k), N))
    return Cochain(C, lvl, parts)


def descent_to_json(D: DescentDatum):
    return {"type": "DescentDatum", "lam": cech_cochain_to_json(D.lam),
            "x": cech_cochain_to_json(D.x), "t": cech_cochain_to_json(D.t)}


def descent_from_json(obj, C, path=()):
    _type(obj, "DescentDatum", path)
    _keys(obj, {"type", "lam", "x", "t"}, path, {"lam", "x", "t"})
    parts = [cech_cochain_from_json(obj[k], C, list(path) + [k]) for k in ("lam", "x", "t")]
    try:
        return DescentDatum(C, *parts)
    except ValueError as e:
        raise SchemaError(_ptr(path), str(e)) from None


# -- Weyl algebra -----------------------------------------------------------------------

def model_to_json(M: SymplecticModel):
    return {"type": "SymplecticModel", "omega": _matrix_to(M.omega)}


def model_from_json(obj, path=()):
    _type(obj, "SymplecticModel", path)
    _keys(obj, {"type", "omega"}, path, {"omega"})
    W = _matrix_from(obj["omega"], list(path) + ["omega"])
    try:
        return SymplecticModel(W)
    except ValueError as e:
        raise SchemaError(_ptr(path, "omega"), str(e)) from None


def _terms_to(F: WeylElement):
    return [{"hbar": k, "y": list(y), "x": list(x), "coeff": scalar_to_json(c)}
            for (k, y, x), c in sorted(F.terms.items())]


def _terms_from(lst, M, path):
    t = {}
    for i, e in enumerate(_list(lst, path)):
        ep = list(path) + [i]
        _keys(e, {"hbar", "y", "x", "coeff"}, ep, {"hbar", "y", "coeff"})
        k = _int(e["hbar"], ep + ["hbar"], -1)
        y = tuple(_int(v, ep + ["y", j], 0) for j, v in enumerate(_list(e["y"], ep + ["y"], M.dim)))
        x = tuple(_int(v, ep + ["x", j], 0)
                  for j, v in enumerate(_list(e.get("x", [0] * M.dim), ep + ["x"], M.dim)))
        if (k, y, x) in t:
            raise SchemaError(_ptr(ep), "duplicate monomial")
        t[(k, y, x)] = scalar_from_json(e["coeff"], ep + ["coeff"])
    return t


def _trunc_from(obj, path):
    _keys(obj, {"hbar", "filtration"}, path, {"hbar", "filtration"})
    return _int(obj["hbar"], list(path) + ["hbar"], 0), _int(obj["filtration"], list(path) + ["filtration"], 0)


def weyl_to_json(F: WeylElement):
    return {"type": "WeylElement", "omega": _matrix_to(F.model.omega),
            "truncation": {"hbar": F.N, "filtration": F.D}, "terms": _terms_to(F)}


def weyl_from_json(obj, path=(), model=None):
    _type(obj, "WeylElement", path)
    _keys(obj, {"type", "omega", "truncation", "terms"}, path, {"omega", "truncation", "terms"})
    M = model or model_from_json({"type": "SymplecticModel", "omega": obj["omega"]}, path)
    N, D = _trunc_from(obj["truncation"], list(path) + ["truncation"])
    t = _terms_from(obj["terms"], M, list(path) + ["terms"])
    for key in t:
        if key[0] > N or sum(key[1]) + 2 * key[0] > D:
            raise SchemaError(_ptr(path, "terms"), f"monomial {key} outside the truncation")
    return WeylElement(M, t, N, D)


def weyl_form_to_json(w: WeylForm):
    return {"type": "WeylForm", "omega": _matrix_to(w.model.omega), "degree": w.degree,
            "truncation": {"hbar": w.N, "filtration": w.D},
            "comps": [{"dx": list(Ix), "terms": _terms_to(F)} for Ix, F in sorted(w.comps.items())]}


def weyl_form_from_json(obj, path=()):
    _type(obj, "WeylForm", path)
    _keys(obj, {"type", "omega", "degree", "truncation", "comps"}, path,
          {"omega", "degree", "truncation", "comps"})
    M = model_from_json({"type": "SymplecticModel", "omega": obj["omega"]}, path)
    N, D = _trunc_from(obj["truncation"], list(path) + ["truncation"])
    deg = _int(obj["degree"], list(path) + ["degree"], 0)
    comps = {}
    for i, e in enumerate(_list(obj["comps"], list(path) + ["comps"])):
        ep = list(path) + ["comps", i]
        _keys(e, {"dx", "terms"}, ep, {"dx", "terms"})
        Ix = tuple(_int(v, ep + ["dx", j], 0) for j, v in enumerate(_list(e["dx"], ep + ["dx"], deg)))
        if any(v >= M.dim for v in Ix) or list(Ix) != sorted(set(Ix)):
            raise SchemaError(_ptr(ep, "dx"), "dx indices must be strictly increasing and in range")
        comps[Ix] = WeylElement(M, _terms_from(e["terms"], M, ep + ["terms"]), N, D)
    return WeylForm(M, deg, comps, N, D)


def central_to_json(th: CentralSeries):
    return {"type": "CentralSeries", "omega": _matrix_to(th.model.omega), "degree": th.degree,
            "terms": [{"order": m, "dx": list(Ix), "x": list(x), "coeff": scalar_to_json(c)}
                      for (m, Ix, x), c in sorted(th.terms.items())]}


def central_from_json(obj, path=()):
    _type(obj, "CentralSeries", path)
    _keys(obj, {"type", "omega", "degree", "terms"}, path, {"omega", "degree", "terms"})
    M = model_from_json({"type": "SymplecticModel", "omega": obj["omega"]}, path)
    deg = _int(obj["degree"], list(path) + ["degree"], 0)
    t = {}
    for i, e in enumerate(_list(obj["terms"], list(path) + ["terms"])):
        ep = list(path) + ["terms", i]
        _keys(e, {"order", "dx", "x", "coeff"}, ep, {"order", "dx", "coeff"})
        m = _int(e["order"], ep + ["order"], -1)
        Ix = tuple(_int(v, ep + ["dx", j], 0) for j, v in enumerate(_list(e["dx"], ep + ["dx"], deg)))
        if list(Ix) != sorted(set(Ix)) or any(v >= M.dim for v in Ix):
            raise SchemaError(_ptr(ep, "dx"), "dx indices must be strictly increasing and in range")
        x = tuple(_int(v, ep + ["x", j], 0)
                  for j, v in enumerate(_list(e.get("x", [0] * M.dim), ep + ["x"], M.dim)))
        t[(m, Ix, x)] = scalar_from_json(e["coeff"], ep + ["coeff"])
    return CentralSeries(M, t, deg)


def theta_report(th: CentralSeries):
    """theta as an hbar-indexed list of constant 2-form coefficient matrices."""
    return [{"order": m, "matrix": _matrix_to(th.matrix(m))} for m in th.orders()]


# -- dispatch ---------------------------------------------------------------------------

_WRITERS = [
    (WeylElement, weyl_to_json), (WeylForm, weyl_form_to_json), (CentralSeries, central_to_json),
    (SymplecticModel, model_to_json), (ArtinianSeries, series_to_json),
    (DglaPresentation, dgla_to_json), (GradedElement, element_to_json),
    (AlgebraPresentation, algebra_to_json), (HochschildCochain, cochain_to_json),
    (Nerve, nerve_to_json), (DglaMorphism, morphism_to_json),
    (SimplicialDglaSheaf, sheaf_to_json), (StackDatum, stack_to_json),
    (ChainData, chain_data_to_json), (Cochain, cech_cochain_to_json),
    (DescentDatum, descent_to_json),
]

_READERS = {
    "WeylElement": weyl_from_json, "WeylForm": weyl_form_from_json,
    "CentralSeries": central_from_json, "SymplecticModel": model_from_json,
    "ArtinianSeries": series_from_json, "DglaPresentation": dgla_from_json,
    "AlgebraPresentation": algebra_from_json, "Nerve": nerve_from_json,
    "SimplicialDglaSheaf": sheaf_from_json, "StackDatum": stack_from_json,
    "ChainData": chain_data_from_json,
}

# types whose parse needs context (an owner DGLA, algebra, cosimplicial DGLA ...)
_CONTEXT = {"GradedElement": element_from_json, "HochschildCochain": cochain_from_json,
            "Cochain": cech_cochain_from_json, "DescentDatum": descent_from_json}


def to_json(x):
    if isinstance(x, (int, Fraction, GaussianRational)) and not isinstance(x, bool):
        return scalar_to_json(x)
    for cls, fn in _WRITERS:
        if isinstance(x, cls):
            return fn(x)
    raise TypeError(f"no JSON form for {type(x).__name__}")


def from_json(obj, context=None, path=()):
    if not isinstance(obj, dict) or "type" not in obj:
        return scalar_from_json(obj, path)
    t = obj["type"]
    if t in _READERS:
        return _READERS[t](obj, path)
    if t in _CONTEXT:
        if context is None:
            raise SchemaError(_ptr(path), f"{t} needs a context object to parse")
        return _CONTEXT[t](obj, context, path)
    raise SchemaError(_ptr(path, "type"), f"unknown type {t!r}")


def dumps(x, indent=None):
    return json.dumps(to_json(x), indent=indent, sort_keys=True)


def loads(s, context=None):
    try:
        obj = json.loads(s)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return from_json(obj, context)
