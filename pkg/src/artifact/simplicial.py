"""Nerves, simplicial sheaves of DGLAs, their Cech complexes, descent data and
deviation cocycles, totalization by polynomial forms, De Rham-Sullivan
collections.

A cosimplicial DGLA is block structured: level n is a finite product of
DGLAs indexed by keys (chains of simplices for a Cech complex).  Cofaces and
codegeneracies send a block to a block, possibly through a DGLA morphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .dgla import DglaPresentation, GradedElement, bch, exp_ad
from .deligne import gauge_apply, twisted_bch
from .linalg import sparse_nullspace
from .sullivan import (SullivanForm, monomials, pullback_degeneracy, restrict,
                       sullivan_d, wedge, whitney_form)

__all__ = [
    "Nerve", "DglaMorphism", "SimplicialDglaSheaf", "CosimplicialDgla",
    "Cochain", "cech_complex", "constant_cosimplicial", "validate_cosimplicial",
    "DescentDatum", "descent_verify", "deviation_cocycle", "iso_deviation",
    "closure_check", "face_image", "TotSpace", "totalize", "whitney_family",
    "DrsCollection", "MultiCochain", "drs_validate", "drs_differential",
]


# -- nerves ------------------------------------------------------------------

class Nerve:
    """Abstract nerve of a finite cover: a downward closed set of simplices."""

    def __init__(self, index_set, simplices=None, maximal=None):
        self.index_set = tuple(index_set)
        pos = {v: i for i, v in enumerate(self.index_set)}
        if len(pos) != len(self.index_set):
            raise ValueError("index set has repeated entries")
        self._pos = pos
        found = set()
        if maximal is not None:
            for s in maximal:
                s = self._norm(s)
                for k in range(1, len(s) + 1):
                    found.update(combinations(s, k))
        if simplices is not None:
            given = {self._norm(s) for s in simplices}
            for s in given:
                for k in range(1, len(s)):
                    for f in combinations(s, k):
                        if f not in given and f not in found:
                            raise ValueError(f"nerve not downward closed: {f} missing below {s}")
            found |= given
        for v in self.index_set:
            found.add((v,))
        self.simplices = sorted(found, key=lambda s: (len(s), [pos[v] for v in s]))
        self._set = set(self.simplices)

    @classmethod
    def full(cls, n):
        return cls(range(n), maximal=[tuple(range(n))])

    def _norm(self, s):
        s = tuple(s)
        if not s:
            raise ValueError("empty simplex")
        for v in s:
            if v not in self._pos:
                raise ValueError(f"unknown index {v!r}")
        if len(set(s)) != len(s):
            raise ValueError(f"repeated index in simplex {s}")
        return tuple(sorted(s, key=self._pos.__getitem__))

    def __contains__(self, s):
        try:
            return self._norm(s) in self._set
        except ValueError:
            return False

    @property
    def dimension(self):
        return max(len(s) for s in self.simplices) - 1

    def of_dim(self, k):
        return [s for s in self.simplices if len(s) == k + 1]

    def chains(self, p):
        """Weakly increasing chains sigma_0 <= .. <= sigma_p."""
        out = [(s,) for s in self.simplices]
        for _ in range(p):
            nxt = []
            for ch in out:
                last = set(ch[-1])
                for s in self.simplices:
                    if last <= set(s):
                        nxt.append(ch + (s,))
            out = nxt
        return out

    def __eq__(self, other):
        return isinstance(other, Nerve) and self.index_set == other.index_set \
            and self.simplices == other.simplices

    __hash__ = None

    def __repr__(self):
        return f"Nerve({list(self.index_set)}, {self.simplices})"


# -- morphisms ---------------------------------------------------------------

class DglaMorphism:
    """Degree-preserving linear map given by sparse matrices per degree:
    ``matrices[p]`` is a dict (row, col) -> c."""

    def __init__(self, source: DglaPresentation, target: DglaPresentation, matrices):
        self.source = source
        self.target = target
        self.cols = {}
        for p, entries in matrices.items():
            if p not in source.dims or source.dims[p] == 0:
                if entries:
                    raise ValueError(f"source has no degree {p}")
                continue
            for (row, col), c in entries.items():
                if not 0 <= col < source.dims[p] or not 0 <= row < target.dims.get(p, 0):
                    raise ValueError(f"matrix entry ({row}, {col}) out of range in degree {p}")
                if c:
                    self.cols.setdefault(p, {}).setdefault(col, []).append((row, c))

    @classmethod
    def identity(cls, L):
        return cls(L, L, {p: {(i, i): 1 for i in range(n)} for p, n in L.dims.items()})

    def apply(self, x: GradedElement) -> GradedElement:
        if x.owner is not self.source:
            raise ValueError("element does not live in the source")
        N = x.trunc
        comps = {}
        for p, vec in x.comps.items():
            out = [[0] * (N + 1) for _ in range(self.target.dims.get(p, 0))]
            for col, rows in self.cols.get(p, {}).items():
                v = vec[col]
                if not any(v):
                    continue
                for row, c in rows:
                    o = out[row]
                    for k in range(N + 1):
                        if v[k]:
                            o[k] = o[k] + c * v[k]
            comps[p] = out
        return GradedElement(self.target, N, comps)

    def compose(self, other: "DglaMorphism") -> "DglaMorphism":
        """self after other."""
        if other.target is not self.source:
            raise ValueError("morphisms are not composable")
        mats = {}
        for p, cols in other.cols.items():
            m = {}
            for col, rows in cols.items():
                for mid, c in rows:
                    for row, c2 in self.cols.get(p, {}).get(mid, []):
                        m[(row, col)] = m.get((row, col), 0) + c * c2
            mats[p] = {k: v for k, v in m.items() if v}
        return DglaMorphism(other.source, self.target, mats)

    def same_as(self, other):
        def table(m):
            return {(p, col, row): c for p, cols in m.cols.items()
                    for col, rows in cols.items() for row, c in rows if c}
        a, b = table(self), table(other)
        keys = set(a) | set(b)
        return all(a.get(k, 0) == b.get(k, 0) for k in keys)

    def morphism_witness(self):
        """None if the map commutes with d and brackets on basis elements."""
        S = self.source
        for p, n in S.dims.items():
            for a in range(n):
                x = GradedElement.basis(S, 0, p, a, order=0)
                if not (self.apply(x.d()) - self.apply(x).d()).is_zero():
                    return ("differential", p, a)
        for p, n in S.dims.items():
            for a in range(n):
                x = GradedElement.basis(S, 0, p, a, order=0)
                fx = self.apply(x)
                for q, m in S.dims.items():
                    for b in range(m):
                        y = GradedElement.basis(S, 0, q, b, order=0)
                        lhs = self.apply(x.bracket(y))
                        rhs = fx.bracket(self.apply(y))
                        if not (lhs - rhs).is_zero():
                            return ("bracket", p, a, q, b)
        return None


# -- sheaves -----------------------------------------------------------------

class SimplicialDglaSheaf:
    """L_sigma per simplex and restrictions r[(sigma, tau)]: L_tau -> L_sigma
    for sigma a proper face of tau.  A missing restriction between equal
    presentations means the identity."""

    def __init__(self, nerve: Nerve, algebras, restrictions=None):
        self.nerve = nerve
        self.algebras = {}
        for s, L in algebras.items():
            s = nerve._norm(s)
            if s not in nerve._set:
                raise ValueError(f"{s} is not a simplex of the nerve")
            self.algebras[s] = L
        for s in nerve.simplices:
            if s not in self.algebras:
                raise ValueError(f"no DGLA given on {s}")
        self.restrictions = {}
        for (s, t), r in (restrictions or {}).items():
            self.restrictions[(nerve._norm(s), nerve._norm(t))] = r
        for s in nerve.simplices:
            for t in nerve.simplices:
                if s != t and set(s) <= set(t) and (s, t) not in self.restrictions:
                    if self.algebras[s] is not self.algebras[t]:
                        raise ValueError(f"restriction {t} -> {s} missing")

    @classmethod
    def constant(cls, nerve, L):
        return cls(nerve, {s: L for s in nerve.simplices})

    def restriction(self, s, t):
        """r_{s t} or None for the identity."""
        if s == t:
            return None
        return self.restrictions.get((s, t))

    def validate(self):
        report = {"cocycle": {"pass": True, "witness": None},
                  "morphism": {"pass": True, "witness": None}}
        for (s, t), r in self.restrictions.items():
            w = r.morphism_witness()
            if w is not None:
                report["morphism"] = {"pass": False, "witness": [list(s), list(t), list(w)]}
                break
        simp = self.nerve.simplices
        for a in simp:
            for b in simp:
                if a == b or not set(a) <= set(b):
                    continue
                for c in simp:
                    if c == b or not set(b) <= set(c):
                        continue
                    r_ab = self.restriction(a, b) or DglaMorphism.identity(self.algebras[a])
                    r_bc = self.restriction(b, c) or DglaMorphism.identity(self.algebras[b])
                    r_ac = self.restriction(a, c) or DglaMorphism.identity(self.algebras[a])
                    if not r_ab.compose(r_bc).same_as(r_ac):
                        report["cocycle"] = {"pass": False, "witness": [list(a), list(b), list(c)]}
                        return report
        return report


# -- cosimplicial DGLAs --------------------------------------------------------

class CosimplicialDgla:
    """Block-structured cosimplicial DGLA truncated at level ``cap``.

    keys(n) lists the blocks of level n, block(n, k) its DGLA.
    coface(n, i)[K] = (k, f): block K of level n+1 receives block k of level n
    through f (None = identity).  codegeneracy(n, j)[k] = (K, f): block k of
    level n receives block K of level n+1.
    """

    def __init__(self, keys_fn, block_fn, coface_fn, codegeneracy_fn, cap, name="C"):
        self._keys_fn = keys_fn
        self._block_fn = block_fn
        self._coface_fn = coface_fn
        self._codeg_fn = codegeneracy_fn
        self.cap = cap
        self.name = name
        self._cache = {}

    def _memo(self, tag, *args):
        key = (tag,) + args
        if key not in self._cache:
            fn = {"keys": self._keys_fn, "coface": self._coface_fn,
                  "codeg": self._codeg_fn}[tag]
            self._cache[key] = fn(*args)
        return self._cache[key]

    def keys(self, n):
        self._check_level(n)
        return self._memo("keys", n)

    def block(self, n, k):
        return self._block_fn(n, k)

    def coface(self, n, i):
        self._check_level(n + 1)
        if not 0 <= i <= n + 1:
            raise ValueError("coface index out of range")
        return self._memo("coface", n, i)

    def codegeneracy(self, n, j):
        self._check_level(n + 1)
        if not 0 <= j <= n:
            raise ValueError("codegeneracy index out of range")
        return self._memo("codeg", n, j)

    def _check_level(self, n):
        if not 0 <= n <= self.cap:
            raise ValueError(f"level {n} outside 0..{self.cap}")

    def level_dims(self, n):
        dims = {}
        for k in self.keys(n):
            for p, d in self.block(n, k).dims.items():
                dims[p] = dims.get(p, 0) + d
        return dims

    def zero(self, n, trunc):
        return Cochain(self, n, {k: GradedElement.zero(self.block(n, k), trunc)
                                 for k in self.keys(n)})

    def apply_coface(self, x: "Cochain", i):
        n = x.level
        parts = {}
        for K, (k, f) in self.coface(n, i).items():
            v = x.parts[k]
            parts[K] = f.apply(v) if f is not None else _rehome(v, self.block(n + 1, K))
        return Cochain(self, n + 1, parts)

    def apply_codegeneracy(self, x: "Cochain", j):
        n = x.level - 1
        parts = {}
        for k, (K, f) in self.codegeneracy(n, j).items():
            v = x.parts[K]
            parts[k] = f.apply(v) if f is not None else _rehome(v, self.block(n, k))
        return Cochain(self, n, parts)

    def boundary(self, x: "Cochain"):
        """The alternating sum of cofaces."""
        out = None
        for i in range(x.level + 2):
            term = self.apply_coface(x, i)
            if i % 2:
                term = -term
            out = term if out is None else out + term
        return out


def _rehome(v, L):
    if v.owner is L:
        return v
    return GradedElement(L, v.trunc, v.comps)


class Cochain:
    """An element of one level of a cosimplicial DGLA: one GradedElement per block."""

    __slots__ = ("C", "level", "parts")

    def __init__(self, C, level, parts):
        self.C = C
        self.level = level
        self.parts = dict(parts)
        for k in C.keys(level):
            if k not in self.parts:
                raise ValueError(f"missing block {k!r} at level {level}")

    @property
    def trunc(self):
        return next(iter(self.parts.values())).trunc

    def map(self, fn, *others):
        return Cochain(self.C, self.level,
                       {k: fn(v, *[o.parts[k] for o in others]) for k, v in self.parts.items()})

    def __add__(self, other):
        return self.map(lambda a, b: a + b, other)

    def __sub__(self, other):
        return self.map(lambda a, b: a - b, other)

    def __neg__(self):
        return self.map(lambda a: -a)

    def scale(self, c):
        return self.map(lambda a: a.scale(c))

    def bracket(self, other):
        return self.map(lambda a, b: a.bracket(b), other)

    def d(self):
        return self.map(lambda a: a.d())

    def only_order(self, k):
        return self.map(lambda a: a.only_order(k))

    def is_zero(self):
        return all(v.is_zero() for v in self.parts.values())

    def valuation(self):
        vals = [v.valuation() for v in self.parts.values() if not v.is_zero()]
        return min(vals) if vals else None

    def __eq__(self, other):
        return isinstance(other, Cochain) and other.level == self.level \
            and (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        nz = {k: v for k, v in self.parts.items() if not v.is_zero()}
        return f"Cochain(level={self.level}, nonzero blocks={list(nz)})"


def constant_cosimplicial(L: DglaPresentation, cap=3):
    """The constant cosimplicial DGLA: L at every level, all maps the identity."""
    return CosimplicialDgla(
        lambda n: [()],
        lambda n, k: L,
        lambda n, i: {(): ((), None)},
        lambda n, j: {(): ((), None)},
        cap, name=f"const({L.name})")


def cech_complex(sheaf: SimplicialDglaSheaf, cap=4):
    """C^p = prod over chains sigma_0 <= .. <= sigma_p of L_{sigma_0}, with
    d_0 restricting from sigma_1 and the other cofaces forgetting an entry."""
    nerve = sheaf.nerve

    def keys(n):
        return nerve.chains(n)

    def block(n, ch):
        return sheaf.algebras[ch[0]]

    def coface(n, i):
        out = {}
        for ch in nerve.chains(n + 1):
            src = ch[:i] + ch[i + 1:]
            f = sheaf.restriction(ch[0], ch[1]) if i == 0 else None
            out[ch] = (src, f)
        return out

    def codeg(n, j):
        out = {}
        for ch in nerve.chains(n):
            out[ch] = (ch[:j + 1] + ch[j:], None)
        return out

    return CosimplicialDgla(keys, block, coface, codeg, cap, name="cech")


def _basis_cochains(C, n):
    for k in C.keys(n):
        L = C.block(n, k)
        for p, dim in L.dims.items():
            for a in range(dim):
                parts = {kk: GradedElement.zero(C.block(n, kk), 0) for kk in C.keys(n)}
                parts[k] = GradedElement.basis(L, 0, p, a, order=0)
                yield (k, p, a), Cochain(C, n, parts)


def validate_cosimplicial(C: CosimplicialDgla, max_level=None):
    """Cosimplicial identities, boundary squared and the morphism property of
    every map, checked on basis cochains.  Returns a report dict."""
    top = C.cap if max_level is None else min(max_level, C.cap)
    report = {name: {"pass": True, "witness": None}
              for name in ("coface_coface", "codeg_coface", "codeg_codeg",
                           "boundary_squared", "morphisms")}

    def fail(name, w):
        if report[name]["pass"]:
            report[name] = {"pass": False, "witness": w}

    for n in range(top + 1):
        for tag, x in _basis_cochains(C, n):
            # d_j d_i = d_i d_{j-1}, i < j
            if n + 2 <= top:
                for j in range(n + 3):
                    for i in range(j):
                        a = C.apply_coface(C.apply_coface(x, i), j)
                        b = C.apply_coface(C.apply_coface(x, j - 1), i)
                        if not a == b:
                            fail("coface_coface", [n, i, j, repr(tag)])
                bb = C.boundary(C.boundary(x))
                if not bb.is_zero():
                    fail("boundary_squared", [n, repr(tag)])
            if n + 1 <= top:
                # s_j d_i
                for j in range(n + 1):
                    for i in range(n + 2):
                        lhs = C.apply_codegeneracy(C.apply_coface(x, i), j)
                        if i < j:
                            rhs = C.apply_coface(C.apply_codegeneracy(x, j - 1), i) if n >= 1 else None
                        elif i in (j, j + 1):
                            rhs = x
                        else:
                            rhs = C.apply_coface(C.apply_codegeneracy(x, j), i - 1) if n >= 1 else None
                        if rhs is not None and not lhs == rhs:
                            fail("codeg_coface", [n, i, j, repr(tag)])
            if n >= 2:
                # s_j s_i = s_i s_{j+1}, i <= j, on level n -> n-2
                for i in range(n - 1):
                    for j in range(i, n - 1):
                        a = C.apply_codegeneracy(C.apply_codegeneracy(x, i), j)
                        b = C.apply_codegeneracy(C.apply_codegeneracy(x, j + 1), i)
                        if not a == b:
                            fail("codeg_codeg", [n, i, j, repr(tag)])
    seen = set()
    for n in range(top):
        maps = [C.coface(n, i) for i in range(n + 2)] + [C.codegeneracy(n, j) for j in range(n + 1)]
        for m in maps:
            for _, (_, f) in m.items():
                if f is not None and id(f) not in seen:
                    seen.add(id(f))
                    w = f.morphism_witness()
                    if w is not None:
                        fail("morphisms", list(w))
    return report


def face_image(C: CosimplicialDgla, x: Cochain, n, S):
    """Image of a level-k cochain at the face S (k+1 increasing vertices of
    [n]) of level n, i.e. x_{s_0..s_k}."""
    S = list(S)
    if len(S) != x.level + 1 or S != sorted(set(S)) or S[-1] > n:
        raise ValueError(f"bad face {S} for a level-{x.level} cochain in level {n}")
    missing = [j for j in range(n + 1) if j not in S]
    y = x
    for j in missing:
        y = C.apply_coface(y, j)
    return y


# -- descent data and deviations -------------------------------------------------

def _blockwise(fn, *xs):
    return xs[0].map(fn, *xs[1:])


def _twisted_bch(mu, a, b):
    return _blockwise(lambda m, u, v: twisted_bch(m, u, v), mu, a, b)


def _bch(a, b):
    return _blockwise(bch, a, b)


def _ad(X, t):
    return _blockwise(exp_ad, X, t)


def _gauge(X, lam):
    return _blockwise(gauge_apply, X, lam)


def _mc(lam):
    return _blockwise(lambda v: v.d() + v.bracket(v).scale(Fraction(1, 2)), lam)


def _twisted_d(mu, t):
    return _blockwise(lambda m, v: v.d() + m.bracket(v), mu, t)


@dataclass
class DescentDatum:
    """(lambda, G = exp x, c = exp t) on levels 0, 1, 2 of C."""
    C: CosimplicialDgla
    lam: Cochain
    x: Cochain
    t: Cochain
    certified: bool | None = field(default=None)

    def __post_init__(self):
        for name, v, lvl, deg in (("lambda", self.lam, 0, 1), ("x", self.x, 1, 0),
                                  ("t", self.t, 2, -1)):
            if v.level != lvl:
                raise ValueError(f"{name} must live on level {lvl}")
            for part in v.parts.values():
                if not part.is_homogeneous(deg):
                    raise ValueError(f"{name} must have degree {deg}")
                if not part.in_maximal_ideal():
                    raise ValueError(f"{name} must lie in L (x) m")
        if self.C.cap < 3:
            raise ValueError("descent data need levels up to 3")

    @property
    def trunc(self):
        return self.lam.trunc


def _descent_pieces(D: DescentDatum):
    C = D.C
    lam, x, t = D.lam, D.x, D.t
    R = _mc(lam)
    Z = _gauge(x, C.apply_coface(lam, 0)) - C.apply_coface(lam, 1)
    lam0 = face_image(C, lam, 2, [0])
    x01, x12, x02 = (face_image(C, x, 2, S) for S in ([0, 1], [1, 2], [0, 2]))
    gamma = _twisted_d(lam0, t)
    T = _bch(x02, -_bch(gamma, _bch(x01, x12)))
    mu = face_image(C, lam, 3, [0])
    c = {S: face_image(C, t, 3, S) for S in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))}
    g01 = face_image(C, x, 3, [0, 1])
    route1 = _twisted_bch(mu, c[0, 2, 3], c[0, 1, 2])
    route2 = _twisted_bch(mu, c[0, 1, 3], _ad(g01, c[1, 2, 3]))
    Phi = _twisted_bch(mu, -route1, route2)
    return R, Z, T, Phi


def _first_order(xs):
    vals = [v.valuation() for v in xs if not v.is_zero()]
    return min(vals) if vals else None


def descent_verify(D: DescentDatum):
    """Per-condition report with the first failing order in hbar."""
    R, Z, T, Phi = _descent_pieces(D)
    report = {}
    for name, v in (("mc", R), ("gauge", Z), ("two_morphism", T), ("tetrahedron", Phi)):
        report[name] = {"pass": v.is_zero(), "first_failing_order": v.valuation()}
    report["pass"] = all(r["pass"] for r in report.values())
    D.certified = report["pass"]
    return report


def closure_check(components, start_level):
    """(d + boundary)-closure of a cochain tuple (x_0 on level start_level,
    x_1 one level up, ...): d x_0 = 0, bd x_k = d x_{k+1}, bd x_last = 0.
    Returns (closed, list of residual levels that failed)."""
    C = components[0].C
    failures = []
    if not components[0].d().is_zero():
        failures.append(start_level)
    for k, xk in enumerate(components):
        if xk.level + 1 > C.cap:
            raise ValueError("cap too small for the closure check")
        res = C.boundary(xk)
        if k + 1 < len(components):
            res = res - components[k + 1].d()
        if not res.is_zero():
            failures.append(start_level + k + 1)
    return not failures, failures


@dataclass
class DeviationResult:
    kind: str
    order: int
    components: list
    start_level: int
    closed: bool | None
    failures: list
    precondition_ok: bool
    first_failing_order: int | None

    def as_dict(self):
        return {"kind": self.kind, "order": self.order, "start_level": self.start_level,
                "closed": self.closed, "failures": self.failures,
                "precondition_ok": self.precondition_ok,
                "first_failing_order": self.first_failing_order}


def _deviation(kind, pieces, signs, start_level, order):
    ffo = _first_order(pieces)
    if ffo is not None and ffo <= order - 1:
        return DeviationResult(kind, order, [], start_level, None, [], False, ffo)
    comps = [p.only_order(order).scale(s) for p, s in zip(pieces, signs)]
    closed, failures = closure_check(comps, start_level)
    return DeviationResult(kind, order, comps, start_level, closed, failures, True, ffo)


def deviation_cocycle(D: DescentDatum, order=None):
    """(R, Z, T, -Phi) at ``order`` = n+1.  Default: the first failing order."""
    pieces = _descent_pieces(D)
    if order is None:
        order = _first_order(pieces)
        if order is None:
            zero = [p.only_order(0) for p in pieces]
            return DeviationResult("descent", None, zero, 0, True, [], True, None)
    return _deviation("descent", pieces, [1, 1, 1, -1], 0, order)


def _iso_pieces(D, Dp, h, s):
    C = D.C
    Cc = _gauge(h, D.lam) - Dp.lam
    lam1p = C.apply_coface(Dp.lam, 1)
    h0, h1 = C.apply_coface(h, 1), C.apply_coface(h, 0)
    beta = _twisted_d(lam1p, s)
    S = _bch(_bch(h0, D.x), -_bch(beta, _bch(Dp.x, h1)))
    mu = face_image(C, Dp.lam, 2, [0])
    b = {S_: face_image(C, s, 2, S_) for S_ in ((0, 1), (1, 2), (0, 2))}
    H0 = face_image(C, h, 2, [0])
    g01p = face_image(C, Dp.x, 2, [0, 1])
    routeB = _twisted_bch(mu, b[0, 2], Dp.t)
    routeA = _twisted_bch(mu, _twisted_bch(mu, _ad(H0, D.t), b[0, 1]), _ad(g01p, b[1, 2]))
    Psi = _twisted_bch(mu, -routeB, routeA)
    return Cc, S, Psi


def _two_iso_pieces(D, Dp, h, s, ht, st, r):
    C = D.C
    alpha = _twisted_d(Dp.lam, r)
    P = _bch(ht, -_bch(alpha, h))
    mu = C.apply_coface(Dp.lam, 1)
    a0, a1 = C.apply_coface(r, 1), C.apply_coface(r, 0)
    X = _twisted_bch(mu, st, _ad(Dp.x, a1))
    Y = _twisted_bch(mu, a0, s)
    Omega = _twisted_bch(mu, X, -Y)
    return P, Omega


def iso_deviation(D: DescentDatum, Dp: DescentDatum, h: Cochain, s: Cochain,
                  level="iso", order=None, h2=None, s2=None, r=None):
    """Deviation of (h, s): D -> Dp from being an isomorphism (level 'iso',
    tuple (C, S, -Psi)), or of r: (h, s) => (h2, s2) from being a
    two-isomorphism (level 'two_iso', tuple (P, -Omega))."""
    if level == "iso":
        pieces = _iso_pieces(D, Dp, h, s)
        signs, start = [1, 1, -1], 0
    elif level == "two_iso":
        if h2 is None or s2 is None or r is None:
            raise ValueError("two_iso needs h2, s2 and r")
        pieces = _two_iso_pieces(D, Dp, h, s, h2, s2, r)
        signs, start = [1, -1], 0
    else:
        raise ValueError(f"unknown level {level!r}")
    if order is None:
        order = _first_order(pieces)
        if order is None:
            zero = [p.only_order(0) for p in pieces]
            return DeviationResult(level, None, zero, start, True, [], True, None)
    return _deviation(level, pieces, signs, start, order)


def transport(D: DescentDatum, h: Cochain, s: Cochain):
    """The descent datum D' for which (h, s): D -> D' is an isomorphism."""
    C = D.C
    lam_p = _gauge(h, D.lam)
    lam1p = C.apply_coface(lam_p, 1)
    beta = _twisted_d(lam1p, s)
    h0, h1 = C.apply_coface(h, 1), C.apply_coface(h, 0)
    # H0 G = beta G' H1
    x_p = _bch(-beta, _bch(_bch(h0, D.x), -h1))
    mu = face_image(C, lam_p, 2, [0])
    b = {S_: face_image(C, s, 2, S_) for S_ in ((0, 1), (1, 2), (0, 2))}
    H0 = face_image(C, h, 2, [0])
    g01p = face_image(C, x_p, 2, [0, 1])
    routeA = _twisted_bch(mu, _twisted_bch(mu, _ad(H0, D.t), b[0, 1]), _ad(g01p, b[1, 2]))
    t_p = _twisted_bch(mu, -b[0, 2], routeA)
    return DescentDatum(C, lam_p, x_p, t_p)


def two_transport(D: DescentDatum, Dp: DescentDatum, h, s, r):
    """(h~, s~) with r: (h, s) => (h~, s~)."""
    C = D.C
    alpha = _twisted_d(Dp.lam, r)
    ht = _bch(alpha, h)
    mu = C.apply_coface(Dp.lam, 1)
    a0, a1 = C.apply_coface(r, 1), C.apply_coface(r, 0)
    st = _twisted_bch(mu, _twisted_bch(mu, a0, s), -_ad(Dp.x, a1))
    return ht, st


# -- totalization ------------------------------------------------------------------

class TotSpace:
    """Degree-m part of the totalization at level cap p_max and polynomial
    degree bound D_t, as the kernel of the compatibility constraints."""

    def __init__(self, C: CosimplicialDgla, m, p_max=None, D_t=4):
        self.C = C
        self.m = m
        self.p_max = C.cap if p_max is None else p_max
        if self.p_max > C.cap:
            raise ValueError("level cap above the cosimplicial cap")
        self.D_t = D_t
        self.coords = []
        self.index = {}
        for n in range(self.p_max + 1):
            for k in C.keys(n):
                L = C.block(n, k)
                for j in range(n + 1):
                    q = m - j
                    for a in range(L.dims.get(q, 0)):
                        for mono in monomials(n, D_t, j):
                            key = (n, k, q, a, mono)
                            self.index[key] = len(self.coords)
                            self.coords.append(key)
        self._basis = None

    def constraint_rows(self):
        C = self.C
        rows = {}

        def put(rkey, col, c):
            if not c:
                return
            r = rows.setdefault(rkey, {})
            r[col] = r.get(col, 0) + c

        for col, (n, k, q, a, mono) in enumerate(self.coords):
            form = SullivanForm(n, {mono: 1})
            # this coordinate as the upper end of a coface condition
            if n >= 1:
                for i in range(n + 1):
                    face = [v for v in range(n + 1) if v != i]
                    rf = restrict(form, face)
                    for mono2, c in rf.terms.items():
                        put(("cf", n - 1, i, k, q, a, mono2), col, c)
            # as the lower end: - d_i(omega_n)
            if n + 1 <= self.p_max:
                for i in range(n + 2):
                    for K, (src, f) in C.coface(n, i).items():
                        if src != k:
                            continue
                        for row, c in _images(f, q, a):
                            put(("cf", n, i, K, q, row, mono), col, -c)
            # degeneracy: s^j*(omega_n) - s_j(omega_{n+1}) = 0 on level n forms on Delta^{n+1}
            if n + 1 <= self.p_max:
                for j in range(n + 1):
                    pb = pullback_degeneracy(form, j)
                    for mono2, c in pb.terms.items():
                        put(("dg", n, j, k, q, a, mono2), col, c)
            if n >= 1:
                for j in range(n):
                    for kk, (src, f) in C.codegeneracy(n - 1, j).items():
                        if src != k:
                            continue
                        for row, c in _images(f, q, a):
                            put(("dg", n - 1, j, kk, q, row, mono), col, -c)
        return rows

    def basis(self):
        if self._basis is None:
            rows = self.constraint_rows()
            entries = {}
            for i, (_, r) in enumerate(sorted(rows.items(), key=lambda kv: repr(kv[0]))):
                for col, c in r.items():
                    if c:
                        entries[(i, col)] = c
            ns = sparse_nullspace(entries, len(rows), len(self.coords)) if self.coords else []
            self._basis = ns
            self._pivots = []
            for v in ns:
                self._pivots.append(next(i for i, c in enumerate(v) if c))
            # make coordinates readable off free columns
            self._free = []
            for b, v in enumerate(ns):
                cand = [i for i, c in enumerate(v) if c == 1
                        and all(w[i] == 0 for bb, w in enumerate(ns) if bb != b)]
                if not cand:
                    raise AssertionError("nullspace basis not in reduced form")
                self._free.append(cand[0])
        return self._basis

    @property
    def dim(self):
        return len(self.basis())

    def contains(self, vec):
        rows = self.constraint_rows()
        for r in rows.values():
            if sum(c * vec[col] for col, c in r.items()):
                return False
        return True

    def coordinates(self, vec):
        """Coordinates in the kernel basis, or None if vec is not in Tot."""
        B = self.basis()
        coeffs = [vec[f] for f in self._free]
        recon = [0] * len(self.coords)
        for c, v in zip(coeffs, B):
            if c:
                for i, x in enumerate(v):
                    if x:
                        recon[i] += c * x
        if any(a != b for a, b in zip(recon, vec)):
            return None
        return coeffs

    def family(self, vec):
        """Vector -> {(n, k): SullivanForm with (q, a)-keyed dict coefficients}."""
        out = {}
        for col, c in enumerate(vec):
            if not c:
                continue
            n, k, q, a, mono = self.coords[col]
            out.setdefault((n, k), {}).setdefault((q, a), {})[mono] = c
        return out

    def vector(self, fam):
        vec = [0] * len(self.coords)
        for (n, k), by_basis in fam.items():
            for (q, a), forms in by_basis.items():
                for mono, c in forms.items():
                    key = (n, k, q, a, mono)
                    if key not in self.index:
                        raise ValueError(f"coordinate {key} outside the truncation")
                    vec[self.index[key]] += c
        return vec


def _images(f, q, a):
    if f is None:
        return [(a, 1)]
    return f.cols.get(q, {}).get(a, [])


def _tot_D(src: TotSpace, dst: TotSpace, vec):
    """D(alpha (x) x) = d alpha (x) x + (-1)^{|alpha|} alpha (x) dx."""
    out = [0] * len(dst.coords)
    C = src.C
    for col, c in enumerate(vec):
        if not c:
            continue
        n, k, q, a, mono = src.coords[col]
        form = SullivanForm(n, {mono: 1})
        for mono2, c2 in sullivan_d(form).terms.items():
            out[dst.index[(n, k, q, a, mono2)]] += c * c2
        L = C.block(n, k)
        sign = -1 if len(mono[1]) % 2 else 1
        for row, c2 in L.basis_d(q, a):
            out[dst.index[(n, k, q + 1, row, mono)]] += sign * c * c2
    return out


def _tot_bracket(A: TotSpace, B: TotSpace, dst: TotSpace, u, v):
    """[alpha x, beta y] = (-1)^{|x||beta|} alpha beta [x, y]."""
    out = [0] * len(dst.coords)
    C = A.C
    fu, fv = A.family(u), B.family(v)
    for (n, k), xs in fu.items():
        ys = fv.get((n, k))
        if not ys:
            continue
        L = C.block(n, k)
        for (q, a), fa in xs.items():
            for (r, b), fb in ys.items():
                br = L.basis_bracket(q, a, r, b)
                if not br:
                    continue
                for monoa, ca in fa.items():
                    for monob, cb in fb.items():
                        pr = wedge(SullivanForm(n, {monoa: ca}), SullivanForm(n, {monob: cb}))
                        ks = -1 if (q * len(monob[1])) % 2 else 1
                        for mono, c in pr.terms.items():
                            for row, c2 in br:
                                key = (n, k, q + r, row, mono)
                                if key not in dst.index:
                                    raise ValueError("bracket leaves the polynomial truncation; raise D_t")
                                out[dst.index[key]] += ks * c * c2
    return out


def totalize(C: CosimplicialDgla, p_max=None, D_t=4, degrees=None):
    """Tot(C) at level cap p_max as a DglaPresentation (plus the TotSpaces)."""
    p_max = C.cap if p_max is None else p_max
    if degrees is None:
        lo, hi = 0, 0
        for n in range(p_max + 1):
            for k in C.keys(n):
                ds = [p for p, d in C.block(n, k).dims.items() if d]
                if ds:
                    lo = min(lo, min(ds))
                    hi = max(hi, max(ds) + n)
        degrees = range(lo, hi + 1)
    degrees = list(degrees)
    spaces = {m: TotSpace(C, m, p_max, D_t) for m in degrees + [degrees[-1] + 1]}
    dims = {m: spaces[m].dim for m in degrees}
    diff = {}
    for m in degrees:
        if m + 1 not in degrees:
            continue
        for col, v in enumerate(spaces[m].basis()):
            img = _tot_D(spaces[m], spaces[m + 1], v)
            coords = spaces[m + 1].coordinates(img)
            if coords is None:
                raise AssertionError("D left the totalization")
            for row, c in enumerate(coords):
                if c:
                    diff.setdefault(m, []).append((row, col, c))
    abelian = all(C.block(n, k).is_abelian() for n in range(p_max + 1) for k in C.keys(n))
    entries = []
    if not abelian:
        for p in degrees:
            for q in degrees:
                if p + q not in degrees:
                    continue
                for a, u in enumerate(spaces[p].basis()):
                    for b, v in enumerate(spaces[q].basis()):
                        img = _tot_bracket(spaces[p], spaces[q], spaces[p + q], u, v)
                        coords = spaces[p + q].coordinates(img)
                        if coords is None:
                            raise AssertionError("bracket left the totalization")
                        for row, c in enumerate(coords):
                            if c:
                                entries.append((p, a, q, b, row, c))
    T = DglaPresentation(dims, diff, entries, name=f"Tot({C.name})")
    T.spaces = spaces
    return T


def whitney_family(D: DescentDatum, space: TotSpace, order):
    """Whitney image W(lambda) + W(x) + W(t) of the order-``order`` part of an
    abelian descent datum, as a vector of the degree-1 TotSpace."""
    C = D.C
    vec = [0] * len(space.coords)
    for n in range(space.p_max + 1):
        for cochain in (D.lam, D.x, D.t):
            k = cochain.level
            if k > n:
                continue
            for S in combinations(range(n + 1), k + 1):
                img = face_image(C, cochain, n, S)
                W = whitney_form(n, list(S))
                for key, part in img.parts.items():
                    for q, comp in part.comps.items():
                        for a, coeffs in enumerate(comp):
                            c = coeffs[order]
                            if not c:
                                continue
                            for mono, cw in W.terms.items():
                                vec[space.index[(n, key, q, a, mono)]] += c * cw
    return vec


# -- De Rham-Sullivan collections ---------------------------------------------------

class DrsCollection:
    """omega_sigma in Omega[Delta_sigma] (x) L(U_sigma) for every simplex of
    a nerve; vertices of Delta_sigma are the elements of sigma in order."""

    def __init__(self, nerve: Nerve, forms):
        self.nerve = nerve
        self.forms = {}
        for s, w in forms.items():
            s = nerve._norm(s)
            if w.p != len(s) - 1:
                raise ValueError(f"form on {s} lives on the wrong simplex")
            self.forms[s] = w
        for s in nerve.simplices:
            if s not in self.forms:
                raise ValueError(f"no form on {s}")

    def map(self, fn):
        return DrsCollection(self.nerve, {s: fn(s, w) for s, w in self.forms.items()})

    def is_zero(self):
        return all(w.is_zero() for w in self.forms.values())


def _face_positions(sigma, tau):
    return [tau.index(v) for v in sigma]


def drs_validate(coll: DrsCollection, restrict_coeff=None):
    """Face compatibility omega_tau|Delta_sigma = omega_sigma (after restricting
    coefficients from tau to sigma with ``restrict_coeff(sigma, tau, value)``
    for the local variant)."""
    for tau in coll.nerve.simplices:
        for sigma in coll.nerve.simplices:
            if sigma == tau or not set(sigma) <= set(tau):
                continue
            r = restrict(coll.forms[tau], _face_positions(sigma, tau))
            if restrict_coeff is not None:
                r = r.map_coeffs(lambda v: restrict_coeff(sigma, tau, v))
            if not (r - coll.forms[sigma]).is_zero():
                return {"pass": False, "witness": [list(sigma), list(tau)]}
    return {"pass": True, "witness": None}


def _form_degree_parts(w):
    out = {}
    for (e, I), v in w.terms.items():
        out.setdefault(len(I), {})[(e, I)] = v
    return out


class MultiCochain:
    """Finite sum of Hochschild cochains of different arities."""

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        if isinstance(parts, dict):
            parts = parts.values()
        table = {}
        for c in parts:
            if c.degree in table:
                table[c.degree] = table[c.degree] + c
            else:
                table[c.degree] = c
        self.parts = {k: v for k, v in table.items() if not v.is_zero()}

    def __add__(self, other):
        return MultiCochain(list(self.parts.values()) + list(other.parts.values()))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return MultiCochain([v.scale(c) for v in self.parts.values()])

    def is_zero(self):
        return not self.parts

    def __eq__(self, other):
        return isinstance(other, MultiCochain) and (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"MultiCochain(arities={sorted(self.parts)})"


def drs_differential(coll: DrsCollection, m, R=None):
    """(d_DR + delta + i_R) on a collection of forms with MultiCochain (or
    HochschildCochain) coefficients.

    m: multiplication cochain per simplex (dict) or a single cochain; R: a
    collection of 2-forms with central 0-cochain coefficients, or None.
    On beta (x) y with y of arity k: delta contributes (-1)^{|beta|} beta (x) delta y
    and alpha (x) r in R contributes (-1)^{|beta| + k} (alpha ^ beta) (x) i_r y.
    These are the brackets with m and R for the Koszul rule
    [alpha x, beta y] = (-1)^{|x||beta|} alpha beta [x, y].
    """
    from .hochschild import contract_i_R, hochschild_delta

    def mult(s):
        return m[s] if isinstance(m, dict) else m

    def parts(v):
        return v.parts.values() if isinstance(v, MultiCochain) else [v]

    def step(s, w):
        out = sullivan_d(w).map_coeffs(lambda v: v if isinstance(v, MultiCochain) else MultiCochain([v]))
        terms = {}
        for (e, I), val in w.terms.items():
            sign = -1 if len(I) % 2 else 1
            acc = [hochschild_delta(y, mult(s)).scale(sign) for y in parts(val)]
            terms[(e, I)] = MultiCochain(acc)
        out = out + SullivanForm(w.p, terms)
        if R is not None:
            Rs = R.forms[s]
            extra = {}
            for (e, I), val in w.terms.items():
                beta = SullivanForm(w.p, {(e, I): 1})
                for y in parts(val):
                    if y.degree == 0:
                        continue        # [r, y] = 0 for two 0-cochains
                    sign = -1 if (len(I) + y.degree) % 2 else 1
                    for key, rv in Rs.terms.items():
                        for r in parts(rv):
                            iy = contract_i_R(r, y)
                            if iy.is_zero():
                                continue
                            ab = wedge(SullivanForm(w.p, {key: 1}), beta)
                            for kk, c in ab.terms.items():
                                extra.setdefault(kk, []).append(iy.scale(sign * c))
            out = out + SullivanForm(w.p, {k: MultiCochain(v) for k, v in extra.items()})
        return out

    return coll.map(step)
