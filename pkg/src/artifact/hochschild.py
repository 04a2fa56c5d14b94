"""Hochschild cochains of a finite-dimensional algebra and the Gerstenhaber
bracket.

A k-cochain D is a sparse map (i_1..i_k) -> {output index: coefficient}.
Conventions:

    (D o E)(a_1..) = sum_i (-1)^{i(q-1)} D(a_1..a_i, E(a_{i+1}..a_{i+q}), ..)
    [D, E] = D o E - (-1)^{(p-1)(q-1)} E o D
    delta D = [m, D]

so delta f(a, b) = a f(b) - f(ab) + f(a) b on 1-cochains and [m, m] is twice
the associator.  The DGLA degree of a k-cochain is k - 1.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .dgla import DglaPresentation, GradedElement, check_degree
from .scalars import ArtinianSeries, as_exact

__all__ = [
    "AlgebraPresentation", "HochschildCochain", "gerstenhaber", "circle",
    "hochschild_delta", "contract_i_R", "hochschild_dgla", "DeformedTable",
    "deformation_bridge", "truncated_polynomial_algebra", "matrix_algebra",
    "triangular_algebra",
]


class AlgebraPresentation:
    """Finite-dimensional algebra with structure constants e_a e_b = sum m^k_ab e_k."""

    def __init__(self, dim, mult, unit=None, name="A", check=True):
        self.dim = int(dim)
        self.name = name
        table = {}
        items = mult.items() if isinstance(mult, dict) else mult
        for entry in items:
            if isinstance(mult, dict):
                (a, b), row = entry
                row = row.items() if isinstance(row, dict) else enumerate(row)
                for k, c in row:
                    c = as_exact(c)
                    if c:
                        table.setdefault((a, b), {})
                        table[(a, b)][k] = table[(a, b)].get(k, 0) + c
            else:
                a, b, k, c = entry
                c = as_exact(c)
                if c:
                    table.setdefault((a, b), {})
                    table[(a, b)][k] = table[(a, b)].get(k, 0) + c
        self.table = {key: {k: c for k, c in row.items() if c} for key, row in table.items()}
        self.table = {key: row for key, row in self.table.items() if row}
        self.unit = None if unit is None else [as_exact(c) for c in unit]
        if check and self.unit is not None and not self.unit_ok():
            raise ValueError("unit is not a two-sided unit")

    def product(self, a, b):
        return self.table.get((a, b), {})

    def mul(self, x, y):
        """Product of coefficient vectors."""
        out = [0] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                for k, c in self.table.get((a, b), {}).items():
                    out[k] += c * xa * yb
        return out

    def basis_vector(self, a):
        v = [0] * self.dim
        v[a] = 1
        return v

    def unit_ok(self):
        u = self.unit
        for a in range(self.dim):
            e = self.basis_vector(a)
            if self.mul(u, e) != e or self.mul(e, u) != e:
                return False
        return True

    def associator_witness(self):
        """First basis triple with (ab)c != a(bc), or None.  Only triples with
        ab != 0 or bc != 0 can fail, so only those are visited."""
        n = self.dim
        left = {}
        right = {}
        for (a, b) in self.table:
            left.setdefault(b, set()).add(a)
            right.setdefault(a, set()).add(b)
        for b in range(n):
            As = left.get(b, set())
            Cs = right.get(b, set())
            triples = [(a, c) for a in sorted(As) for c in range(n)]
            triples += [(a, c) for c in sorted(Cs) for a in range(n) if a not in As]
            for a, c in sorted(triples):
                lhs = {}
                for k, x in self.table.get((a, b), {}).items():
                    for m, y in self.table.get((k, c), {}).items():
                        lhs[m] = lhs.get(m, 0) + x * y
                rhs = {}
                for k, x in self.table.get((b, c), {}).items():
                    for m, y in self.table.get((a, k), {}).items():
                        rhs[m] = rhs.get(m, 0) + x * y
                keys = set(lhs) | set(rhs)
                if any(lhs.get(m, 0) != rhs.get(m, 0) for m in keys):
                    return (a, b, c)
        return None

    def is_associative(self):
        return self.associator_witness() is None

    def left_matrix(self, x):
        """Matrix of y -> x y (rows = output index)."""
        M = [[0] * self.dim for _ in range(self.dim)]
        for b in range(self.dim):
            col = self.mul(x, self.basis_vector(b))
            for k in range(self.dim):
                M[k][b] = col[k]
        return M

    def inverse(self, x):
        """Two-sided inverse of x (solves x y = 1 and checks y x = 1)."""
        from .linalg import solve
        if self.unit is None:
            raise ValueError("algebra has no unit")
        key = tuple(x)
        cache = self.__dict__.setdefault("_inv_cache", {})
        if key in cache:
            return list(cache[key])
        y = solve(self.left_matrix(x), self.unit)
        if y is None or self.mul(y, x) != self.unit:
            raise ZeroDivisionError("element is not invertible")
        if len(cache) < 4096:
            cache[key] = tuple(y)
        return y

    def multiplication_cochain(self):
        return HochschildCochain(self, 2, {(a, b): dict(row) for (a, b), row in self.table.items()})

    def __repr__(self):
        return f"AlgebraPresentation({self.name!r}, dim={self.dim})"


def truncated_polynomial_algebra(n, name=None):
    """Q[x]/(x^n) with basis 1, x, .., x^{n-1}."""
    mult = [(a, b, a + b, 1) for a in range(n) for b in range(n) if a + b < n]
    unit = [1] + [0] * (n - 1)
    return AlgebraPresentation(n, mult, unit, name=name or f"Q[x]/(x^{n})")


def matrix_algebra(n, name=None):
    """n x n matrices, basis E_ij at index i*n + j."""
    mult = [(i * n + j, j * n + k, i * n + k, 1)
            for i in range(n) for j in range(n) for k in range(n)]
    unit = [1 if i == j else 0 for i in range(n) for j in range(n)]
    return AlgebraPresentation(n * n, mult, unit, name=name or f"M_{n}")


# ---------------------------------------------------------------------------

class HochschildCochain:
    """k-cochain: tensor maps input index tuples to {output: coefficient}."""

    __slots__ = ("algebra", "degree", "tensor", "normalized")

    def __init__(self, algebra, degree, tensor=None, normalized=None):
        self.algebra = algebra
        self.degree = int(degree)
        clean = {}
        for key, row in (tensor or {}).items():
            key = tuple(key)
            if len(key) != self.degree:
                raise ValueError(f"key {key} has wrong arity for a {degree}-cochain")
            r = {k: c for k, c in row.items() if c}
            if r:
                clean[key] = r
        self.tensor = clean
        self.normalized = self.is_normalized() if normalized is None else normalized

    def is_zero(self):
        return not self.tensor

    def __add__(self, other):
        self._same(other)
        t = {k: dict(r) for k, r in self.tensor.items()}
        for key, row in other.tensor.items():
            tr = t.setdefault(key, {})
            for k, c in row.items():
                tr[k] = tr.get(k, 0) + c
        return HochschildCochain(self.algebra, self.degree, t,
                                 normalized=self.normalized and other.normalized)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return HochschildCochain(self.algebra, self.degree,
                                 {k: {o: s * c for o, c in r.items()} for k, r in self.tensor.items()},
                                 normalized=self.normalized)

    def __eq__(self, other):
        if not isinstance(other, HochschildCochain):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()

    __hash__ = None

    def _same(self, other):
        if other.algebra is not self.algebra:
            raise ValueError("cochains over different algebras")
        if other.degree != self.degree:
            raise ValueError("cochains of different degrees")

    def evaluate(self, *args):
        """D(a_1..a_k) on coefficient vectors."""
        out = [0] * self.algebra.dim
        for key, row in self.tensor.items():
            w = 1
            for slot, idx in enumerate(key):
                w = w * args[slot][idx]
                if not w:
                    break
            if not w:
                continue
            for k, c in row.items():
                out[k] += w * c
        return out

    def is_normalized(self):
        u = self.algebra.unit
        if self.degree == 0:
            return True
        if u is None:
            return False
        groups = {}
        for key, row in self.tensor.items():
            for pos, idx in enumerate(key):
                if not u[idx]:
                    continue
                g = groups.setdefault((pos, key[:pos] + key[pos + 1:]), {})
                for k, c in row.items():
                    g[k] = g.get(k, 0) + u[idx] * c
        return all(not any(g.values()) for g in groups.values())

    def by_output(self):
        idx = {}
        for key, row in self.tensor.items():
            for k, c in row.items():
                idx.setdefault(k, []).append((key, c))
        return idx

    def __repr__(self):
        return f"HochschildCochain(degree={self.degree}, nnz={sum(len(r) for r in self.tensor.values())})"


def circle(D: HochschildCochain, E: HochschildCochain) -> HochschildCochain:
    if D.algebra is not E.algebra:
        raise ValueError("cochains over different algebras")
    p, q = D.degree, E.degree
    out = {}
    if p + q == 0:
        raise ValueError("the circle product of two 0-cochains has degree -1")
    if p == 0:
        return HochschildCochain(D.algebra, q - 1, {}, normalized=True)
    E_out = E.by_output()
    for key, row in D.tensor.items():
        for i in range(p):
            inserted = E_out.get(key[i])
            if not inserted:
                continue
            sign = -1 if (i * (q - 1)) % 2 else 1
            pre, post = key[:i], key[i + 1:]
            for ekey, ec in inserted:
                nk = pre + ekey + post
                tr = out.setdefault(nk, {})
                for k, c in row.items():
                    tr[k] = tr.get(k, 0) + sign * ec * c
    return HochschildCochain(D.algebra, p + q - 1, out,
                             normalized=D.normalized and E.normalized)


def gerstenhaber(D: HochschildCochain, E: HochschildCochain) -> HochschildCochain:
    p, q = D.degree, E.degree
    if p + q == 0:
        raise ValueError("the bracket of two 0-cochains has degree -1 (zero)")
    a = circle(D, E) if p > 0 else HochschildCochain(D.algebra, p + q - 1, {}, normalized=True)
    b = circle(E, D) if q > 0 else HochschildCochain(D.algebra, p + q - 1, {}, normalized=True)
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    return a - b.scale(sign)


def hochschild_delta(D: HochschildCochain, m: HochschildCochain = None) -> HochschildCochain:
    """delta D = [m, D]."""
    if m is None:
        m = D.algebra.multiplication_cochain()
    return gerstenhaber(m, D)


def contract_i_R(R: HochschildCochain, D: HochschildCochain) -> HochschildCochain:
    """(i_R D)(a_1..a_n) = sum_i (-1)^i D(a_1..a_i, R, a_{i+1}..a_n)."""
    if R.degree != 0:
        raise ValueError("i_R needs a 0-cochain R")
    if D.degree < 1:
        raise ValueError("i_R needs a cochain of degree >= 1")
    return circle(D, R)


# ---------------------------------------------------------------------------
# the Hochschild DGLA as a presentation

class HochschildDgla:
    """C^{*+1}(A, A) with DGLA degrees in ``degrees`` materialized.

    Attributes: presentation (DglaPresentation), index[p] (list of basis
    cochain keys (inputs, output)), lookup[p] (key -> position).
    """

    def __init__(self, algebra: AlgebraPresentation, degrees=(-1, 0, 1, 2)):
        self.algebra = algebra
        n = algebra.dim
        self.degrees = tuple(degrees)
        self.index = {}
        self.lookup = {}
        for p in self.degrees:
            k = p + 1
            keys = [(ins, out) for ins in itertools.product(range(n), repeat=k)
                    for out in range(n)]
            self.index[p] = keys
            self.lookup[p] = {key: i for i, key in enumerate(keys)}
        dims = {p: len(self.index[p]) for p in self.degrees}

        # bracket on basis cochains by direct insertion
        acc = {}
        for p in self.degrees:
            kp = p + 1
            if kp == 0:
                continue
            for q in self.degrees:
                if (p + q) not in dims:
                    continue
                kq = q + 1
                sign_swap = -1 if (p * q) % 2 else 1
                lookup_q = self.lookup[q]
                lookup_out = self.lookup[p + q]
                for a, (u, v) in enumerate(self.index[p]):
                    for i in range(kp):
                        z = u[i]
                        sign = -1 if (i * (kq - 1)) % 2 else 1
                        pre, post = u[:i], u[i + 1:]
                        for w in itertools.product(range(n), repeat=kq):
                            b = lookup_q[(w, z)]
                            kk = lookup_out[(pre + w + post, v)]
                            # D o E contributes to [D, E] and, with the swap
                            # sign, to [E, D]
                            key = (p, a, q, b, kk)
                            acc[key] = acc.get(key, 0) + sign
                            key2 = (q, b, p, a, kk)
                            acc[key2] = acc.get(key2, 0) - sign_swap * sign
        entries = [(p, a, q, b, k, c) for (p, a, q, b, k), c in acc.items() if c]
        mvec = algebra.multiplication_cochain()
        diff = {}
        for p in self.degrees:
            if (p + 1) not in dims:
                continue
            rows = []
            for a, (u, v) in enumerate(self.index[p]):
                basis = HochschildCochain(algebra, p + 1, {u: {v: 1}}, normalized=False)
                img = gerstenhaber(mvec, basis)
                for key, row in img.tensor.items():
                    for out, c in row.items():
                        rows.append((self.lookup[p + 1][(key, out)], a, c))
            diff[p] = rows
        self.presentation = DglaPresentation(dims, diff, entries,
                                             name=f"C({algebra.name})")

    def to_element(self, D: HochschildCochain, trunc=None, order=0):
        p = D.degree - 1
        N = trunc if trunc is not None else 0
        L = self.presentation
        vec = [[0] * (N + 1) for _ in range(L.dims[p])]
        for key, row in D.tensor.items():
            for out, c in row.items():
                i = self.lookup[p][(key, out)]
                if isinstance(c, ArtinianSeries):
                    for k in range(N + 1):
                        vec[i][k] += c.coeff(k)
                else:
                    vec[i][order] += c
        return GradedElement(L, N, {p: vec})

    def from_element(self, x: GradedElement, p=None, order=None):
        """Cochain with ArtinianSeries values (or the hbar^order coefficient)."""
        if p is None:
            degs = x.degrees()
            if len(degs) > 1:
                raise ValueError("element is not homogeneous")
            p = degs[0] if degs else 1
        t = {}
        for i, coeffs in enumerate(x.comps.get(p, [])):
            if not any(coeffs):
                continue
            ins, out = self.index[p][i]
            val = coeffs[order] if order is not None else ArtinianSeries(coeffs, x.trunc)
            if val:
                t.setdefault(ins, {})[out] = val
        return HochschildCochain(self.algebra, p + 1, t, normalized=False)


_DGLA_CACHE = {}


def hochschild_dgla(algebra, degrees=(-1, 0, 1, 2)) -> HochschildDgla:
    key = (id(algebra), tuple(degrees))
    hit = _DGLA_CACHE.get(key)
    if hit is not None and hit.algebra is algebra:
        return hit
    h = HochschildDgla(algebra, degrees)
    _DGLA_CACHE[key] = h
    return h


# ---------------------------------------------------------------------------

class DeformedTable:
    """Multiplication e_a * e_b = sum_k P^k_ab(hbar) e_k over k[hbar]/(hbar^{N+1})."""

    def __init__(self, base: AlgebraPresentation, trunc, entries):
        self.base = base
        self.trunc = trunc
        t = {}
        for (a, b), row in entries.items():
            r = {}
            for k, s in row.items():
                if not isinstance(s, ArtinianSeries):
                    s = ArtinianSeries.const(s, trunc)
                if s.trunc != trunc:
                    raise ValueError("mixed truncation orders")
                if s:
                    r[k] = s
            if r:
                t[(a, b)] = r
        self.table = t

    @classmethod
    def undeformed(cls, base, trunc):
        return cls(base, trunc, {(a, b): dict(row) for (a, b), row in base.table.items()})

    def order(self, k):
        out = {}
        for (a, b), row in self.table.items():
            r = {o: s.coeff(k) for o, s in row.items() if s.coeff(k)}
            if r:
                out[(a, b)] = r
        return out

    def associator_witness(self):
        n = self.base.dim
        N = self.trunc
        zero = ArtinianSeries.zero(N)
        for a in range(n):
            for b in range(n):
                ab = self.table.get((a, b), {})
                for c in range(n):
                    lhs, rhs = {}, {}
                    for k, x in ab.items():
                        for m, y in self.table.get((k, c), {}).items():
                            lhs[m] = lhs.get(m, zero) + x * y
                    for k, x in self.table.get((b, c), {}).items():
                        for m, y in self.table.get((a, k), {}).items():
                            rhs[m] = rhs.get(m, zero) + x * y
                    for m in set(lhs) | set(rhs):
                        if lhs.get(m, zero) != rhs.get(m, zero):
                            return (a, b, c)
        return None

    def is_associative(self):
        return self.associator_witness() is None


def deformation_bridge(obj, direction, hdgla: HochschildDgla = None):
    """to_mc: DeformedTable -> degree-1 element lambda = table - m.
    from_mc: degree-1 element (of hdgla.presentation) -> DeformedTable."""
    if direction == "to_mc":
        table = obj
        base = table.base
        if table.order(0) != {k: dict(v) for k, v in base.table.items()}:
            raise ValueError("table does not reduce to the base product modulo the maximal ideal")
        h = hdgla or hochschild_dgla(base)
        N = table.trunc
        L = h.presentation
        vec = [[0] * (N + 1) for _ in range(L.dims[1])]
        for (a, b), row in table.table.items():
            for k, s in row.items():
                i = h.lookup[1][((a, b), k)]
                for j in range(1, N + 1):
                    vec[i][j] += s.coeff(j)
        return GradedElement(L, N, {1: vec})
    if direction == "from_mc":
        lam = obj
        check_degree(lam, 1, "Maurer-Cartan carrier")
        if hdgla is None:
            raise ValueError("from_mc needs the Hochschild DGLA the element lives in")
        base = hdgla.algebra
        N = lam.trunc
        entries = {}
        for (a, b), row in base.table.items():
            for k, c in row.items():
                entries.setdefault((a, b), {})[k] = ArtinianSeries.const(c, N)
        for i, coeffs in enumerate(lam.comps.get(1, [])):
            if not any(coeffs):
                continue
            (a, b), k = hdgla.index[1][i]
            s = ArtinianSeries(coeffs, N)
            r = entries.setdefault((a, b), {})
            r[k] = r.get(k, ArtinianSeries.zero(N)) + s
        return DeformedTable(base, N, entries)
    raise ValueError("direction must be 'to_mc' or 'from_mc'")


def half(x):
    return x.scale(Fraction(1, 2))


def triangular_algebra(n, name=None):
    """Upper triangular n x n matrices, basis E_ij (i <= j) in row order."""
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    idx = {p: a for a, p in enumerate(pairs)}
    mult = [(idx[(i, j)], idx[(j, k)], idx[(i, k)], 1)
            for (i, j) in pairs for k in range(j, n)]
    unit = [1 if i == j else 0 for (i, j) in pairs]
    return AlgebraPresentation(len(pairs), mult, unit, name=name or f"T_{n}")
