"""Finite-dimensional DGLAs given by structure constants.

A presentation only materializes a finite window of degrees.  Brackets and
differentials landing outside the window are dropped, so axioms are checked
only where every intermediate degree exists.

Elements carry coefficients in k[hbar]/(hbar^{N+1}); internally a component
of degree p is a list (one entry per basis vector) of coefficient lists of
length N+1.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .scalars import ArtinianSeries, as_exact, raw_mul, simplify


class DglaPresentation:
    """Graded Lie algebra with differential.

    dims: mapping degree -> dimension.
    differential: mapping degree p -> iterable of (row, col, c), meaning
        d(e^p_col) has coefficient c on e^{p+1}_row.
    bracket: iterable of (p, a, q, b, k, c): [e^p_a, e^q_b] has coefficient c
        on e^{p+q}_k.  Both orderings must be present (see ``antisymmetrize``).
    """

    def __init__(self, dims, differential=None, bracket=(), name="L",
                 labels=None, antisymmetrize=False):
        self.name = name
        self.dims = {int(p): int(n) for p, n in sorted(dims.items())}
        self.degrees = sorted(self.dims)
        self.labels = labels
        dcols = {p: {} for p in self.degrees}
        for p, entries in (differential or {}).items():
            p = int(p)
            for row, col, c in entries:
                c = as_exact(c)
                if c and (p + 1) in self.dims:
                    dcols[p].setdefault(col, {})
                    dcols[p][col][row] = dcols[p][col].get(row, 0) + c
        self._dcols = {p: {a: tuple((r, c) for r, c in sorted(rows.items()) if c)
                           for a, rows in cols.items()} for p, cols in dcols.items()}
        table = {}

        def put(p, a, q, b, k, c):
            key = (p, a, q, b)
            row = table.setdefault(key, {})
            row[k] = row.get(k, 0) + c

        for p, a, q, b, k, c in bracket:
            c = as_exact(c)
            if not c or (p + q) not in self.dims:
                continue
            put(p, a, q, b, k, c)
            if antisymmetrize and (p, a) != (q, b):
                put(q, b, p, a, k, c if (p * q) % 2 else -c)
        # left table: (p, a) -> q -> b -> ((k, c), ...)
        left = {}
        for (p, a, q, b), row in table.items():
            entries = tuple((k, c) for k, c in sorted(row.items()) if c)
            if entries:
                left.setdefault((p, a), {}).setdefault(q, {})[b] = entries
        self._left = left

    # -- raw access -------------------------------------------------------
    def bracket_entries(self):
        for (p, a), byq in self._left.items():
            for q, byb in byq.items():
                for b, entries in byb.items():
                    for k, c in entries:
                        yield p, a, q, b, k, c

    def basis_bracket(self, p, a, q, b):
        return self._left.get((p, a), {}).get(q, {}).get(b, ())

    def basis_d(self, p, a):
        return self._dcols.get(p, {}).get(a, ())

    def differential_entries(self):
        for p, cols in self._dcols.items():
            for a, rows in cols.items():
                for r, c in rows:
                    yield p, r, a, c

    def dim(self, p):
        return self.dims.get(p, 0)

    def __repr__(self):
        return f"DglaPresentation({self.name!r}, dims={self.dims})"

    def is_abelian(self):
        return not self._left


# ---------------------------------------------------------------------------

class GradedElement:
    """Element of L (x) k[hbar]/(hbar^{N+1})."""

    __slots__ = ("owner", "trunc", "comps")

    def __init__(self, owner: DglaPresentation, trunc: int, comps=None):
        self.owner = owner
        self.trunc = trunc
        cleaned = {}
        for p, vec in (comps or {}).items():
            if p not in owner.dims:
                continue
            if len(vec) != owner.dims[p]:
                raise ValueError(f"degree {p} component has length {len(vec)}, "
                                 f"expected {owner.dims[p]}")
            if any(any(c) for c in vec):
                cleaned[p] = [list(c) for c in vec]
        self.comps = cleaned

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, owner, trunc):
        return cls(owner, trunc, {})

    @classmethod
    def from_series(cls, owner, degree, vector):
        """vector: list of ArtinianSeries (no pole) of a common truncation."""
        trunc = vector[0].trunc if vector else 0
        rows = []
        for s in vector:
            if s.pole:
                raise ValueError("DGLA coefficients may not have poles")
            rows.append(list(s.coeffs))
        return cls(owner, trunc, {degree: rows})

    @classmethod
    def basis(cls, owner, trunc, degree, index, order=1, coeff=1):
        vec = [[0] * (trunc + 1) for _ in range(owner.dims[degree])]
        if order <= trunc:
            vec[index][order] = coeff
        return cls(owner, trunc, {degree: vec})

    @classmethod
    def from_orders(cls, owner, trunc, degree, by_order):
        """by_order: mapping hbar-order -> coefficient vector (list of scalars)."""
        vec = [[0] * (trunc + 1) for _ in range(owner.dims[degree])]
        for k, v in by_order.items():
            if k > trunc:
                continue
            for i, c in enumerate(v):
                vec[i][k] = vec[i][k] + c
        return cls(owner, trunc, {degree: vec})

    # accessors ----------------------------------------------------------
    def component(self, p):
        vec = self.comps.get(p)
        n = self.owner.dims.get(p, 0)
        if vec is None:
            return [ArtinianSeries.zero(self.trunc) for _ in range(n)]
        return [ArtinianSeries(c, self.trunc) for c in vec]

    def order(self, k, p):
        """Coefficient vector (scalars) of hbar^k in degree p."""
        vec = self.comps.get(p)
        n = self.owner.dims.get(p, 0)
        if vec is None or k > self.trunc:
            return [0] * n
        return [c[k] for c in vec]

    def degrees(self):
        return sorted(self.comps)

    def is_homogeneous(self, p):
        return all(q == p for q in self.comps)

    def in_maximal_ideal(self):
        return all(not c[0] for vec in self.comps.values() for c in vec)

    def is_zero(self):
        return not self.comps

    def valuation(self):
        """Lowest hbar-order with a nonzero coefficient (None for zero)."""
        best = None
        for vec in self.comps.values():
            for c in vec:
                for k, x in enumerate(c):
                    if x:
                        if best is None or k < best:
                            best = k
                        break
        return best

    def truncate_below(self, k):
        """Keep only hbar-orders < k."""
        comps = {p: [[x if j < k else 0 for j, x in enumerate(c)] for c in vec]
                 for p, vec in self.comps.items()}
        return GradedElement(self.owner, self.trunc, comps)

    def only_order(self, k):
        comps = {p: [[x if j == k else 0 for j, x in enumerate(c)] for c in vec]
                 for p, vec in self.comps.items()}
        return GradedElement(self.owner, self.trunc, comps)

    # arithmetic ---------------------------------------------------------
    def _same(self, other):
        if other.owner is not self.owner:
            raise ValueError("elements of different DGLAs")
        if other.trunc != self.trunc:
            raise ValueError(f"mismatched truncation orders {self.trunc} and {other.trunc}")

    def __add__(self, other):
        self._same(other)
        comps = {p: [list(c) for c in vec] for p, vec in self.comps.items()}
        for p, vec in other.comps.items():
            if p in comps:
                mine = comps[p]
                for i, c in enumerate(vec):
                    row = mine[i]
                    for j, x in enumerate(c):
                        if x:
                            row[j] += x
            else:
                comps[p] = [list(c) for c in vec]
        return GradedElement(self.owner, self.trunc, comps)

    def __neg__(self):
        return GradedElement(self.owner, self.trunc,
                             {p: [[-x for x in c] for c in vec] for p, vec in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        """Multiply by a scalar or an ArtinianSeries."""
        if isinstance(s, ArtinianSeries):
            if s.pole:
                raise ValueError("poles are not allowed here")
            sc = list(s.coeffs)
            return GradedElement(self.owner, self.trunc,
                                 {p: [raw_mul(sc, c) for c in vec] for p, vec in self.comps.items()})
        s = as_exact(s)
        return GradedElement(self.owner, self.trunc,
                             {p: [[s * x for x in c] for c in vec] for p, vec in self.comps.items()})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def shift_order(self, k):
        """Multiply by hbar^k (k >= 0)."""
        N = self.trunc
        comps = {p: [([0] * k + c)[:N + 1] for c in vec] for p, vec in self.comps.items()}
        return GradedElement(self.owner, self.trunc, comps)

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return (other.owner is self.owner and other.trunc == self.trunc
                and (self - other).is_zero())

    __hash__ = None

    def bracket(self, other):
        self._same(other)
        L = self.owner
        N1 = self.trunc + 1
        out = {}
        for p, xs in self.comps.items():
            for q, ys in other.comps.items():
                s = p + q
                if s not in L.dims:
                    continue
                for a, xa in enumerate(xs):
                    if not any(xa):
                        continue
                    row = L._left.get((p, a))
                    if not row:
                        continue
                    byb = row.get(q)
                    if not byb:
                        continue
                    target = out.get(s)
                    if target is None:
                        target = out[s] = [[0] * N1 for _ in range(L.dims[s])]
                    for b, entries in byb.items():
                        yb = ys[b]
                        if not any(yb):
                            continue
                        prod = raw_mul(xa, yb)
                        for k, c in entries:
                            t = target[k]
                            for j, v in enumerate(prod):
                                if v:
                                    t[j] += c * v
        return GradedElement(L, self.trunc, out)

    def d(self):
        L = self.owner
        N1 = self.trunc + 1
        out = {}
        for p, xs in self.comps.items():
            cols = L._dcols.get(p)
            if not cols or (p + 1) not in L.dims:
                continue
            for a, xa in enumerate(xs):
                entries = cols.get(a)
                if not entries or not any(xa):
                    continue
                target = out.get(p + 1)
                if target is None:
                    target = out[p + 1] = [[0] * N1 for _ in range(L.dims[p + 1])]
                for r, c in entries:
                    t = target[r]
                    for j, v in enumerate(xa):
                        if v:
                            t[j] += c * v
        return GradedElement(L, self.trunc, out)

    def __repr__(self):
        parts = []
        for p in sorted(self.comps):
            for i, c in enumerate(self.comps[p]):
                for k, x in enumerate(c):
                    if x:
                        parts.append(f"{simplify(x)}*h^{k}*e{p}_{i}")
        return f"GradedElement({' + '.join(parts) or '0'})"


def check_degree(x: GradedElement, p: int, what="element"):
    if not x.is_homogeneous(p):
        raise ValueError(f"{what} must be homogeneous of degree {p}, has degrees {x.degrees()}")


def check_in_m(x: GradedElement, what="element"):
    if not x.in_maximal_ideal():
        raise ValueError(f"{what} must have coefficients in the maximal ideal")


# ---------------------------------------------------------------------------
# validation

def _jacobi_sign(p, q):
    return -1 if (p * q) % 2 else 1


def validate_dgla(L: DglaPresentation):
    """Check d^2 = 0, antisymmetry, Jacobi and Leibniz on basis elements.

    Returns a dict axiom -> {"pass": bool, "witness": ...}.  Only checks that
    stay inside the materialized degree window are performed.
    """
    dims = L.dims
    report = {}

    # d^2
    wit = None
    for p in L.degrees:
        if (p + 2) not in dims:
            continue
        for a in range(dims[p]):
            acc = {}
            for r, c in L.basis_d(p, a):
                for r2, c2 in L.basis_d(p + 1, r):
                    acc[r2] = acc.get(r2, 0) + c * c2
            bad = [r for r, v in acc.items() if v]
            if bad:
                wit = {"degree": p, "basis": a, "output": bad[0]}
                break
        if wit:
            break
    report["d_squared"] = {"pass": wit is None, "witness": wit}

    # antisymmetry
    wit = None
    for (p, a), byq in L._left.items():
        for q, byb in byq.items():
            for b, entries in byb.items():
                other = dict(L.basis_bracket(q, b, p, a))
                sgn = _jacobi_sign(p, q)
                for k, c in entries:
                    if c + sgn * other.get(k, 0):
                        wit = {"x": (p, a), "y": (q, b), "output": k}
                        break
                if wit is None:
                    mine = dict(entries)
                    for k, c in other.items():
                        if k not in mine and c:
                            wit = {"x": (p, a), "y": (q, b), "output": k}
                            break
                if wit:
                    break
            if wit:
                break
        if wit:
            break
    report["antisymmetry"] = {"pass": wit is None, "witness": wit}

    # Jacobi: [x,[y,z]] - [[x,y],z] - (-1)^{pq}[y,[x,z]] = 0
    right = {}
    for p, a, q, b, k, c in L.bracket_entries():
        right.setdefault((q, b), []).append((p, a, k, c))

    def valid(p, q, r):
        return ((p + q) in dims and (q + r) in dims and (p + r) in dims
                and (p + q + r) in dims)

    acc = {}
    for q, b, r, c_, k, c1 in L.bracket_entries():
        s = q + r
        for p, a, m, c2 in right.get((s, k), ()):
            if valid(p, q, r):
                key = ((p, a), (q, b), (r, c_), m)
                acc[key] = acc.get(key, 0) + c1 * c2
    for p, a, q, b, k, c1 in L.bracket_entries():
        s = p + q
        for r, byc in L._left.get((s, k), {}).items():
            if not valid(p, q, r):
                continue
            for c_, entries in byc.items():
                for m, c2 in entries:
                    key = ((p, a), (q, b), (r, c_), m)
                    acc[key] = acc.get(key, 0) - c1 * c2
    for p, a, r, c_, k, c1 in L.bracket_entries():
        s = p + r
        for q, b, m, c2 in right.get((s, k), ()):
            if not valid(p, q, r):
                continue
            sgn = _jacobi_sign(p, q)
            key = ((p, a), (q, b), (r, c_), m)
            acc[key] = acc.get(key, 0) - sgn * c1 * c2
    wit = None
    for key, v in acc.items():
        if v:
            wit = {"x": key[0], "y": key[1], "z": key[2], "output": key[3], "value": str(v)}
            break
    report["jacobi"] = {"pass": wit is None, "witness": wit}

    # Leibniz: d[x,y] = [dx,y] + (-1)^p [x,dy]
    wit = None
    degs = L.degrees
    for p in degs:
        for q in degs:
            if not ((p + q) in dims and (p + q + 1) in dims and (p + 1) in dims
                    and (q + 1) in dims):
                continue
            for a in range(dims[p]):
                da = L.basis_d(p, a)
                rowp = L._left.get((p, a), {}).get(q + 1, {})
                for b in range(dims[q]):
                    acc2 = {}
                    for k, c in L.basis_bracket(p, a, q, b):
                        for r, c2 in L.basis_d(p + q, k):
                            acc2[r] = acc2.get(r, 0) + c * c2
                    for r, c in da:
                        for m, c2 in L.basis_bracket(p + 1, r, q, b):
                            acc2[m] = acc2.get(m, 0) - c * c2
                    sgn = -1 if p % 2 else 1
                    if rowp:
                        for r, c in L.basis_d(q, b):
                            for m, c2 in rowp.get(r, ()):
                                acc2[m] = acc2.get(m, 0) - sgn * c * c2
                    bad = [m for m, v in acc2.items() if v]
                    if bad:
                        wit = {"x": (p, a), "y": (q, b), "output": bad[0]}
                        break
                if wit:
                    break
            if wit:
                break
        if wit:
            break
    report["leibniz"] = {"pass": wit is None, "witness": wit}
    return report


def report_ok(report):
    return all(v["pass"] for v in report.values())


# ---------------------------------------------------------------------------
# exponentials and BCH

def _check_exp_arg(X):
    check_degree(X, 0, "exponent")
    check_in_m(X, "exponent")


def exp_ad(X: GradedElement, target: GradedElement) -> GradedElement:
    """sum_k ad(X)^k(target)/k!, finite because X lies in the maximal ideal."""
    _check_exp_arg(X)
    return exp_ad_with(X.bracket, target, X.trunc)


def exp_ad_with(ad, target, trunc):
    out = target
    term = target
    for k in range(1, trunc + 1):
        term = ad(term).scale(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
    return out


@lru_cache(maxsize=None)
def _free_log_exp_exp(K):
    """log(exp(x) exp(y)) in the free associative algebra on {0, 1}, words of
    length <= K, as a dict word -> Fraction."""

    def mul(u, v):
        out = {}
        for w1, c1 in u.items():
            for w2, c2 in v.items():
                if len(w1) + len(w2) <= K:
                    w = w1 + w2
                    out[w] = out.get(w, 0) + c1 * c2
        return {w: c for w, c in out.items() if c}

    def exp_letter(letter):
        return {(letter,) * n: Fraction(1, _fact(n)) for n in range(K + 1)}

    prod = mul(exp_letter(0), exp_letter(1))
    u = {w: c for w, c in prod.items() if w}
    out = {}
    power = {(): Fraction(1)}
    for n in range(1, K + 1):
        power = mul(power, u)
        coef = Fraction((-1) ** (n + 1), n)
        for w, c in power.items():
            out[w] = out.get(w, 0) + coef * c
    return {w: c for w, c in out.items() if c}


@lru_cache(maxsize=None)
def dynkin_coefficients(K):
    """Lie-word coefficients of BCH up to length K.

    Each word w of length n in the free associative expansion contributes
    coeff(w)/n times the right-nested bracket [w_1,[w_2,...,w_n]] (the
    Dynkin-Specht-Wever projection).  Returns a tuple of (word, coefficient).
    """
    terms = []
    for w, c in sorted(_free_log_exp_exp(K).items(), key=lambda t: (len(t[0]), t[0])):
        terms.append((w, c / len(w)))
    return tuple(terms)


def _fact(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def bch_with(bracket, X, Y, K):
    """BCH product for an arbitrary bilinear bracket on degree-0-like elements,
    exact when brackets of K+1 arguments vanish."""
    letters = (X, Y)
    memo = {}

    def nested(word):
        if word in memo:
            return memo[word]
        if len(word) == 1:
            val = letters[word[0]]
        else:
            val = bracket(letters[word[0]], nested(word[1:]))
        memo[word] = val
        return val

    out = None
    for w, c in dynkin_coefficients(K):
        v = nested(w)
        if v.is_zero():
            continue
        term = v.scale(c)
        out = term if out is None else out + term
    if out is None:
        out = X - X
    return out


def bch(X: GradedElement, Y: GradedElement) -> GradedElement:
    """Z with exp(Z) = exp(X) exp(Y) in exp(L^0 (x) m)."""
    _check_exp_arg(X)
    _check_exp_arg(Y)
    return bch_with(lambda a, b: a.bracket(b), X, Y, X.trunc)


def bch_many(elements, bracket=None):
    """Left-folded BCH product of a nonempty sequence."""
    elements = list(elements)
    out = elements[0]
    for e in elements[1:]:
        if bracket is None:
            out = bch(out, e)
        else:
            out = bch_with(bracket, out, e, out.trunc)
    return out


def bch_inverse(X):
    return -X
