"""Polynomial differential forms on simplices.

A form on the p-simplex is a dict mapping monomials to coefficients.  The
relations t_0 + .. + t_p = 1 and dt_0 + .. + dt_p = 0 are used to eliminate
t_0 and dt_0, so a monomial is (e, I) with e the exponents of t_1..t_p and I
a strictly increasing tuple of indices in 1..p (the dt factors).

Coefficients are scalars by default; anything with ``+`` and a ``scale``
method (or ordinary scalar multiplication) also works, which is how the
DGLA- and cochain-valued forms of the simplicial module are built.
"""

from __future__ import annotations

from itertools import combinations
from math import comb


def _scale(c, v):
    if hasattr(v, "scale"):
        return v.scale(c)
    return c * v


def _nonzero(v):
    if hasattr(v, "is_zero"):
        return not v.is_zero()
    return bool(v)


def _add_into(table, key, value):
    if key in table:
        table[key] = table[key] + value
    else:
        table[key] = value


def _clean(table):
    return {k: v for k, v in table.items() if _nonzero(v)}


def _merge_dt(I, J):
    """dt_I ^ dt_J as (sign, sorted tuple) or None."""
    if set(I) & set(J):
        return None
    seq = list(I) + list(J)
    sign = 1
    # count inversions
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign, tuple(sorted(seq))


class SullivanForm:
    """Element of Omega[Delta^p] (with coefficients in some module)."""

    __slots__ = ("p", "terms")

    def __init__(self, p, terms=None):
        self.p = p
        t = {}
        for (e, I), v in (terms or {}).items():
            e = tuple(e)
            I = tuple(I)
            if len(e) != p:
                raise ValueError("exponent vector has the wrong length")
            if any(i < 1 or i > p for i in I) or list(I) != sorted(set(I)):
                raise ValueError(f"bad dt index tuple {I}")
            _add_into(t, (e, I), v)
        self.terms = _clean(t)

    # constructors
    @classmethod
    def t(cls, p, i, coeff=1):
        """The coordinate t_i (i = 0 expands to 1 - t_1 - .. - t_p)."""
        if i == 0:
            terms = {((0,) * p, ()): coeff}
            for j in range(1, p + 1):
                e = [0] * p
                e[j - 1] = 1
                terms[(tuple(e), ())] = -coeff
            return cls(p, terms)
        e = [0] * p
        e[i - 1] = 1
        return cls(p, {(tuple(e), ()): coeff})

    @classmethod
    def dt(cls, p, i, coeff=1):
        if i == 0:
            return cls(p, {((0,) * p, (j,)): -coeff for j in range(1, p + 1)})
        return cls(p, {((0,) * p, (i,)): coeff})

    @classmethod
    def const(cls, p, c):
        return cls(p, {((0,) * p, ()): c})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if other.p != self.p:
            raise ValueError("forms on different simplices")
        t = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(t, k, v)
        return SullivanForm(self.p, t)

    def scale(self, c):
        return SullivanForm(self.p, {k: _scale(c, v) for k, v in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, SullivanForm):
            return NotImplemented
        return other.p == self.p and (self - other).is_zero()

    __hash__ = None

    def degree_parts(self):
        return sorted({len(I) for (_, I) in self.terms})

    def poly_degree(self):
        return max((sum(e) for (e, _) in self.terms), default=0)

    def map_coeffs(self, fn):
        return SullivanForm(self.p, {k: fn(v) for k, v in self.terms.items()})

    def __repr__(self):
        parts = []
        for (e, I), v in sorted(self.terms.items()):
            mono = "*".join(f"t{i + 1}^{x}" for i, x in enumerate(e) if x)
            dts = "".join(f"dt{i}" for i in I)
            parts.append(f"({v}){'*' + mono if mono else ''}{'*' + dts if dts else ''}")
        return f"SullivanForm(p={self.p}: {' + '.join(parts) or '0'})"


def sullivan_d(w: SullivanForm) -> SullivanForm:
    out = {}
    for (e, I), v in w.terms.items():
        for i in range(1, w.p + 1):
            k = e[i - 1]
            if not k or i in I:
                continue
            ne = list(e)
            ne[i - 1] -= 1
            sign, J = _merge_dt((i,), I)
            _add_into(out, (tuple(ne), J), _scale(sign * k, v))
    return SullivanForm(w.p, out)


def wedge(a: SullivanForm, b: SullivanForm, mul=None, sign_fn=None) -> SullivanForm:
    """a ^ b.  ``mul(u, v)`` multiplies coefficients (default: *).
    ``sign_fn(v_a, I_b)`` may supply an extra Koszul sign."""
    if a.p != b.p:
        raise ValueError("forms on different simplices")
    out = {}
    for (e1, I), u in a.terms.items():
        for (e2, J), v in b.terms.items():
            m = _merge_dt(I, J)
            if m is None:
                continue
            sign, K = m
            if sign_fn is not None:
                sign *= sign_fn(u, J)
            prod = mul(u, v) if mul else u * v
            e = tuple(x + y for x, y in zip(e1, e2))
            _add_into(out, (e, K), _scale(sign, prod))
    return SullivanForm(a.p, out)


def _poly_power_of_sum(p, idxs, k):
    """(1 - sum_{i in idxs} t_i)^k as dict exps -> int."""
    out = {}
    m = len(idxs)
    # multinomial expansion of (1 + sum(-t_i))^k
    def rec(pos, remaining, exps, coeff):
        if pos == m:
            e = [0] * p
            for i, x in zip(idxs, exps):
                e[i - 1] = x
            c = coeff * (-1) ** sum(exps)
            out[tuple(e)] = out.get(tuple(e), 0) + c
            return
        for x in range(remaining + 1):
            rec(pos + 1, remaining - x, exps + [x], coeff * comb(remaining, x))
    rec(0, k, [], 1)
    return out


def restrict(w: SullivanForm, face) -> SullivanForm:
    """Restriction to the face spanned by the vertices ``face`` (an increasing
    sequence in 0..p).  The result lives on Delta^{len(face)-1} with the face
    vertices relabelled 0..q in order."""
    face = list(face)
    if face != sorted(set(face)) or not face or face[0] < 0 or face[-1] > w.p:
        raise ValueError(f"bad face {face}")
    p = w.p
    q = len(face) - 1
    f0 = face[0]
    others = face[1:]
    pos = {v: j + 1 for j, v in enumerate(others)}  # new labels 1..q
    out = {}
    for (e, I), val in w.terms.items():
        # kill coordinates outside the face (vertex 0 is implicit)
        if any(e[i - 1] for i in range(1, p + 1) if i not in face):
            continue
        if any(i not in face for i in I):
            continue
        if f0 == 0:
            ne = [0] * q
            for v in others:
                ne[pos[v] - 1] = e[v - 1]
            J = tuple(pos[i] for i in I)
            _add_into(out, (tuple(ne), J), val)
            continue
        # vertex f0 becomes the eliminated one:
        # t_{f0} = 1 - sum_{v in others} t_v, dt_{f0} = - sum dt_v
        k = e[f0 - 1]
        base = [0] * q
        for v in others:
            base[pos[v] - 1] = e[v - 1]
        power = _poly_power_of_sum(q, list(range(1, q + 1)), k)
        rest = [pos[i] for i in I if i != f0]
        if f0 in I:
            # position of dt_{f0} inside I determines a sign when it is replaced
            choices = []
            for j in range(1, q + 1):
                if j in rest:
                    continue
                seq = [pos[i] if i != f0 else j for i in I]
                sign = -1
                for a in range(len(seq)):
                    for b in range(a + 1, len(seq)):
                        if seq[a] > seq[b]:
                            sign = -sign
                choices.append((sign, tuple(sorted(seq))))
        else:
            seq = rest
            sign = 1
            for a in range(len(seq)):
                for b in range(a + 1, len(seq)):
                    if seq[a] > seq[b]:
                        sign = -sign
            choices = [(sign, tuple(sorted(seq)))]
        for pe, pc in power.items():
            ne = tuple(x + y for x, y in zip(base, pe))
            for sign, J in choices:
                _add_into(out, (ne, J), _scale(sign * pc, val))
    return SullivanForm(q, out)


def pullback_degeneracy(w: SullivanForm, j) -> SullivanForm:
    """Pull back along s^j: Delta^{p+1} -> Delta^p, which sends the barycentric
    coordinates u_k of Delta^p to t_k (k < j), t_j + t_{j+1} (k = j) and
    t_{k+1} (k > j)."""
    p = w.p
    P = p + 1
    if not 0 <= j <= p:
        raise ValueError("degeneracy index out of range")

    def coord(k):
        if k < j:
            return [SullivanForm.t(P, k)]
        if k == j:
            return [SullivanForm.t(P, j), SullivanForm.t(P, j + 1)]
        return [SullivanForm.t(P, k + 1)]

    def dcoord(k):
        if k < j:
            return SullivanForm.dt(P, k)
        if k == j:
            return SullivanForm.dt(P, j) + SullivanForm.dt(P, j + 1)
        return SullivanForm.dt(P, k + 1)

    u = {k: sum(coord(k)[1:], coord(k)[0]) for k in range(1, p + 1)}
    du = {k: dcoord(k) for k in range(1, p + 1)}
    one = SullivanForm.const(P, 1)
    out = SullivanForm(P, {})
    for (e, I), val in w.terms.items():
        f = one
        for k in range(1, p + 1):
            for _ in range(e[k - 1]):
                f = wedge(f, u[k])
        for i in I:
            f = wedge(f, du[i])
        out = out + SullivanForm(P, {key: _scale(c, val) for key, c in f.terms.items()})
    return out


def face_vertices(p, i):
    """Vertices of the face of Delta^{p+1} hit by the coface d^i: [p] -> [p+1]."""
    return [v for v in range(p + 2) if v != i]


def monomials(p, max_poly_degree, form_degree):
    """All monomials (e, I) with |e| <= max_poly_degree and |I| = form_degree."""
    exps = []

    def rec(pos, remaining, cur):
        if pos == p:
            exps.append(tuple(cur))
            return
        for x in range(remaining + 1):
            rec(pos + 1, remaining - x, cur + [x])
    rec(0, max_poly_degree, [])
    dts = list(combinations(range(1, p + 1), form_degree))
    return [(e, I) for e in exps for I in dts]


def whitney_form(p, S):
    """Whitney form W_S = k! sum_i (-1)^i t_{s_i} dt_{s_0}..^..dt_{s_k}."""
    k = len(S) - 1
    fact = 1
    for a in range(2, k + 1):
        fact *= a
    out = SullivanForm(p, {})
    for i in range(k + 1):
        f = SullivanForm.t(p, S[i], (-1) ** i * fact)
        for j in range(k + 1):
            if j != i:
                f = wedge(f, SullivanForm.dt(p, S[j]))
        out = out + f
    return out


def cohomology_dims(p, max_weight):
    """Dimensions of H^j of Omega[Delta^p] restricted to forms of weight
    (polynomial degree + form degree) at most ``max_weight``.  d preserves
    weight, so this is a subcomplex."""
    from .linalg import sparse_rank
    bases = [monomials(p, max_weight - j, j) if max_weight >= j else []
             for j in range(p + 1)]
    index = [{m: i for i, m in enumerate(b)} for b in bases]
    ranks = []
    for j in range(p + 1):
        if j == p:
            ranks.append(0)
            continue
        entries = {}
        for col, m in enumerate(bases[j]):
            img = sullivan_d(SullivanForm(p, {m: 1}))
            for key, c in img.terms.items():
                entries[(index[j + 1][key], col)] = c
        ranks.append(sparse_rank(entries, len(bases[j + 1]), len(bases[j])))
    dims = []
    for j in range(p + 1):
        prev = ranks[j - 1] if j > 0 else 0
        dims.append(len(bases[j]) - ranks[j] - prev)
    return dims
