"""Weyl algebra, Fedosov connections and characteristic classes on a flat
symplectic model.

Conventions
-----------
* A Weyl element is a finite sum of monomials hbar^k y^alpha x^beta.  The
  fibre variables y^1..y^{2n} carry the Moyal product, the base variables
  x^1..x^{2n} (optional, polynomial) are central.  Truncation is by
  ``hbar``-order ``N`` and by the filtration degree |y| + 2k <= ``D``.  The
  Moyal product is additive in that filtration, so the truncated algebra is a
  quotient by an ideal and stays exactly associative.
* Elements of g~ = (1/hbar) W are stored through a representative F standing
  for F/hbar.  Their bracket and adjoint action is ``(F*G - G*F)/hbar``.  The
  connection form A, the curvature and c all live in this representation.
* theta = sum_m (i hbar)^m theta_m, so in the representative the 2-form
  coefficient of hbar^(m+1) is i^m theta_m and theta_{-1} = omega.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

import numpy as np

from .linalg import inverse
from .scalars import GaussianRational, I, as_exact, simplify

__all__ = [
    "SymplecticModel", "WeylElement", "WeylForm", "CentralSeries", "FedosovPair",
    "moyal", "weyl_bracket", "weyl_basis", "a_minus_one", "delta_inverse", "harmonic",
    "decomposition_residual", "curvature", "fedosov_solve", "characteristic_class",
    "flatness_residual", "nabla_c_residual", "leibniz_residual", "gauge_move",
    "shift_move", "exact_term", "rw_form", "omega_pairing",
]


def _ipow_half(k):
    """(i/2)^k as an exact scalar."""
    r = Fraction(1, 2 ** k)
    m = k % 4
    if m == 0:
        return r
    if m == 1:
        return GaussianRational(0, r)
    if m == 2:
        return -r
    return GaussianRational(0, -r)


def _ipow(m):
    m %= 4
    return (1, I, -1, -I)[m]


def _falling(exps, mu):
    out = 1
    for e, m in zip(exps, mu):
        if m > e:
            return 0
        for t in range(m):
            out *= e - t
    return out


class SymplecticModel:
    """Constant symplectic form omega_ab on R^{2n} and its Poisson tensor
    omega^ab, with omega^ac omega_cb = delta^a_b."""

    def __init__(self, omega, name=None):
        omega = [[as_exact(v) for v in row] for row in omega]
        m = len(omega)
        if m == 0 or m % 2 or any(len(r) != m for r in omega):
            raise ValueError("omega must be a square matrix of even size")
        for a in range(m):
            for b in range(m):
                if omega[a][b] != -omega[b][a]:
                    raise ValueError("omega is not antisymmetric")
        P = inverse(omega)
        if P is None:
            raise ValueError("omega is degenerate (Poisson tensor undefined)")
        self.n = m // 2
        self.dim = m
        self.omega = [[simplify(v) for v in row] for row in omega]
        self.poisson = [[simplify(v) for v in row] for row in P]
        self.name = name or f"flat R^{m}"
        self._terms = {}

    @classmethod
    def standard(cls, n=1):
        """omega^{a, a+n} = 1, so y^a * y^{a+n} - y^{a+n} * y^a = i hbar."""
        m = 2 * n
        P = [[0] * m for _ in range(m)]
        for a in range(n):
            P[a][a + n] = 1
            P[a + n][a] = -1
        return cls.from_poisson(P, name=f"standard n={n}")

    @classmethod
    def from_poisson(cls, P, name=None):
        Pinv = inverse([[as_exact(v) for v in row] for row in P])
        if Pinv is None:
            raise ValueError("Poisson tensor is degenerate")
        return cls(Pinv, name)

    def __eq__(self, other):
        return isinstance(other, SymplecticModel) and self.omega == other.omega

    def __hash__(self):
        return hash(tuple(map(tuple, self.omega)))

    def moyal_terms(self, k):
        """[(mu, nu, w)]: the order-k bidifferential operator
        (1/k!) (omega^{ab} d_a x d_b)^k grouped by derivative multi-indices."""
        if k in self._terms:
            return self._terms[k]
        pairs = [(a, b, self.poisson[a][b]) for a in range(self.dim)
                 for b in range(self.dim) if self.poisson[a][b]]
        acc = {}
        for combo in combinations_with_replacement(range(len(pairs)), k):
            mu = [0] * self.dim
            nu = [0] * self.dim
            w = Fraction(1)
            counts = {}
            for p in combo:
                counts[p] = counts.get(p, 0) + 1
            for p, m in counts.items():
                a, b, v = pairs[p]
                mu[a] += m
                nu[b] += m
                w *= Fraction(v) ** m / factorial(m)
            key = (tuple(mu), tuple(nu))
            acc[key] = acc.get(key, 0) + w
        out = [(mu, nu, w) for (mu, nu), w in acc.items() if w]
        self._terms[k] = out
        return out

    def __repr__(self):
        return f"SymplecticModel({self.name})"


def _fil(key):
    k, y, _ = key
    return sum(y) + 2 * k


class WeylElement:
    """Sparse truncated element of the Weyl algebra; keys (k, y, x)."""

    __slots__ = ("model", "terms", "N", "D")

    def __init__(self, model: SymplecticModel, terms=None, N=3, D=6):
        self.model = model
        self.N = N
        self.D = D
        zero = (0,) * model.dim
        t = {}
        for key, c in (terms or {}).items():
            if len(key) == 2:
                k, y = key
                x = zero
            else:
                k, y, x = key
            y, x = tuple(y), tuple(x)
            if len(y) != model.dim or len(x) != model.dim:
                raise ValueError("exponent vector has the wrong length")
            if k < -1:
                raise ValueError("only a single 1/hbar pole is allowed")
            if k > N or sum(y) + 2 * k > D:
                continue
            c = as_exact(c)
            key = (k, y, x)
            t[key] = t.get(key, 0) + c
        self.terms = {k: simplify(c) for k, c in t.items() if c}

    @classmethod
    def _raw(cls, model, terms, N, D):
        e = object.__new__(cls)
        e.model, e.N, e.D = model, N, D
        e.terms = {k: simplify(c) for k, c in terms.items() if c}
        return e

    # constructors
    @classmethod
    def zero(cls, model, N=3, D=6):
        return cls._raw(model, {}, N, D)

    @classmethod
    def monomial(cls, model, k=0, y=None, x=None, coeff=1, N=3, D=6):
        z = (0,) * model.dim
        return cls(model, {(k, tuple(y or z), tuple(x or z)): coeff}, N, D)

    @classmethod
    def const(cls, model, c=1, N=3, D=6):
        return cls.monomial(model, coeff=c, N=N, D=D)

    @classmethod
    def y(cls, model, a, N=3, D=6):
        e = [0] * model.dim
        e[a] = 1
        return cls.monomial(model, y=e, N=N, D=D)

    @classmethod
    def x(cls, model, i, N=3, D=6):
        e = [0] * model.dim
        e[i] = 1
        return cls.monomial(model, x=e, N=N, D=D)

    @classmethod
    def hbar(cls, model, k=1, N=3, D=6):
        return cls.monomial(model, k=k, N=N, D=D)

    # arithmetic
    def _check(self, other):
        if not isinstance(other, WeylElement):
            raise TypeError("expected a WeylElement")
        if other.model is not self.model and other.model != self.model:
            raise ValueError("model mismatch")
        if (self.N, self.D) != (other.N, other.D):
            raise ValueError("truncation mismatch")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return WeylElement._raw(self.model, t, self.N, self.D)

    def __neg__(self):
        return WeylElement._raw(self.model, {k: -c for k, c in self.terms.items()}, self.N, self.D)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_exact(c)
        return WeylElement._raw(self.model, {k: c * v for k, v in self.terms.items()}, self.N, self.D)

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return moyal(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return (self.model == other.model and (self.N, self.D) == (other.N, other.D)
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    @property
    def pole(self):
        return any(k[0] < 0 for k in self.terms)

    def coefficient(self, k, y, x=None):
        x = tuple(x) if x is not None else (0,) * self.model.dim
        return self.terms.get((k, tuple(y), x), 0)

    def max_filtration(self):
        return max((_fil(k) for k in self.terms), default=None)

    def truncate(self, N=None, D=None):
        """Change the truncation; terms outside the new bounds are dropped."""
        N = self.N if N is None else N
        D = self.D if D is None else D
        return WeylElement._raw(self.model, {k: c for k, c in self.terms.items()
                                             if k[0] <= N and _fil(k) <= D}, N, D)

    def y_independent(self):
        return WeylElement._raw(self.model, {k: c for k, c in self.terms.items()
                                             if not any(k[1])}, self.N, self.D)

    def y_dependent(self):
        return WeylElement._raw(self.model, {k: c for k, c in self.terms.items()
                                             if any(k[1])}, self.N, self.D)

    def d_y(self, a):
        t = {}
        for (k, y, x), c in self.terms.items():
            if y[a]:
                ny = list(y)
                ny[a] -= 1
                t[(k, tuple(ny), x)] = c * y[a]
        return WeylElement._raw(self.model, t, self.N, self.D)

    def d_x(self, i):
        t = {}
        for (k, y, x), c in self.terms.items():
            if x[i]:
                nx = list(x)
                nx[i] -= 1
                t[(k, y, tuple(nx))] = c * x[i]
        return WeylElement._raw(self.model, t, self.N, self.D)

    def times_y(self, a):
        """Commutative multiplication by y^a (used by the Koszul homotopy)."""
        t = {}
        for (k, y, x), c in self.terms.items():
            ny = list(y)
            ny[a] += 1
            key = (k, tuple(ny), x)
            if _fil(key) <= self.D:
                t[key] = c
        return WeylElement._raw(self.model, t, self.N, self.D)

    def __repr__(self):
        if not self.terms:
            return "WeylElement(0)"
        parts = []
        for (k, y, x), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            mono = []
            if k:
                mono.append(f"h^{k}")
            mono += [f"y{a + 1}^{e}" for a, e in enumerate(y) if e]
            mono += [f"x{a + 1}^{e}" for a, e in enumerate(x) if e]
            parts.append(f"({c})" + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(parts)


def _star_terms(model, ft, gt, N, D, odd_only=False, shift=0):
    """Moyal product of term dicts.  With ``odd_only`` only odd-order terms
    are kept, doubled: that is f*g - g*f.  ``shift`` lowers the hbar power."""
    out = {}
    for (k1, y1, x1), c1 in ft.items():
        f1 = sum(y1) + 2 * k1
        for (k2, y2, x2), c2 in gt.items():
            fil = f1 + sum(y2) + 2 * k2 - 2 * shift
            if fil > D:
                continue
            kk = k1 + k2 - shift
            if kk > N:
                continue
            x = tuple(a + b for a, b in zip(x1, x2))
            c12 = c1 * c2
            kmax = min(N - kk, sum(y1), sum(y2))
            for k in range(kmax + 1):
                if odd_only and k % 2 == 0:
                    continue
                if kk + k < -1:
                    raise ValueError("product has a pole of order 2")
                pref = _ipow_half(k) * (2 if odd_only else 1)
                for mu, nu, w in model.moyal_terms(k):
                    a = _falling(y1, mu)
                    if not a:
                        continue
                    b = _falling(y2, nu)
                    if not b:
                        continue
                    y = tuple(p + q - m - n for p, q, m, n in zip(y1, y2, mu, nu))
                    key = (kk + k, y, x)
                    out[key] = out.get(key, 0) + c12 * pref * (w * a * b)
    return out


def moyal(f: WeylElement, g: WeylElement) -> WeylElement:
    """f*g = sum_k (i hbar/2)^k / k! omega^{a1 b1}..omega^{ak bk}
    d_{a1..ak} f d_{b1..bk} g, truncated."""
    f._check(g)
    return WeylElement._raw(f.model, _star_terms(f.model, f.terms, g.terms, f.N, f.D), f.N, f.D)


def weyl_bracket(F: WeylElement, G: WeylElement) -> WeylElement:
    """(F*G - G*F)/hbar, computed exactly from the odd Moyal terms."""
    F._check(G)
    return WeylElement._raw(F.model, _star_terms(F.model, F.terms, G.terms, F.N, F.D,
                                                 odd_only=True, shift=1), F.N, F.D)


def weyl_basis(model, N, D, x_degree=0):
    """All monomials hbar^k y^alpha (x^beta with |beta| <= x_degree),
    0 <= k <= N, filtration <= D."""
    m = model.dim
    xs = list(_exponents(m, x_degree))
    out = []
    for k in range(N + 1):
        for deg in range(D - 2 * k + 1):
            for y in _exponents_exact(m, deg):
                for x in xs:
                    out.append(WeylElement._raw(model, {(k, y, x): 1}, N, D))
    return out


def _exponents_exact(m, deg):
    if m == 1:
        yield (deg,)
        return
    for a in range(deg, -1, -1):
        for rest in _exponents_exact(m - 1, deg - a):
            yield (a,) + rest


def _exponents(m, maxdeg):
    for deg in range(maxdeg + 1):
        yield from _exponents_exact(m, deg)


# -- forms ------------------------------------------------------------------------------

def _merge(I1, I2):
    """Sign and sorted union of disjoint sorted index tuples, or (0, None)."""
    if set(I1) & set(I2):
        return 0, None
    inv = sum(1 for a in I1 for b in I2 if a > b)
    return (-1) ** inv, tuple(sorted(I1 + I2))


class WeylForm:
    """Exterior form in dx^1..dx^{2n} with Weyl-element coefficients."""

    __slots__ = ("model", "degree", "comps", "N", "D")

    def __init__(self, model, degree, comps=None, N=3, D=6):
        self.model, self.degree, self.N, self.D = model, degree, N, D
        out = {}
        for Ix, F in (comps or {}).items():
            if len(Ix) != degree:
                raise ValueError("multi-index length does not match the degree")
            if len(set(Ix)) < len(Ix):
                continue
            srt = tuple(sorted(Ix))
            sign = _perm_sign(Ix)
            if (F.N, F.D) != (N, D):
                F = F.truncate(N, D)
            G = F.scale(sign)
            out[srt] = out[srt] + G if srt in out else G
        self.comps = {k: v for k, v in out.items() if not v.is_zero()}

    @classmethod
    def _raw(cls, model, degree, comps, N, D):
        f = object.__new__(cls)
        f.model, f.degree, f.N, f.D = model, degree, N, D
        f.comps = {k: v for k, v in comps.items() if not v.is_zero()}
        return f

    @classmethod
    def zero(cls, model, degree, N=3, D=6):
        return cls._raw(model, degree, {}, N, D)

    @classmethod
    def from_element(cls, F: WeylElement, Ix=()):
        return cls(F.model, len(Ix), {tuple(Ix): F}, F.N, F.D)

    def _like(self, degree, comps):
        return WeylForm._raw(self.model, degree, comps, self.N, self.D)

    def _zeroel(self):
        return WeylElement.zero(self.model, self.N, self.D)

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        c = dict(self.comps)
        for k, v in other.comps.items():
            c[k] = c[k] + v if k in c else v
        return self._like(self.degree, c)

    def __neg__(self):
        return self._like(self.degree, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._like(self.degree, {k: v.scale(c) for k, v in self.comps.items()})

    def map(self, fn):
        return self._like(self.degree, {k: fn(v) for k, v in self.comps.items()})

    def __eq__(self, other):
        if not isinstance(other, WeylForm):
            return NotImplemented
        return self.degree == other.degree and self.comps == other.comps

    def is_zero(self):
        return not self.comps

    def component(self, Ix):
        return self.comps.get(tuple(Ix), self._zeroel())

    def truncate(self, N=None, D=None):
        N = self.N if N is None else N
        D = self.D if D is None else D
        return WeylForm._raw(self.model, self.degree,
                             {k: v.truncate(N, D) for k, v in self.comps.items()}, N, D)

    def y_independent(self):
        return self.map(WeylElement.y_independent)

    def y_dependent(self):
        return self.map(WeylElement.y_dependent)

    def _combine(self, other, op):
        out = {}
        for I1, F in self.comps.items():
            for I2, G in other.comps.items():
                s, K = _merge(I1, I2)
                if not s:
                    continue
                v = op(F, G)
                if s < 0:
                    v = -v
                out[K] = out[K] + v if K in out else v
        return self._like(self.degree + other.degree, out)

    def wedge(self, other):
        """Product of forms with the Moyal product on coefficients."""
        return self._combine(other, moyal)

    def bracket(self, other):
        """Graded bracket in the g~ representation: alpha^beta (x) (F*G - G*F)/hbar."""
        return self._combine(other, weyl_bracket)

    def _ext(self, deriv):
        out = {}
        for Ix, F in self.comps.items():
            for b in range(self.model.dim):
                if b in Ix:
                    continue
                G = deriv(F, b)
                if G.is_zero():
                    continue
                pos = sum(1 for a in Ix if a < b)
                K = tuple(sorted(Ix + (b,)))
                if pos % 2:
                    G = -G
                out[K] = out[K] + G if K in out else G
        return self._like(self.degree + 1, out)

    def d(self):
        """Base de Rham differential sum_i dx^i d/dx^i."""
        return self._ext(WeylElement.d_x)

    def delta(self):
        """Koszul differential sum_b dx^b d/dy^b."""
        return self._ext(WeylElement.d_y)

    def delta_star(self):
        """sum_b y^b i(d/dx^b)."""
        out = {}
        if self.degree == 0:
            return self._like(-1, {})
        for Ix, F in self.comps.items():
            for pos, b in enumerate(Ix):
                G = F.times_y(b)
                if pos % 2:
                    G = -G
                K = Ix[:pos] + Ix[pos + 1:]
                out[K] = out[K] + G if K in out else G
        return self._like(self.degree - 1, out)

    def __repr__(self):
        if not self.comps:
            return f"WeylForm(deg {self.degree}, 0)"
        return " + ".join(f"[{v!r}] dx{''.join(str(i + 1) for i in Ix)}"
                          for Ix, v in sorted(self.comps.items()))


def _perm_sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def a_minus_one(model, N=3, D=6):
    """A_{-1} = sum_b (sum_a omega_ab y^a) dx^b in the g~ representation;
    [A_{-1}, w] = -i delta(w)."""
    comps = {}
    for b in range(model.dim):
        t = {}
        for a in range(model.dim):
            if model.omega[a][b]:
                y = [0] * model.dim
                y[a] = 1
                t[(0, tuple(y), (0,) * model.dim)] = model.omega[a][b]
        comps[(b,)] = WeylElement._raw(model, t, N, D)
    return WeylForm._raw(model, 1, comps, N, D)


def delta_inverse(a: WeylForm) -> WeylForm:
    """Homotopy for [A_{-1}, .]: on a term of y-degree p and form degree q,
    p + q > 0, multiply i delta* by 1/(p+q)."""
    if a.degree == 0:
        return WeylForm.zero(a.model, -1, a.N, a.D)
    out = WeylForm.zero(a.model, a.degree - 1, a.N, a.D)
    groups = {}
    for Ix, F in a.comps.items():
        for key, c in F.terms.items():
            w = sum(key[1]) + a.degree
            groups.setdefault(w, {}).setdefault(Ix, {})[key] = c
    for w, comps in groups.items():
        piece = WeylForm._raw(a.model, a.degree,
                              {Ix: WeylElement._raw(a.model, t, a.N, a.D) for Ix, t in comps.items()},
                              a.N, a.D)
        out = out + piece.delta_star().scale(I / w)
    return out


def harmonic(a: WeylForm) -> WeylForm:
    """Projection to y-independent 0-forms (p = q = 0)."""
    if a.degree:
        return WeylForm.zero(a.model, a.degree, a.N, a.D)
    return a.y_independent()


def decomposition_residual(a: WeylForm) -> WeylForm:
    """a - [A_{-1}, d^{-1} a] - d^{-1}[A_{-1}, a] - H(a); zero when the homotopy is right."""
    A = a_minus_one(a.model, a.N, a.D)
    out = a - delta_inverse(a.delta().scale(-I)) - harmonic(a)
    if a.degree:
        out = out - A.bracket(delta_inverse(a))
    return out


def curvature(A: WeylForm) -> WeylForm:
    """Lifted curvature d(A_{-1}+A) + 1/2[A_{-1}+A, A_{-1}+A]."""
    full = a_minus_one(A.model, A.N, A.D) + A
    return full.d() + full.bracket(full).scale(Fraction(1, 2))


def nabla(A: WeylForm, w: WeylForm) -> WeylForm:
    full = a_minus_one(A.model, A.N, A.D) + A
    return w.d() + full.bracket(w)


# -- central series --------------------------------------------------------------------

class CentralSeries:
    """theta = sum_m (i hbar)^m theta_m, each theta_m a 2-form (or p-form)
    with polynomial coefficients in x.  terms: (m, (i<j..), x) -> coeff."""

    def __init__(self, model, terms=None, degree=2):
        self.model = model
        self.degree = degree
        self.terms = {k: simplify(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def from_matrices(cls, model, mats):
        z = (0,) * model.dim
        t = {}
        for m, M in mats.items():
            M = [[as_exact(v) for v in row] for row in M]
            if len(M) != model.dim or any(len(r) != model.dim for r in M):
                raise ValueError("coefficient matrix has the wrong size")
            for i in range(model.dim):
                for j in range(model.dim):
                    if M[i][j] != -M[j][i]:
                        raise ValueError(f"theta_{m} is not antisymmetric")
                    if i < j and M[i][j]:
                        t[(int(m), (i, j), z)] = M[i][j]
        return cls(model, t)

    @classmethod
    def from_rep(cls, form: WeylForm, window=None):
        """Read theta off a y-independent representative form."""
        t = {}
        for Ix, F in form.comps.items():
            for (k, y, x), c in F.terms.items():
                if window is not None and _fil((k, y, x)) > window:
                    continue
                if any(y):
                    raise ValueError(f"not central: y-dependent term {(k, y, x)} in dx{Ix}")
                m = k - 1
                t[(m, Ix, x)] = c * _ipow(-m)
        return cls(form.model, t, form.degree)

    def to_rep(self, N, D):
        comps = {}
        for (m, Ix, x), c in self.terms.items():
            key = (m + 1, (0,) * self.model.dim, x)
            if key[0] > N or 2 * key[0] > D:
                continue
            F = comps.setdefault(Ix, {})
            F[key] = F.get(key, 0) + c * _ipow(m)
        return WeylForm._raw(self.model, self.degree,
                             {Ix: WeylElement._raw(self.model, t, N, D) for Ix, t in comps.items()},
                             N, D)

    def orders(self):
        return sorted({k[0] for k in self.terms})

    def is_constant(self):
        return not any(any(k[2]) for k in self.terms)

    def matrix(self, m):
        """Antisymmetric coefficient matrix of the constant 2-form theta_m."""
        if self.degree != 2:
            raise ValueError("matrix() needs a 2-form")
        M = [[0] * self.model.dim for _ in range(self.model.dim)]
        for (mm, (i, j), x), c in self.terms.items():
            if mm != m:
                continue
            if any(x):
                raise ValueError("theta_m depends on the base point")
            M[i][j] = c
            M[j][i] = -c
        return M

    def truncate(self, max_order):
        return CentralSeries(self.model, {k: v for k, v in self.terms.items()
                                          if k[0] <= max_order}, self.degree)

    def d(self):
        out = {}
        for (m, Ix, x), c in self.terms.items():
            for i in range(self.model.dim):
                if not x[i] or i in Ix:
                    continue
                nx = list(x)
                nx[i] -= 1
                pos = sum(1 for a in Ix if a < i)
                key = (m, tuple(sorted(Ix + (i,))), tuple(nx))
                out[key] = out.get(key, 0) + (-1) ** pos * c * x[i]
        return CentralSeries(self.model, out, self.degree + 1)

    def is_closed(self):
        return not self.d().terms

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return CentralSeries(self.model, t, self.degree)

    def __neg__(self):
        return CentralSeries(self.model, {k: -v for k, v in self.terms.items()}, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, CentralSeries):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __repr__(self):
        return f"CentralSeries({self.terms})"


# -- Fedosov pairs ----------------------------------------------------------------------

@dataclass
class FedosovPair:
    """(A, c) with nabla = d + [A_{-1} + A, .].  Forms are kept at filtration
    bound ``window + margin``; identities are asserted on filtration <= window."""
    model: SymplecticModel
    A: WeylForm
    c: WeylForm
    window: int
    iterations: int = 0

    @property
    def N(self):
        return self.A.N

    @property
    def D(self):
        return self.A.D

    def nabla(self, w):
        return nabla(self.A, w)

    def curvature(self):
        return curvature(self.A)


def _theta_input(model, theta_target):
    if theta_target is None:
        return CentralSeries.from_matrices(model, {-1: model.omega})
    if isinstance(theta_target, CentralSeries):
        return theta_target
    return CentralSeries.from_matrices(model, theta_target)


def fedosov_solve(model, theta_target=None, truncation=(3, 6), absorb="c", margin=4,
                  max_iter=None):
    """Build a pair (A, c) whose lifted curvature minus c equals theta_target.

    absorb="c": A is the Koszul-gauge solution of dA + [A_{-1}, A] + 1/2[A,A] = 0
    (A = 0 on the flat model) and all corrections sit in c.  absorb="A": the
    corrections are built into A by the recursion A = d^{-1}(tau - dA - 1/2[A,A])
    and c = 0.
    """
    N, window = truncation
    theta = _theta_input(model, theta_target)
    if not theta.is_constant():
        raise ValueError("theta_target must have constant coefficients on the flat model")
    if theta.matrix(-1) != model.omega:
        raise ValueError("leading term of theta_target must be omega/(i hbar)")
    if any(m < -1 for m in theta.orders()):
        raise ValueError("theta_target has a pole of order > 1")
    if absorb not in ("c", "A"):
        raise ValueError("absorb must be 'c' or 'A'")
    D = window + margin
    target = theta.to_rep(N, D)
    lead = CentralSeries.from_matrices(model, {-1: model.omega}).to_rep(N, D)
    tau = target - lead if absorb == "A" else WeylForm.zero(model, 2, N, D)
    A = WeylForm.zero(model, 1, N, D)
    limit = max_iter if max_iter is not None else D + 2
    it = 0
    while True:
        it += 1
        rhs = tau - A.d() - A.bracket(A).scale(Fraction(1, 2))
        new = delta_inverse(rhs)
        if new == A:
            break
        A = new
        if it > limit:
            raise RuntimeError("Fedosov recursion did not stabilize")
    c = curvature(A) - target
    return FedosovPair(model, A, c, window, it)


def _window(form, window):
    return form.truncate(D=window)


def characteristic_class(A, c=None, window=None) -> CentralSeries:
    """theta = (lifted nabla)^2 - c; raises ValueError if y-dependence survives
    within the filtration window."""
    if isinstance(A, FedosovPair):
        window = A.window if window is None else window
        A, c = A.A, A.c
    window = A.D if window is None else window
    theta = curvature(A) - c
    return CentralSeries.from_rep(theta, window)


def flatness_residual(pair: FedosovPair, basis=None, window=None):
    """[(w, r)] for basis elements w with nabla^2 w - [c, w] nonzero in the window."""
    window = pair.window if window is None else window
    basis = basis if basis is not None else weyl_basis(pair.model, pair.N, window)
    bad = []
    for w in basis:
        w = w.truncate(pair.N, pair.D)
        W = WeylForm._raw(pair.model, 0, {(): w}, pair.N, pair.D)
        r = pair.nabla(pair.nabla(W)) - pair.c.bracket(W)
        r = _window(r, window)
        if not r.is_zero():
            bad.append((w, r))
    return bad


def nabla_c_residual(pair: FedosovPair, window=None):
    window = pair.window if window is None else window
    return _window(pair.nabla(pair.c), window)


def leibniz_residual(pair: FedosovPair, f: WeylElement, g: WeylElement, window=None):
    """nabla(f*g) - nabla(f)*g - f*nabla(g) in the window."""
    window = pair.window if window is None else window
    F = WeylForm._raw(pair.model, 0, {(): f.truncate(pair.N, pair.D)}, pair.N, pair.D)
    G = WeylForm._raw(pair.model, 0, {(): g.truncate(pair.N, pair.D)}, pair.N, pair.D)
    r = pair.nabla(F.wedge(G)) - pair.nabla(F).wedge(G) - F.wedge(pair.nabla(G))
    return _window(r, window)


def _exp_ad(X: WeylForm, Y: WeylForm, shifted=False):
    """exp(ad X) Y, or (exp(ad X) - 1)/ad X applied to Y when ``shifted``."""
    out = Y
    term = Y
    j = 1
    while True:
        term = X.bracket(term).scale(Fraction(1, j + 1 if shifted else j))
        if term.is_zero():
            return out
        out = out + term
        j += 1


def gauge_move(pair: FedosovPair, X: WeylElement):
    """(A, c) -> (exp ad X (A), exp ad X (c)) for X in hbar W.  The transformed
    connection is written d + [A_{-1} + A', .] with its y-independent part
    removed; that part (negated) is returned as alpha, so theta' = theta + d alpha."""
    if any(k[0] < 1 for k in X.terms):
        raise ValueError("X must lie in hbar W")
    N, D = pair.N, pair.D
    Xf = WeylForm._raw(pair.model, 0, {(): X.truncate(N, D)}, N, D)
    full = a_minus_one(pair.model, N, D) + pair.A
    new = _exp_ad(Xf, full) - _exp_ad(Xf, Xf.d(), shifted=True)
    new = new - a_minus_one(pair.model, N, D)
    central = new.y_independent()
    c2 = _exp_ad(Xf, pair.c)
    return FedosovPair(pair.model, new - central, c2, pair.window), -central


def shift_move(pair: FedosovPair, B: WeylForm):
    """(A, c) -> (A + B, c + nabla B + 1/2[B, B]) for a 1-form B in hbar W.
    Returns (pair', alpha) with alpha the removed central part, negated."""
    if B.degree != 1:
        raise ValueError("B must be a 1-form")
    if any(k[0] < 1 for F in B.comps.values() for k in F.terms):
        raise ValueError("B must lie in hbar W")
    B = B.truncate(pair.N, pair.D)
    c2 = pair.c + pair.nabla(B) + B.bracket(B).scale(Fraction(1, 2))
    central = B.y_independent()
    return FedosovPair(pair.model, pair.A + B - central, c2, pair.window), -central


def exact_term(alpha: WeylForm, window=None) -> CentralSeries:
    """d alpha read as a central series."""
    return CentralSeries.from_rep(alpha.d(), window)


# -- Rozansky-Witten form and the omega pairing -----------------------------------------

def _obj(a):
    return np.array(a, dtype=object)


def rw_form(R, model: SymplecticModel):
    """RW_{ab i j}: X_{jl} = sum R_{abij} R_{cdkl} w^{ac} w^{bd} w^{ik}; returns the
    antisymmetric array (X - X^T)/2 of the (0,2)-form sum X_jl dz^j dz^l."""
    R = _obj(R)
    m = model.dim
    if R.shape != (m, m, m, m):
        raise ValueError(f"R must have shape {(m, m, m, m)}")
    if not (R == R.transpose(1, 0, 2, 3)).all():
        raise ValueError("R is not symmetric in its first two indices")
    P = _obj(model.poisson)
    # T_{cdkj} = sum_{abi} R_abij P^{ac} P^{bd} P^{ik}
    T = np.tensordot(R, P, axes=([0], [0]))        # b i j c
    T = np.tensordot(T, P, axes=([0], [0]))        # i j c d
    T = np.tensordot(T, P, axes=([0], [0]))        # j c d k
    X = np.tensordot(T, R, axes=([1, 2, 3], [0, 1, 2]))   # j l
    A = (X - X.T) * Fraction(1, 2)
    return [[simplify(as_exact(v)) for v in row] for row in A.tolist()]


def omega_pairing(alpha, beta, model: SymplecticModel):
    """omega(alpha, beta)_{jl} = sum alpha_ij beta_kl omega_ik, antisymmetrized."""
    a, b = _obj(alpha), _obj(beta)
    m = model.dim
    if a.shape != (m, m) or b.shape != (m, m):
        raise ValueError(f"arrays must have shape {(m, m)}")
    W = _obj(model.omega)
    X = a.T.dot(W).dot(b)
    A = (X - X.T) * Fraction(1, 2)
    return [[simplify(as_exact(v)) for v in row] for row in A.tolist()]
