"""Exact coefficient arithmetic.

Scalars are Python ints, ``fractions.Fraction`` or :class:`GaussianRational`
(rationals with a formal square root of -1 adjoined).  Truncated power series
in hbar are :class:`ArtinianSeries`; the low-level helpers ``raw_*`` work on
plain coefficient lists and are what the DGLA layer uses in its inner loops.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

DEFAULT_MAX_POLE = 1


class GaussianRational:
    """a + b*i with a, b rational.  Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussianRational(0, 1)


def simplify(x):
    """Collapse a Gaussian rational with zero imaginary part to a Fraction/int."""
    if isinstance(x, GaussianRational):
        if x.im == 0:
            r = x.re
            return int(r) if r.denominator == 1 else r
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def as_exact(x):
    """Coerce an int/Fraction/GaussianRational/str into an exact scalar."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Fraction, GaussianRational)):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    raise TypeError(f"not an exact scalar: {x!r}")


def is_zero(x):
    return not x


# ---------------------------------------------------------------------------
# coefficient-list helpers (no pole, orders 0..N)

def raw_zero(N):
    return [0] * (N + 1)


def raw_add(a, b):
    return [x + y for x, y in zip(a, b)]


def raw_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def raw_scale(c, a):
    return [c * x for x in a]


def raw_mul(a, b):
    """Truncated convolution of two coefficient lists of equal length."""
    n = len(a)
    out = [0] * n
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(n - i):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def raw_is_zero(a):
    return not any(a)


# ---------------------------------------------------------------------------

class ArtinianSeries:
    """Truncated series sum_{k=-pole}^{N} a_k hbar^k.

    ``coeffs[j]`` is the coefficient of hbar^(j - pole).  Arithmetic drops
    everything above hbar^N.
    """

    __slots__ = ("pole", "trunc", "coeffs")

    def __init__(self, coeffs, trunc, pole=0, max_pole=DEFAULT_MAX_POLE):
        if trunc < 0:
            raise ValueError("truncation order must be non-negative")
        if pole < 0:
            raise ValueError("pole order must be non-negative")
        if pole > max_pole:
            raise ValueError(f"pole order {pole} exceeds the cap {max_pole}")
        cs = [as_exact(c) for c in coeffs]
        length = trunc + pole + 1
        cs = cs[:length]
        cs = cs + [0] * (length - len(cs))
        object.__setattr__(self, "pole", pole)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("ArtinianSeries is immutable")

    # constructors
    @classmethod
    def const(cls, c, trunc):
        return cls([c], trunc)

    @classmethod
    def hbar(cls, k, trunc, coeff=1):
        """coeff * hbar^k (k may be -1 for the pole)."""
        if k > trunc:
            return cls([], trunc)
        pole = max(0, -k)
        cs = [0] * (trunc + pole + 1)
        cs[k + pole] = coeff
        return cls(cs, trunc, pole=pole, max_pole=max(pole, DEFAULT_MAX_POLE))

    @classmethod
    def zero(cls, trunc):
        return cls([], trunc)

    def coeff(self, k):
        j = k + self.pole
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0

    def items(self):
        for j, c in enumerate(self.coeffs):
            if c:
                yield j - self.pole, c

    def _check(self, other):
        if not isinstance(other, ArtinianSeries):
            return ArtinianSeries.const(as_exact(other), self.trunc)
        if other.trunc != self.trunc:
            raise ValueError(f"mismatched truncation orders {self.trunc} and {other.trunc}")
        return other

    def _rebuild(self, table, max_pole=None):
        lo = min([k for k, c in table.items() if c], default=0)
        pole = max(0, -lo)
        cs = [table.get(k - pole, 0) for k in range(self.trunc + pole + 1)]
        return ArtinianSeries(cs, self.trunc, pole=pole,
                              max_pole=max(pole, DEFAULT_MAX_POLE) if max_pole is None else max_pole)

    def __add__(self, other):
        o = self._check(other)
        t = {}
        for k, c in self.items():
            t[k] = t.get(k, 0) + c
        for k, c in o.items():
            t[k] = t.get(k, 0) + c
        return self._rebuild(t)

    __radd__ = __add__

    def __neg__(self):
        return ArtinianSeries([-c for c in self.coeffs], self.trunc, self.pole,
                              max_pole=max(self.pole, DEFAULT_MAX_POLE))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        return series_mul(self, self._check(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, ArtinianSeries):
            if other.trunc != self.trunc:
                return False
        else:
            try:
                other = ArtinianSeries.const(as_exact(other), self.trunc)
            except TypeError:
                return NotImplemented
        lo = -max(self.pole, other.pole)
        return all(self.coeff(k) == other.coeff(k) for k in range(lo, self.trunc + 1))

    def __hash__(self):
        return hash((self.trunc, tuple(self.items())))

    def __bool__(self):
        return any(self.coeffs)

    def in_maximal_ideal(self):
        return all(not c for k, c in self.items() if k <= 0)

    def leading(self):
        for k, c in self.items():
            return k, c
        return None

    def __repr__(self):
        terms = [f"{c}*h^{k}" for k, c in self.items()]
        return f"ArtinianSeries({' + '.join(terms) or '0'}; N={self.trunc})"


def series_mul(a: ArtinianSeries, b: ArtinianSeries) -> ArtinianSeries:
    if a.trunc != b.trunc:
        raise ValueError(f"mismatched truncation orders {a.trunc} and {b.trunc}")
    N = a.trunc
    t = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= N:
                t[i + j] = t.get(i + j, 0) + x * y
    pole = a.pole + b.pole
    return a._rebuild(t, max_pole=max(pole, DEFAULT_MAX_POLE))


def series_invert(a: ArtinianSeries, max_pole=DEFAULT_MAX_POLE) -> ArtinianSeries:
    """Inverse in k[hbar]/(hbar^{N+1}) or its Laurent extension.

    An element of positive valuation v is inverted into a pole of order v
    (allowed up to ``max_pole``); only its known coefficients are used.
    """
    lead = a.leading()
    if lead is None:
        raise ZeroDivisionError("not invertible: zero series")
    k0, c0 = lead
    if k0 > max_pole:
        raise ZeroDivisionError("not invertible: inverse would exceed the pole cap")
    N = a.trunc
    # a = hbar^k0 * u with u a unit; a^{-1} = hbar^(-k0) * u^{-1}
    u = [a.coeff(k0 + j) for j in range(max(N - k0, 0) + 1)]
    inv = [0] * (N + k0 + 1)
    inv0 = GaussianRational(1) / c0 if isinstance(c0, GaussianRational) else Fraction(1) / c0
    inv[0] = inv0
    for n in range(1, len(inv)):
        s = 0
        for j in range(1, min(n, len(u) - 1) + 1):
            if u[j]:
                s += u[j] * inv[n - j]
        inv[n] = -inv0 * s
    t = {}
    for j, c in enumerate(inv):
        if c:
            t[j - k0] = simplify(c)
    return a._rebuild(t, max_pole=max(max_pole, -min(t, default=0)))


def nilpotent_exp_log(x: ArtinianSeries, direction: str) -> ArtinianSeries:
    N = x.trunc
    one = ArtinianSeries.const(1, N)
    if direction == "exp":
        if not x.in_maximal_ideal():
            raise ValueError("exp is only defined on the maximal ideal")
        out, term = one, one
        for k in range(1, N + 1):
            term = term * x * ArtinianSeries.const(Fraction(1, k), N)
            out = out + term
        return out
    if direction == "log":
        u = x - one
        if not u.in_maximal_ideal():
            raise ValueError("log is only defined on 1 + maximal ideal")
        out = ArtinianSeries.zero(N)
        term = one
        for k in range(1, N + 1):
            term = term * u
            out = out + term * ArtinianSeries.const(Fraction((-1) ** (k + 1), k), N)
        return out
    raise ValueError("direction must be 'exp' or 'log'")
