"""The Deligne two-groupoid of L (x) m.

Objects are Maurer-Cartan elements, 1-morphisms gauge transformations exp(X)
acting through exp ad X (d + lambda), 2-morphisms exp(t) with t in degree -1
comparing gauge transformations with a common source and target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from weakref import WeakKeyDictionary

from .dgla import (DglaPresentation, GradedElement, bch, bch_with, check_degree,
                   check_in_m, exp_ad)

__all__ = [
    "MaurerCartanElement", "GaugeTransformation", "TwoMorphism", "mc_defect",
    "gauge_apply", "twisted_bracket", "twisted_bch", "two_morphism_verify",
    "compose", "whisker_left", "whisker_right", "identity_gauge",
    "identity_two_morphism", "with_formal_d",
]


def mc_defect(lam: GradedElement) -> GradedElement:
    """d lambda + 1/2 [lambda, lambda]."""
    check_degree(lam, 1, "Maurer-Cartan carrier")
    check_in_m(lam, "Maurer-Cartan carrier")
    return lam.d() + lam.bracket(lam).scale(Fraction(1, 2))


# -- the cross product with k.d ---------------------------------------------

_EXTENDED = WeakKeyDictionary()


def with_formal_d(L: DglaPresentation):
    """L with one extra degree-1 basis vector D, [D, x] = dx and [D, D] = 0.

    Returns (extended presentation, index of D in degree 1).
    """
    hit = _EXTENDED.get(L)
    if hit is not None:
        return hit
    dims = dict(L.dims)
    dims[1] = dims.get(1, 0) + 1
    D = dims[1] - 1
    entries = list(L.bracket_entries())
    for p, row, col, c in L.differential_entries():
        # [D, e^p_col] = d e^p_col ; [e^p_col, D] = -(-1)^p d e^p_col
        entries.append((1, D, p, col, row, c))
        entries.append((p, col, 1, D, row, c if p % 2 else -c))
    diff = {}
    for p, row, col, c in L.differential_entries():
        diff.setdefault(p, []).append((row, col, c))
    ext = DglaPresentation(dims, diff, entries, name=L.name + "+kd")
    _EXTENDED[L] = (ext, D)
    return ext, D


def _lift(x: GradedElement, ext):
    comps = {}
    for p, vec in x.comps.items():
        v = [list(c) for c in vec]
        if p == 1:
            v = v + [[0] * (x.trunc + 1)]
        comps[p] = v
    return GradedElement(ext, x.trunc, comps)


def _drop(y: GradedElement, L, D):
    comps = {}
    extra = None
    for p, vec in y.comps.items():
        if p == 1:
            extra = vec[D]
            vec = vec[:D]
        comps[p] = vec
    return GradedElement(L, y.trunc, comps), extra


def gauge_apply(X: GradedElement, lam: GradedElement) -> GradedElement:
    """mu with d + mu = exp ad X (d + lambda)."""
    check_degree(X, 0, "gauge parameter")
    check_in_m(X, "gauge parameter")
    check_degree(lam, 1, "Maurer-Cartan carrier")
    L = X.owner
    ext, D = with_formal_d(L)
    N = X.trunc
    Xe = _lift(X, ext)
    dD = [[0] * (N + 1) for _ in range(ext.dims[1])]
    dD[D][0] = 1
    target = _lift(lam, ext) + GradedElement(ext, N, {1: dD})
    out = exp_ad(Xe, target)
    mu, coeff_d = _drop(out, L, D)
    if coeff_d != [1] + [0] * N:
        raise AssertionError("the formal d must be fixed by exp ad X")
    return mu


def gauge_apply_closed_form(X: GradedElement, lam: GradedElement) -> GradedElement:
    """Same as gauge_apply via exp_ad(X)(lambda) - sum ad(X)^{k-1}(dX)/k!."""
    out = exp_ad(X, lam)
    term = X.d()
    k = 1
    fact = 1
    while not term.is_zero() and k <= X.trunc + 1:
        fact *= k
        out = out - term.scale(Fraction(1, fact))
        term = X.bracket(term)
        k += 1
    return out


def twisted_bracket(mu: GradedElement):
    """[a, b]_mu = [a, d b + [mu, b]] on L^{-1}."""
    def br(a, b):
        return a.bracket(b.d() + mu.bracket(b))
    return br


def twisted_differential(mu, t):
    """d t + [mu, t]."""
    return t.d() + mu.bracket(t)


def twisted_bch(mu, a, b):
    return bch_with(twisted_bracket(mu), a, b, a.trunc)


# -- carriers --------------------------------------------------------------

@dataclass
class MaurerCartanElement:
    lam: GradedElement
    _certified: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        check_degree(self.lam, 1, "Maurer-Cartan carrier")
        check_in_m(self.lam, "Maurer-Cartan carrier")

    def certify(self):
        if self._certified is None:
            self._certified = mc_defect(self.lam).is_zero()
        return self._certified

    def same(self, other):
        return (self.lam - other.lam).is_zero()


@dataclass
class GaugeTransformation:
    X: GradedElement
    source: MaurerCartanElement
    target: MaurerCartanElement
    _certified: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        check_degree(self.X, 0, "gauge parameter")
        check_in_m(self.X, "gauge parameter")

    @classmethod
    def from_source(cls, X, source: MaurerCartanElement):
        return cls(X, source, MaurerCartanElement(gauge_apply(X, source.lam)), True)

    def certify(self):
        if self._certified is None:
            self._certified = (gauge_apply(self.X, self.source.lam) - self.target.lam).is_zero()
        return self._certified


@dataclass
class TwoMorphism:
    t: GradedElement
    source: GaugeTransformation
    target: GaugeTransformation
    _certified: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        check_degree(self.t, -1, "two-morphism parameter")
        check_in_m(self.t, "two-morphism parameter")

    @property
    def base(self):
        return self.target.target

    def certify(self):
        if self._certified is None:
            self._certified = two_morphism_verify(self.t, self.target, self.source)
        return self._certified


def identity_gauge(lam: MaurerCartanElement):
    zero = GradedElement.zero(lam.lam.owner, lam.lam.trunc)
    return GaugeTransformation(zero, lam, lam, True)


def identity_two_morphism(G: GaugeTransformation):
    zero = GradedElement.zero(G.X.owner, G.X.trunc)
    return TwoMorphism(zero, G, G, True)


def _endpoints_match(G, H):
    return G.source.same(H.source) and G.target.same(H.target)


def two_morphism_verify(t: GradedElement, G: GaugeTransformation,
                        H: GaugeTransformation) -> bool:
    """exp(X_G) == exp(dt + [mu, t]) exp(X_H), mu the common target."""
    if not _endpoints_match(G, H):
        raise ValueError("G and H must share source and target")
    check_degree(t, -1, "two-morphism parameter")
    mu = G.target.lam
    gamma = twisted_differential(mu, t)
    return (bch(gamma, H.X) - G.X).is_zero()


def whisker_left(F: GaugeTransformation, c: TwoMorphism) -> TwoMorphism:
    """F c : F H => F G, parameter Ad_F t."""
    if not c.base.same(F.source):
        raise ValueError("whiskering needs F to start at the base of c")
    t = exp_ad(F.X, c.t)
    return TwoMorphism(t, compose(F, c.source), compose(F, c.target))


def whisker_right(c: TwoMorphism, F: GaugeTransformation) -> TwoMorphism:
    """c F : H F => G F, parameter unchanged."""
    if not F.target.same(c.source.source):
        raise ValueError("whiskering needs F to end at the source of c")
    return TwoMorphism(c.t, compose(c.source, F), compose(c.target, F))


def compose(a, b, mode="gauge"):
    """Compose in the Deligne two-groupoid.

    gauge: a after b (a: mu -> nu, b: lambda -> mu), product exp(X_a) exp(X_b).
    two_vertical: a after b (b: H => G, a: G => K), twisted BCH at the base.
    two_horizontal: a * b with b: H => G between lambda -> mu and
        a: H' => G' between mu -> nu, giving H'H => G'G.
    """
    if mode == "gauge":
        if not isinstance(a, GaugeTransformation) or not isinstance(b, GaugeTransformation):
            raise TypeError("gauge composition takes gauge transformations")
        if not a.source.same(b.target):
            raise ValueError("gauge transformations are not composable")
        cert = True if (a._certified and b._certified) else None
        return GaugeTransformation(bch(a.X, b.X), b.source, a.target, cert)
    if mode == "two_vertical":
        if not (_gauge_equal(b.target, a.source)):
            raise ValueError("two-morphisms are not vertically composable")
        mu = a.base.lam
        t = twisted_bch(mu, a.t, b.t)
        return TwoMorphism(t, b.source, a.target)
    if mode == "two_horizontal":
        if not b.base.same(a.source.source):
            raise ValueError("two-morphisms are not horizontally composable")
        left = whisker_right(a, b.target)      # H'G => G'G
        right = whisker_left(a.source, b)      # H'H => H'G
        return compose(left, right, "two_vertical")
    raise ValueError(f"unknown composition mode {mode!r}")


def _gauge_equal(G, H):
    return (G.X - H.X).is_zero() and _endpoints_match(G, H)
