import random
from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from artifact.hochschild import HochschildCochain, truncated_polynomial_algebra
from artifact.sampling import random_drs_collection
from artifact.simplicial import DrsCollection, MultiCochain, Nerve, drs_differential, drs_validate
from artifact.sullivan import (SullivanForm, cohomology_dims, face_vertices, monomials,
                               pullback_degeneracy, restrict, sullivan_d, wedge, whitney_form)


def random_form(rng, p, max_poly=3, density=0.25):
    terms = {}
    for j in range(p + 1):
        for mono in monomials(p, max_poly, j):
            if rng.random() < density:
                terms[mono] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return SullivanForm(p, terms)


def as_sympy_zero_form(w):
    """A 0-form as a sympy polynomial in t_1..t_p."""
    ts = sp.symbols(f"t1:{w.p + 1}")
    expr = 0
    for (e, I), c in w.terms.items():
        assert not I
        mono = 1
        for t, k in zip(ts, e):
            mono *= t ** k
        expr += sp.Rational(c.numerator, c.denominator) * mono
    return sp.expand(expr), ts


def test_d_on_coordinates():
    assert sullivan_d(SullivanForm.t(2, 1)) == SullivanForm.dt(2, 1)
    assert sullivan_d(SullivanForm.dt(2, 1)).is_zero()
    assert sullivan_d(SullivanForm.t(2, 0)) == SullivanForm.dt(2, 0)


def test_restriction_kills_t2_on_face_01():
    w = wedge(wedge(SullivanForm.t(2, 1), SullivanForm.t(2, 2)), SullivanForm.dt(2, 1))
    assert restrict(w, [0, 1]).is_zero()
    # t1 dt1 restricted to the face {0, 1} keeps t1 dt1
    v = wedge(SullivanForm.t(2, 1), SullivanForm.dt(2, 1))
    assert restrict(v, [0, 1]) == wedge(SullivanForm.t(1, 1), SullivanForm.dt(1, 1))


def test_restriction_by_substitution():
    """Restricting a 0-form to the face without vertex 0 substitutes
    t_1 = 1 - (sum of the remaining coordinates)."""
    rng = random.Random(0)
    for _ in range(5):
        w = SullivanForm(2, {m: rng.randint(-3, 3) for m in monomials(2, 3, 0) if rng.random() < 0.6})
        expr, (t1, t2) = as_sympy_zero_form(w)
        got, (s1,) = as_sympy_zero_form(restrict(w, [1, 2]))
        # face {1, 2}: vertex 1 -> new vertex 0, vertex 2 -> new vertex 1
        want = sp.expand(expr.subs({t1: 1 - sp.Symbol("t1"), t2: sp.Symbol("t1")}))
        assert sp.expand(got - want) == 0


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_d_squared_and_face_compatibility(seed):
    rng = random.Random(seed)
    p = rng.randint(1, 3)
    w = random_form(rng, p)
    assert sullivan_d(sullivan_d(w)).is_zero()
    i = rng.randint(0, p)
    f = face_vertices(p - 1, i)
    assert restrict(sullivan_d(w), f) == sullivan_d(restrict(w, f))
    j = rng.randint(0, p)
    assert pullback_degeneracy(sullivan_d(w), j) == sullivan_d(pullback_degeneracy(w, j))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_leibniz(seed):
    rng = random.Random(seed)
    p = rng.randint(1, 3)
    a, b = random_form(rng, p, 2), random_form(rng, p, 2)
    for (e, I), _ in list(a.terms.items())[:1]:
        a = SullivanForm(p, {(e, I): a.terms[(e, I)]})
        sign = (-1) ** len(I)
        assert sullivan_d(wedge(a, b)) == wedge(sullivan_d(a), b) + wedge(a, sullivan_d(b)).scale(sign)


def test_polynomial_poincare_lemma():
    for p in (1, 2, 3):
        assert cohomology_dims(p, 3) == [1] + [0] * p


def test_whitney_forms():
    # W_{01} on the 1-simplex is t0 dt1 - t1 dt0 = dt1
    assert whitney_form(1, [0, 1]) == SullivanForm.dt(1, 1)
    # vertex forms sum to 1
    total = sum((whitney_form(2, [v]) for v in range(3)), SullivanForm(2, {}))
    assert total == SullivanForm.const(2, 1)


# -- De Rham-Sullivan collections ------------------------------------------------------

A = truncated_polynomial_algebra(3)
M = A.multiplication_cochain()
NERVE = Nerve.full(4)


def const_collection(coeff):
    return DrsCollection(NERVE, {s: SullivanForm.const(len(s) - 1, coeff) for s in NERVE.simplices})


def test_constant_collection_passes():
    c = MultiCochain([HochschildCochain(A, 1, {(1,): {2: 1}})])
    assert drs_validate(const_collection(c))["pass"]


def test_incompatible_faces_report_pair():
    c = MultiCochain([HochschildCochain(A, 1, {(1,): {2: 1}})])
    coll = const_collection(c)
    forms = dict(coll.forms)
    forms[(0, 1)] = SullivanForm.t(1, 1, c)
    rep = drs_validate(DrsCollection(NERVE, forms))
    assert not rep["pass"] and rep["witness"] in ([[0], [0, 1]], [[1], [0, 1]], [[0, 1], [0, 1, 2]],
                                                   [[0, 1], [0, 1, 3]], [[0, 1], [0, 1, 2, 3]])


def test_drs_differential_squares_to_zero():
    rng = random.Random(0)
    for _ in range(5):
        coll, R = random_drs_collection(rng, NERVE, A)
        assert drs_validate(coll)["pass"] and drs_validate(R)["pass"]
        D1 = drs_differential(coll, M, R)
        assert drs_validate(D1)["pass"]
        assert drs_differential(D1, M, R).is_zero()


def test_drs_needs_closed_R():
    """Negative control: with a non-closed R the square no longer vanishes."""
    rng = random.Random(1)
    hits = 0
    for _ in range(5):
        coll, _ = random_drs_collection(rng, NERVE, A)
        big = SullivanForm(3, {m: MultiCochain([HochschildCochain(A, 0, {(): {rng.randrange(3): 1}})])
                               for m in monomials(3, 1, 2)})
        Rbad = DrsCollection(NERVE, {s: restrict(big, list(s)) for s in NERVE.simplices})
        hits += not drs_differential(drs_differential(coll, M, Rbad), M, Rbad).is_zero()
    assert hits > 0
