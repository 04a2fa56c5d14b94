from fractions import Fraction
import random

import sympy as sp
from hypothesis import given, settings, strategies as st

from artifact import models
from artifact.dgla import (DglaPresentation, GradedElement, bch, bch_inverse, exp_ad, report_ok,
                           validate_dgla)
from artifact.hochschild import hochschild_dgla, truncated_polynomial_algebra
from artifact.sampling import random_element

h = sp.Symbol("h")


def trunc(M, N):
    """Drop powers of h above N, entrywise."""
    def cut(e):
        p = sp.Poly(sp.expand(e), h)
        return sum(c * h ** k for (k,), c in p.terms() if k <= N)
    return M.applyfunc(cut)


def nil_exp(M, N):
    out = sp.eye(M.shape[0])
    term = sp.eye(M.shape[0])
    for k in range(1, N + 2):
        term = trunc(term * M / k, N)
        out += term
    return trunc(out, N)


def to_matrix(x, gens, p=0):
    M = sp.zeros(*gens[0].shape)
    for a, coeffs in enumerate(x.comps.get(p, [])):
        for k, c in enumerate(coeffs):
            M += sp.Rational(c.numerator, c.denominator) * h ** k * gens[a] if c else sp.zeros(*M.shape)
    return M


def brute_jacobi_ok(L):
    """Independent Jacobi check: full structure tensor, all basis triples."""
    import itertools
    dims = L.dims
    br = {}
    for p, a, q, b, k, c in L.bracket_entries():
        br.setdefault((p, a, q, b), {})[k] = c

    def bracket(x, y):
        (p, u), (q, v) = x, y
        out = {}
        if (p + q) not in dims:
            return p + q, out
        for a, ca in u.items():
            for b, cb in v.items():
                for k, c in br.get((p, a, q, b), {}).items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return p + q, {k: c for k, c in out.items() if c}

    basis = [(p, {a: 1}) for p in dims for a in range(dims[p])]
    for x, y, z in itertools.product(basis, repeat=3):
        p, q, r = x[0], y[0], z[0]
        # only triples whose intermediate brackets stay in the materialized window
        if not {p + q, q + r, p + r, p + q + r} <= set(dims):
            continue
        lhs = bracket(x, bracket(y, z))
        r1 = bracket(bracket(x, y), z)
        r2 = bracket(y, bracket(x, z))
        s = (-1) ** (p * q)
        keys = set(lhs[1]) | set(r1[1]) | set(r2[1])
        if any(lhs[1].get(k, 0) - r1[1].get(k, 0) - s * r2[1].get(k, 0) for k in keys):
            return False
    return True


def test_fixtures_pass():
    L = models.abelian({0: 2, 1: 2, 2: 1}, {0: [(1, 0, 1)], 1: [(0, 0, 1)]})
    assert report_ok(validate_dgla(L)) and not report_ok(validate_dgla(
        models.abelian({0: 1, 1: 1, 2: 1}, {0: [(0, 0, 1)], 1: [(0, 0, 1)]})))
    for L in (models.sl2(), models.heisenberg_exterior(), models.heisenberg_dga(),
              hochschild_dgla(truncated_polynomial_algebra(3)).presentation):
        assert report_ok(validate_dgla(L)), L.name
        assert brute_jacobi_ok(L), L.name


def test_corrupted_jacobi_has_witness():
    # [h, e] = 3e keeps antisymmetry but breaks Jacobi on (e, f, h)
    L = DglaPresentation({0: 3}, {}, [(0, 2, 0, 0, 0, 3), (0, 2, 0, 1, 1, -2), (0, 0, 0, 1, 2, 1)],
                         antisymmetrize=True)
    rep = validate_dgla(L)
    assert rep["antisymmetry"]["pass"]
    assert not rep["jacobi"]["pass"] and rep["jacobi"]["witness"] is not None
    assert not brute_jacobi_ok(L)
    assert brute_jacobi_ok(models.sl2())


def test_corrupted_antisymmetry_and_d():
    L = DglaPresentation({0: 3}, {}, [(0, 0, 0, 1, 2, 1)])  # only one ordering
    assert not validate_dgla(L)["antisymmetry"]["pass"]


def test_bch_neutral_and_commuting():
    L = models.heisenberg()
    rng = random.Random(0)
    X = random_element(rng, L, 3, 0, [1, 2, 3])
    assert bch(X, GradedElement.zero(L, 3)) == X
    A = models.abelian({0: 2})
    U, V = (random_element(rng, A, 3, 0, [1, 2]) for _ in range(2))
    assert bch(U, V) == U + V


def test_bch_heisenberg_matrix_oracle():
    N = 3
    gens = [sp.Matrix([[0, 1, 0], [0, 0, 0], [0, 0, 0]]), sp.Matrix([[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
            sp.Matrix([[0, 0, 1], [0, 0, 0], [0, 0, 0]])]
    L = models.heisenberg()
    rng = random.Random(1)
    for _ in range(5):
        X, Y = (random_element(rng, L, N, 0, [1, 2, 3]) for _ in range(2))
        Z = bch(X, Y)
        assert Z == X + Y + X.bracket(Y).scale(Fraction(1, 2))
        lhs = nil_exp(to_matrix(Z, gens), N)
        rhs = trunc(nil_exp(to_matrix(X, gens), N) * nil_exp(to_matrix(Y, gens), N), N)
        assert sp.simplify(lhs - rhs) == sp.zeros(3, 3)


def test_exp_ad_matrix_oracle():
    N = 3
    gens = [sp.Matrix([[0, 1], [0, 0]]), sp.Matrix([[0, 0], [1, 0]]), sp.Matrix([[1, 0], [0, -1]])]
    L = models.sl2()
    rng = random.Random(2)
    for _ in range(4):
        X = random_element(rng, L, N, 0, [1, 2])
        v = random_element(rng, L, N, 0, [0, 1, 2])
        got = to_matrix(exp_ad(X, v), gens)
        eX = nil_exp(to_matrix(X, gens), N)
        emX = nil_exp(-to_matrix(X, gens), N)
        want = trunc(eX * to_matrix(v, gens) * emX, N)
        assert sp.expand(got - want) == sp.zeros(2, 2)
    assert exp_ad(GradedElement.zero(L, N), v) == v
    A = models.abelian({0: 2})
    w = random_element(rng, A, N, 0, [0, 1])
    assert exp_ad(random_element(rng, A, N, 0, [1]), w) == w


@st.composite
def heis_pair(draw):
    seed = draw(st.integers(0, 10 ** 6))
    rng = random.Random(seed)
    L = models.heisenberg_exterior()
    return [random_element(rng, L, 2, p, [0, 1, 2], 0.4) for p in (-1, 0, 1)], rng


@given(heis_pair())
@settings(max_examples=25, deadline=None)
def test_graded_identities_on_random_elements(data):
    (a, b, c), _ = data
    # degrees -1, 0, 1: [x, y] = -(-1)^{|x||y|} [y, x]
    assert a.bracket(b) == b.bracket(a).scale(-1)
    assert a.bracket(c) == c.bracket(a)
    assert (a.bracket(b)).d() == a.d().bracket(b) - a.bracket(b.d())
    assert a.bracket(b.bracket(c)) == a.bracket(b).bracket(c) + b.bracket(a.bracket(c))
    assert c.d().d().is_zero()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_bch_group_laws(seed):
    rng = random.Random(seed)
    L = models.heisenberg_exterior()
    X, Y, Z = (random_element(rng, L, 3, 0, [1, 2, 3], 0.5) for _ in range(3))
    assert bch(bch(X, Y), Z) == bch(X, bch(Y, Z))
    assert bch(X, bch_inverse(X)).is_zero()
    v = random_element(rng, L, 3, 1, [0, 1])
    assert exp_ad(X, exp_ad(Y, v)) == exp_ad(bch(X, Y), v)
