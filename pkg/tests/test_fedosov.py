import itertools
import random
from fractions import Fraction
from math import factorial

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from artifact.fedosov import (CentralSeries, SymplecticModel, WeylElement, WeylForm, a_minus_one,
                              characteristic_class, decomposition_residual, exact_term,
                              fedosov_solve, flatness_residual, gauge_move, leibniz_residual,
                              moyal, nabla_c_residual, omega_pairing, rw_form, shift_move,
                              weyl_basis, weyl_bracket)
from artifact.scalars import GaussianRational, I

M1 = SymplecticModel.standard(1)
M2 = SymplecticModel.standard(2)
h = sp.Symbol("h")


def sym_scalar(c):
    if isinstance(c, GaussianRational):
        return sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
    c = Fraction(c)
    return sp.Rational(c.numerator, c.denominator)


def to_sympy(f, ys, xs):
    out = 0
    for (k, y, x), c in f.terms.items():
        mono = h ** k
        for v, e in zip(ys, y):
            mono *= v ** e
        for v, e in zip(xs, x):
            mono *= v ** e
        out += sym_scalar(c) * mono
    return sp.expand(out)


def truncate_sympy(expr, ys, N, D):
    poly = sp.Poly(expr, h, *ys)
    out = 0
    for exps, c in poly.terms():
        k, y = exps[0], exps[1:]
        if k <= N and sum(y) + 2 * k <= D:
            mono = h ** k
            for v, e in zip(ys, y):
                mono *= v ** e
            out += c * mono
    return sp.expand(out)


def oracle_star(f, g, model, ys, N, D):
    """Term-by-term Moyal product: sum over index tuples (a_1..a_k, b_1..b_k)
    of prod w^{a_i b_i} d_a f d_b g, weighted by (i h / 2)^k / k!."""
    P = model.poisson
    m = model.dim
    out = 0
    for k in range(N + 1):
        acc = 0
        for idx in itertools.product(range(m), repeat=2 * k):
            a, b = idx[:k], idx[k:]
            w = 1
            for ai, bi in zip(a, b):
                w *= sym_scalar(P[ai][bi])
            if not w:
                continue
            df, dg = f, g
            for ai in a:
                df = sp.diff(df, ys[ai])
            for bi in b:
                dg = sp.diff(dg, ys[bi])
            acc += w * df * dg
        out += (sp.I * h / 2) ** k / factorial(k) * acc
    return truncate_sympy(sp.expand(out), ys, N, D)


def test_commutator_normalization():
    for model in (M1, M2, SymplecticModel([[0, 2], [-2, 0]])):
        N, D = 3, 6
        for a in range(model.dim):
            for b in range(model.dim):
                ya, yb = WeylElement.y(model, a, N, D), WeylElement.y(model, b, N, D)
                want = WeylElement.hbar(model, 1, N, D).scale(I * model.poisson[a][b])
                assert ya * yb - yb * ya == want


def test_unit_and_central_x():
    N, D = 3, 6
    one = WeylElement.const(M1, 1, N, D)
    rng = random.Random(0)
    basis = weyl_basis(M1, N, D)
    for _ in range(10):
        f = rng.choice(basis)
        assert one * f == f == f * one
    x = WeylElement.x(M1, 0, N, D)
    y = WeylElement.y(M1, 1, N, D)
    assert x * y == y * x


def test_hand_product_y1sq_y2sq():
    """(y1)^2 * (y2)^2 = y1^2 y2^2 + 2 i h y1 y2 - h^2/2 on the standard plane."""
    N, D = 3, 8
    f = WeylElement.monomial(M1, y=(2, 0), N=N, D=D)
    g = WeylElement.monomial(M1, y=(0, 2), N=N, D=D)
    want = WeylElement(M1, {(0, (2, 2)): 1, (1, (1, 1)): 2 * I, (2, (0, 0)): Fraction(-1, 2)}, N, D)
    assert f * g == want


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_moyal_matches_index_oracle(seed):
    rng = random.Random(seed)
    model = rng.choice([M1, M2])
    N, D = 2, 5
    ys = sp.symbols(f"y1:{model.dim + 1}")
    xs = sp.symbols(f"x1:{model.dim + 1}")
    basis = weyl_basis(model, N, D)
    f = sum((rng.choice(basis).scale(rng.randint(-2, 2)) for _ in range(3)), WeylElement.zero(model, N, D))
    g = sum((rng.choice(basis).scale(rng.randint(-2, 2)) for _ in range(3)), WeylElement.zero(model, N, D))
    got = to_sympy(moyal(f, g), ys, xs)
    want = oracle_star(to_sympy(f, ys, xs), to_sympy(g, ys, xs), model, ys, N, D)
    assert sp.expand(got - want) == 0


def test_associativity_on_sample():
    rng = random.Random(1)
    basis = weyl_basis(M1, 3, 6)
    for _ in range(200):
        f, g, k = (rng.choice(basis) for _ in range(3))
        assert (f * g) * k == f * (g * k)


def test_bracket_of_generators_is_omega():
    # in the 1/hbar representation [y1, y2] = i w^{12}
    y1, y2 = WeylElement.y(M1, 0), WeylElement.y(M1, 1)
    assert weyl_bracket(y1, y2) == WeylElement.const(M1, I)


def test_degenerate_omega_rejected():
    with pytest.raises(ValueError):
        SymplecticModel([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        SymplecticModel([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        SymplecticModel([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])


def test_pole_bound():
    with pytest.raises(ValueError):
        WeylElement(M1, {(-2, (0, 0)): 1})
    assert WeylElement(M1, {(-1, (1, 0)): 1}).pole


def test_decomposition_identity():
    N, D = 3, 6
    for deg in range(3):
        for Ix in itertools.combinations(range(2), deg):
            for w in weyl_basis(M1, N, 4):
                a = WeylForm(M1, deg, {Ix: w.truncate(N, D)}, N, D)
                assert decomposition_residual(a).is_zero()
    assert decomposition_residual(a_minus_one(M1, N, D)).is_zero()


# -- Fedosov pairs -------------------------------------------------------------------------

THETA = {-1: M1.omega, 0: [[0, 2], [-2, 0]], 1: [[0, Fraction(1, 3)], [Fraction(-1, 3), 0]]}


@pytest.fixture(scope="module")
def flat_pair():
    return fedosov_solve(M1, truncation=(3, 6))


def test_flat_solution(flat_pair):
    p = flat_pair
    assert p.A.is_zero()
    assert flatness_residual(p) == []
    assert nabla_c_residual(p).is_zero()
    th = characteristic_class(p)
    assert th.matrix(-1) == M1.omega and th.orders() == [-1]
    assert th.is_closed()


@pytest.mark.parametrize("absorb", ["c", "A"])
def test_theta_round_trip(absorb):
    p = fedosov_solve(M1, THETA, truncation=(3, 6), absorb=absorb)
    assert characteristic_class(p) == CentralSeries.from_matrices(M1, THETA)
    assert flatness_residual(p) == []
    assert nabla_c_residual(p).is_zero()
    rng = random.Random(2)
    basis = weyl_basis(M1, 3, 6)
    for _ in range(10):
        assert leibniz_residual(p, rng.choice(basis), rng.choice(basis)).is_zero()
    if absorb == "A":
        assert p.c.truncate(D=6).is_zero()


def test_theta_shift_moves_c_not_A(flat_pair):
    p = fedosov_solve(M1, THETA, truncation=(3, 6), absorb="c")
    assert p.A == flat_pair.A
    assert p.c != flat_pair.c


def test_bad_theta_rejected():
    with pytest.raises(ValueError):
        fedosov_solve(M1, {-1: [[0, 2], [-2, 0]]})
    with pytest.raises(ValueError):
        fedosov_solve(M1, {-1: M1.omega, 0: [[0, 1], [1, 0]]})
    with pytest.raises(ValueError):
        fedosov_solve(M1, absorb="B")


def test_perturbed_connection_fails_flatness(flat_pair):
    p = fedosov_solve(M1, THETA, truncation=(3, 6), absorb="A")
    bump = WeylForm(M1, 1, {(0,): WeylElement(M1, {(1, (2, 1)): 1}, p.N, p.D)}, p.N, p.D)
    bad = type(p)(p.model, p.A + bump, p.c, p.window, p.iterations)
    assert flatness_residual(bad) != []


def test_equivalence_moves(flat_pair):
    for absorb in "cA":
        p = fedosov_solve(M1, THETA, truncation=(3, 6), absorb=absorb)
        th = characteristic_class(p)
        X = WeylElement(M1, {(1, (1, 0), (1, 0)): 1, (1, (0, 2), (0, 1)): Fraction(1, 2),
                             (2, (1, 1), (0, 0)): 3}, p.N, p.D)
        p2, alpha = gauge_move(p, X)
        assert flatness_residual(p2) == [] and nabla_c_residual(p2).is_zero()
        th2 = characteristic_class(p2)
        assert th2 == th + exact_term(alpha, p.window)
        B = WeylForm(M1, 1, {(0,): WeylElement(M1, {(1, (0, 0), (0, 1)): 1, (1, (1, 0), (0, 0)): 2}, p.N, p.D),
                             (1,): WeylElement(M1, {(2, (0, 0), (1, 1)): 1, (1, (0, 1), (1, 0)): 1}, p.N, p.D)},
                     p.N, p.D)
        p3, alpha = shift_move(p2, B)
        ex = exact_term(alpha, p.window)
        assert ex.terms                                # a genuinely nonzero exact term
        assert characteristic_class(p3) == th2 + ex
        assert flatness_residual(p3) == []
    with pytest.raises(ValueError):
        gauge_move(flat_pair, WeylElement.y(M1, 0))


# -- Rozansky-Witten form and omega pairing --------------------------------------------------

def random_R(rng, m):
    R = [[[[0] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(a, m):
            for i in range(m):
                for j in range(m):
                    v = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                    R[a][b][i][j] = R[b][a][i][j] = v
    return R


def rw_oracle(R, model):
    m = model.dim
    W = model.poisson
    X = [[0] * m for _ in range(m)]
    for j, l in itertools.product(range(m), repeat=2):
        s = 0
        for a, b, i, c, d, k in itertools.product(range(m), repeat=6):
            s += R[a][b][i][j] * R[c][d][k][l] * W[a][c] * W[b][d] * W[i][k]
        X[j][l] = s
    return [[Fraction(X[j][l] - X[l][j], 2) for l in range(m)] for j in range(m)]


def test_rw_matches_oracle():
    rng = random.Random(3)
    for model in (M1, M2):
        for _ in range(3):
            R = random_R(rng, model.dim)
            assert rw_form(R, model) == rw_oracle(R, model)


def test_rw_zero_and_single_entry():
    m = 2
    Z = [[[[0] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    assert rw_form(Z, M1) == [[0, 0], [0, 0]]
    # R_{0000} = 1 and R_{1101} = 1: the only contraction pairs a=0 with c=1 etc.
    R = [[[[0] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    R[0][0][0][0] = 1
    R[1][1][1][1] = 1
    # X_{01} = R_{0000} R_{1111} (w^{01})^3 = 1, X_{10} = (w^{10})^3 = -1
    assert rw_form(R, M1) == [[0, 1], [-1, 0]]


def test_rw_rejects_bad_tensors():
    with pytest.raises(ValueError):
        rw_form([[[[1]]]], M1)
    R = [[[[0] * 2 for _ in range(2)] for _ in range(2)] for _ in range(2)]
    R[0][1][0][0] = 1
    with pytest.raises(ValueError):
        rw_form(R, M1)


def omega_oracle(a, b, model):
    m = model.dim
    X = [[sum(a[i][j] * b[k][l] * model.omega[i][k] for i in range(m) for k in range(m))
          for l in range(m)] for j in range(m)]
    return [[Fraction(X[j][l] - X[l][j], 2) for l in range(m)] for j in range(m)]


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_omega_pairing_oracle_and_bilinearity(seed):
    rng = random.Random(seed)
    model = rng.choice([M1, M2])
    m = model.dim

    def rand():
        return [[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(m)] for _ in range(m)]

    a, a2, b = rand(), rand(), rand()
    assert omega_pairing(a, b, model) == omega_oracle(a, b, model)
    s = Fraction(rng.randint(-3, 3))
    combo = [[x + s * y for x, y in zip(r1, r2)] for r1, r2 in zip(a, a2)]
    lhs = omega_pairing(combo, b, model)
    p1, p2 = omega_pairing(a, b, model), omega_pairing(a2, b, model)
    assert lhs == [[x + s * y for x, y in zip(r1, r2)] for r1, r2 in zip(p1, p2)]
    P = omega_pairing(a, b, model)
    assert all(P[j][l] == -P[l][j] for j in range(m) for l in range(m))
