"""Random exact test data for the property suites, the CLI sweeps and the
examples.  Everything is driven by a ``random.Random`` instance."""

from __future__ import annotations

import random
from fractions import Fraction

from .dgla import GradedElement
from .simplicial import (Cochain, CosimplicialDgla, DescentDatum, transport,
                         two_transport)


def rand_scalar(rng: random.Random, lo=-3, hi=3, denom=2):
    return Fraction(rng.randint(lo, hi), rng.randint(1, denom))


def random_element(rng, L, trunc, degree, orders, density=0.6):
    comps = {}
    dim = L.dims.get(degree, 0)
    vec = [[0] * (trunc + 1) for _ in range(dim)]
    for a in range(dim):
        for k in orders:
            if 0 <= k <= trunc and rng.random() < density:
                vec[a][k] = rand_scalar(rng)
    comps[degree] = vec
    return GradedElement(L, trunc, comps)


def random_cochain(rng, C: CosimplicialDgla, level, degree, trunc, orders, density=0.6,
                   normalized=False):
    """Random cochain; ``normalized`` zeroes blocks hit by a codegeneracy
    (chains with a repeated simplex), so that every s_j kills it."""
    parts = {}
    degenerate = set()
    if normalized and level >= 1:
        for j in range(level):
            for k, (K, _) in C.codegeneracy(level - 1, j).items():
                degenerate.add(K)
    for k in C.keys(level):
        L = C.block(level, k)
        if k in degenerate:
            parts[k] = GradedElement.zero(L, trunc)
        else:
            parts[k] = random_element(rng, L, trunc, degree, orders, density)
    return Cochain(C, level, parts)


def trivial_datum(C, trunc):
    return DescentDatum(C, C.zero(0, trunc), C.zero(1, trunc), C.zero(2, trunc))


def random_exact_datum(rng, C, trunc, orders=None):
    """The trivial datum transported along a random isomorphism (h, s)."""
    orders = orders or range(1, trunc + 1)
    h = random_cochain(rng, C, 0, 0, trunc, orders)
    s = random_cochain(rng, C, 1, -1, trunc, orders)
    return transport(trivial_datum(C, trunc), h, s)


def perturb_datum(rng, D: DescentDatum, order, which=("lam", "x", "t")):
    C, N = D.C, D.trunc
    lam, x, t = D.lam, D.x, D.t
    if "lam" in which:
        lam = lam + random_cochain(rng, C, 0, 1, N, [order])
    if "x" in which:
        x = x + random_cochain(rng, C, 1, 0, N, [order])
    if "t" in which:
        t = t + random_cochain(rng, C, 2, -1, N, [order])
    return DescentDatum(C, lam, x, t)


def near_descent(rng, C, n, trunc=None):
    """A datum that is exact modulo hbar^{n+1} and generic at order n+1."""
    N = trunc if trunc is not None else n + 1
    if n == 0:
        D = DescentDatum(C, C.zero(0, N), C.zero(1, N), C.zero(2, N))
    else:
        D = random_exact_datum(rng, C, N, range(1, n + 1))
    return perturb_datum(rng, D, n + 1)


def near_iso(rng, C, n, trunc=None):
    """(D, D', h, s) with (h, s) an isomorphism modulo hbar^{n+1} only."""
    N = trunc if trunc is not None else n + 1
    D = random_exact_datum(rng, C, N)
    low = range(1, n + 1) if n else []
    h = random_cochain(rng, C, 0, 0, N, low)
    s = random_cochain(rng, C, 1, -1, N, low)
    Dp = transport(D, h, s)
    h = h + random_cochain(rng, C, 0, 0, N, [n + 1])
    s = s + random_cochain(rng, C, 1, -1, N, [n + 1])
    return D, Dp, h, s


def near_two_iso(rng, C, n, trunc=None):
    """(D, D', h, s, h2, s2, r) with r a two-isomorphism modulo hbar^{n+1} only."""
    N = trunc if trunc is not None else n + 1
    D = random_exact_datum(rng, C, N)
    h = random_cochain(rng, C, 0, 0, N, range(1, N + 1))
    s = random_cochain(rng, C, 1, -1, N, range(1, N + 1))
    Dp = transport(D, h, s)
    low = range(1, n + 1) if n else []
    r = random_cochain(rng, C, 0, -1, N, low)
    h2, s2 = two_transport(D, Dp, h, s, r)
    r = r + random_cochain(rng, C, 0, -1, N, [n + 1])
    return D, Dp, h, s, h2, s2, r


def coboundary_datum(rng, C, trunc=1):
    """Abelian exact datum lambda = -du, x = u_0 - u_1 - ds, t = bd s at
    order 1, with s normalized (so the data are normalized cochains)."""
    u = random_cochain(rng, C, 0, 0, trunc, [1])
    s = random_cochain(rng, C, 1, -1, trunc, [1], normalized=True)
    lam = -u.d()
    x = C.apply_coface(u, 1) - C.apply_coface(u, 0) - s.d()
    t = C.boundary(s)
    return DescentDatum(C, lam, x, t)


# -- stack data ---------------------------------------------------------------------

def random_unit(rng, A, spread=3):
    """A random invertible element of A."""
    from .linalg import inverse
    while True:
        v = [rand_scalar(rng, -spread, spread) for _ in range(A.dim)]
        if inverse(A.left_matrix(v)) is not None:
            try:
                A.inverse(v)
                return v
            except ZeroDivisionError:
                pass


def random_automorphism(rng, A):
    """Inner automorphism by a random unit, composed with x -> a x on
    truncated polynomial algebras (whose inner automorphisms are trivial)."""
    from .gerbe import conjugation
    from .linalg import matmul
    M = conjugation(A, random_unit(rng, A))
    if A.name.startswith("Q[x]"):
        a = rand_scalar(rng, 1, 3)
        S = [[a ** i if i == j else 0 for j in range(A.dim)] for i in range(A.dim)]
        M = matmul(S, M)
    return M


def random_stack(rng, nerve, A):
    """The trivial stack transported by a random isomorphism (H, b).
    Returns (S, H, b, trivial)."""
    from .gerbe import StackDatum, conjugation
    from .linalg import inverse, matmul, matvec
    H = {i: random_automorphism(rng, A) for i in nerve.index_set}
    b = {}
    proto_pairs = _pairs(nerve)
    for i, j in proto_pairs:
        b[(i, j)] = list(A.unit) if i == j else random_unit(rng, A)
    G = {}
    for i, j in proto_pairs:
        G[(i, j)] = matmul(matmul(H[i], conjugation(A, b[(i, j)])), inverse(H[j]))
    c = {}
    for i, j, k in _triples(nerve):
        v = A.mul(A.mul(b[(i, j)], b[(j, k)]), A.inverse(b[(i, k)]))
        c[(i, j, k)] = matvec(H[i], v)
    S = StackDatum(nerve, A, G, c)
    triv = trivial_stack(nerve, A)
    return S, H, b, triv


def trivial_stack(nerve, A):
    from .gerbe import StackDatum
    return StackDatum(nerve, A, {(i, j): [[int(r == c) for c in range(A.dim)] for r in range(A.dim)]
                                 for i, j in _pairs(nerve)},
                      {(i, j, k): list(A.unit) for i, j, k in _triples(nerve)})


def _tuples(nerve, k):
    from itertools import product
    top = [s for s in nerve.simplices if not any(set(s) < set(t) for t in nerve.simplices)]
    seen = set()
    for s in top:
        seen.update(product(s, repeat=k))
    return sorted(seen)


def _pairs(nerve):
    return _tuples(nerve, 2)


def _triples(nerve):
    return _tuples(nerve, 3)


def perturb_stack(rng, S, central=True):
    """Multiply one c_ijk (distinct indices) by a random central unit
    (a scalar != 1) or by a random unit."""
    from .gerbe import StackDatum
    keys = [t for t in S.triples() if len(set(t)) == 3]
    key = rng.choice(keys)
    A = S.algebras[key[0]]
    if central:
        s = rng.choice([2, 3, Fraction(1, 2), -1])
        u = [s * x for x in A.unit]
    else:
        u = random_unit(rng, A)
    c = dict(S.c)
    c[key] = A.mul(S.c[key], u)
    return StackDatum(S.nerve, S.algebras, S.G, c), key


def random_chain_data(rng, nerve, A):
    """Coherent chain data G = phi_s phi_t^{-1}, c = b_st G_st(b_tr) b_sr^{-1}
    with random automorphisms phi and units b (A commutative)."""
    from .gerbe import ChainData
    from .linalg import inverse, matmul, matvec
    phi = {s: random_automorphism(rng, A) for s in nerve.simplices}
    b = {}
    for s, t in nerve.chains(1):
        b[(s, t)] = list(A.unit) if s == t else random_unit(rng, A)
    G = {(s, t): matmul(phi[s], inverse(phi[t])) for s, t in nerve.chains(1)}
    c = {}
    for s, t, r in nerve.chains(2):
        v = A.mul(A.mul(b[(s, t)], matvec(G[(s, t)], b[(t, r)])), A.inverse(b[(s, r)]))
        c[(s, t, r)] = v
    return ChainData(nerve, {s: A for s in nerve.simplices}, G, c)


# -- algebras and Hochschild cochains -----------------------------------------------------

def _small_associative():
    from .hochschild import AlgebraPresentation, triangular_algebra, truncated_polynomial_algebra
    prod2 = AlgebraPresentation(2, [(0, 0, 0, 1), (1, 1, 1, 1)], [1, 1], name="QxQ")
    prod3 = AlgebraPresentation(3, [(a, a, a, 1) for a in range(3)], [1, 1, 1], name="Q^3")
    return [truncated_polynomial_algebra(1), truncated_polynomial_algebra(2),
            truncated_polynomial_algebra(3), prod2, prod3, triangular_algebra(2)]


def random_table(rng, max_dim=3, p_assoc=0.5):
    """A random structure-constant table of dimension <= max_dim.  With
    probability p_assoc it is a random change of basis of a small unital
    associative algebra; otherwise a fully random table (nearly always
    non-associative).  Returns (algebra, built_associative)."""
    from .hochschild import AlgebraPresentation
    from .linalg import inverse, matvec
    if rng.random() < p_assoc:
        base = rng.choice([A for A in _small_associative() if A.dim <= max_dim])
        n = base.dim
        while True:
            P = [[rand_scalar(rng, -2, 2) for _ in range(n)] for _ in range(n)]
            Pi = inverse(P)
            if Pi is not None:
                break
        cols = [[P[r][c] for r in range(n)] for c in range(n)]
        mult = []
        for a in range(n):
            for b in range(n):
                v = matvec(Pi, base.mul(cols[a], cols[b]))
                mult += [(a, b, k, c) for k, c in enumerate(v) if c]
        unit = matvec(Pi, base.unit)
        return AlgebraPresentation(n, mult, unit, name="random_assoc", check=False), True
    n = rng.randint(1, max_dim)
    mult = [(a, b, k, rand_scalar(rng)) for a in range(n) for b in range(n) for k in range(n)
            if rng.random() < 0.5]
    return AlgebraPresentation(n, mult, None, name="random_table", check=False), False


def random_hochschild_cochain(rng, A, k, density=0.3):
    from itertools import product
    from .hochschild import HochschildCochain
    t = {}
    for key in product(range(A.dim), repeat=k):
        if rng.random() < density or (k == 0):
            t[key] = {rng.randrange(A.dim): rand_scalar(rng)}
    return HochschildCochain(A, k, t)


def random_local_cochain(rng, M, k, nnz=6):
    """Random local k-cochain on a twisted matrix algebra M: inputs form a
    composable path i0 -> i1 -> .. -> ik and the output sits in slot (i0, ik)."""
    from .hochschild import HochschildCochain
    sig = M.sigma
    dims = {i: M.stack.algebras[i].dim for i in sig}
    t = {}
    for _ in range(nnz):
        idx = [rng.choice(sig) for _ in range(k + 1)]
        ins = tuple(M.index[(idx[p], idx[p + 1], rng.randrange(dims[idx[p]]))] for p in range(k))
        if k == 0:
            i = rng.choice(sig)
            out = M.index[(i, i, rng.randrange(dims[i]))]
        else:
            out = M.index[(idx[0], idx[-1], rng.randrange(dims[idx[0]]))]
        t.setdefault(ins, {})[out] = rand_scalar(rng)
    return HochschildCochain(M, k, t)


def random_first_order_deformation(rng, h, N=1):
    """Random first order table e_a * e_b = m + hbar P.  A third of the time P
    is a coboundary (so the element is MC), otherwise a random, often
    commutative, P."""
    L = h.presentation
    if rng.random() < 1 / 3:
        return random_element(rng, L, N, 0, [1]).d()
    vec = [[0] * (N + 1) for _ in range(L.dims[1])]
    sym = rng.random() < 0.5
    for i, ((a, b), k) in enumerate(h.index[1]):
        if sym and a > b:
            continue
        if rng.random() < 0.35:
            v = rand_scalar(rng)
            vec[i][1] = v
            if sym and a != b:
                vec[h.lookup[1][((b, a), k)]][1] = v
    return GradedElement(L, N, {1: vec})


# -- De Rham-Sullivan collections ---------------------------------------------------------

def random_drs_collection(rng, nerve, A, arities=(0, 1, 2), max_poly=2, density=0.3):
    """A face-compatible collection obtained by restricting one random form
    on the big simplex (vertices = index set) to every simplex, together
    with R = d(theta) restricted likewise, theta a random 1-form with
    0-cochain (central, A commutative) coefficients."""
    from .simplicial import DrsCollection, MultiCochain
    from .sullivan import SullivanForm, monomials, restrict, sullivan_d
    P = len(nerve.index_set) - 1
    terms = {}
    for j in range(P + 1):
        for mono in monomials(P, max_poly, j):
            if rng.random() < density:
                terms[mono] = MultiCochain([random_hochschild_cochain(rng, A, rng.choice(arities))])
    w = SullivanForm(P, terms)
    theta = SullivanForm(P, {mono: MultiCochain([random_hochschild_cochain(rng, A, 0)])
                             for mono in monomials(P, max_poly, 1) if rng.random() < 0.5})
    R = sullivan_d(theta)

    def spread(f):
        return DrsCollection(nerve, {s: restrict(f, list(s)) for s in nerve.simplices})

    return spread(w), spread(R)
