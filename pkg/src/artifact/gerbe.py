"""Stack data, twisted matrix algebras, local Hochschild cochains and the
reconstruction of a stack datum from data indexed by chains of simplices.

Algebra maps are matrices (rows = output coordinates) and elements are
coefficient vectors.  G[(i, j)] maps A_j to A_i; c[(i, j, k)] lives in A_i.
"""

from __future__ import annotations

from itertools import product

from .hochschild import AlgebraPresentation, HochschildCochain
from .linalg import identity, inverse, matmul, matvec
from .simplicial import Nerve

__all__ = [
    "StackDatum", "validate_stack", "stack_iso_verify", "stack_iso_report",
    "TwistedMatrixAlgebra", "twisted_matrix_build", "local_cochain_check",
    "local_cochain_witness", "restrict_cochain", "ChainData",
    "validate_chain_data", "barycentric_reconstruct", "chain_data_from_stack",
    "algebra_automorphism_witness", "conjugation",
]


def _same_vec(u, v):
    return all(a == b for a, b in zip(u, v))


def conjugation(A: AlgebraPresentation, u):
    """Matrix of Ad(u): y -> u y u^{-1}."""
    ui = A.inverse(u)
    cols = [A.mul(A.mul(u, A.basis_vector(b)), ui) for b in range(A.dim)]
    return [[cols[b][k] for b in range(A.dim)] for k in range(A.dim)]


def algebra_automorphism_witness(M, source: AlgebraPresentation, target: AlgebraPresentation):
    """None if M is a unital algebra isomorphism source -> target."""
    if len(M) != target.dim or any(len(r) != source.dim for r in M):
        return "shape"
    if inverse(M) is None:
        return "not invertible"
    if source.unit is not None and target.unit is not None:
        if not _same_vec(matvec(M, source.unit), target.unit):
            return "not unital"
    for a in range(source.dim):
        ea = source.basis_vector(a)
        Ma = matvec(M, ea)
        for b in range(source.dim):
            eb = source.basis_vector(b)
            if not _same_vec(matvec(M, source.mul(ea, eb)), target.mul(Ma, matvec(M, eb))):
                return ("not multiplicative", a, b)
    return None


class StackDatum:
    """Algebras A_i, isomorphisms G_ij: A_j -> A_i and units c_ijk in A_i for
    all index tuples inside simplices of the nerve (repetitions allowed).
    G_ii defaults to the identity and c_iij = c_ijj to the unit."""

    def __init__(self, nerve: Nerve, algebras, G, c, name="S"):
        self.nerve = nerve
        self.name = name
        if isinstance(algebras, AlgebraPresentation):
            algebras = {i: algebras for i in nerve.index_set}
        self.algebras = dict(algebras)
        for i in nerve.index_set:
            if i not in self.algebras:
                raise ValueError(f"no algebra for index {i!r}")
        self.G = {}
        for i, j in self.pairs():
            if (i, j) in G:
                M = [list(r) for r in G[(i, j)]]
            elif i == j:
                M = identity(self.algebras[i].dim)
            else:
                raise ValueError(f"G missing on ({i}, {j})")
            self.G[(i, j)] = M
        self.c = {}
        for i, j, k in self.triples():
            if (i, j, k) in c:
                v = list(c[(i, j, k)])
            elif i == j or j == k:
                v = list(self.algebras[i].unit)
            else:
                raise ValueError(f"c missing on ({i}, {j}, {k})")
            if len(v) != self.algebras[i].dim:
                raise ValueError(f"c on ({i}, {j}, {k}) has the wrong length")
            self.c[(i, j, k)] = v

    def _tuples(self, k):
        seen = set()
        top = [s for s in self.nerve.simplices
               if not any(set(s) < set(t) for t in self.nerve.simplices)]
        for s in top:
            for t in product(s, repeat=k):
                if t not in seen:
                    seen.add(t)
        return sorted(seen, key=lambda t: [self.nerve._pos[v] for v in t])

    def pairs(self):
        return self._tuples(2)

    def triples(self):
        return self._tuples(3)

    def quadruples(self):
        return self._tuples(4)

    def apply_G(self, i, j, v):
        return matvec(self.G[(i, j)], v)


def validate_stack(S: StackDatum):
    """Report with pass/fail and witness for: G isomorphisms, c invertible,
    normalization, G_ij G_jk = Ad(c_ijk) G_ik and
    c_ijk c_ikl = G_ij(c_jkl) c_ijl."""
    rep = {k: {"pass": True, "witness": None}
           for k in ("isomorphisms", "units", "normalized", "cocycle1", "cocycle2")}

    def fail(k, w):
        if rep[k]["pass"]:
            rep[k] = {"pass": False, "witness": w}

    for (i, j), M in S.G.items():
        w = algebra_automorphism_witness(M, S.algebras[j], S.algebras[i])
        if w is not None:
            fail("isomorphisms", [i, j])
        if i == j and M != identity(S.algebras[i].dim):
            fail("normalized", [i, i])
    inv = {}
    for key, v in S.c.items():
        A = S.algebras[key[0]]
        try:
            inv[key] = A.inverse(v)
        except ZeroDivisionError:
            fail("units", list(key))
        i, j, k = key
        if (i == j or j == k) and not _same_vec(v, A.unit):
            fail("normalized", list(key))
    if not rep["units"]["pass"] or not rep["isomorphisms"]["pass"]:
        rep["pass"] = False
        return rep
    for i, j, k in S.triples():
        A = S.algebras[i]
        lhs = matmul(S.G[(i, j)], S.G[(j, k)])
        rhs = matmul(conjugation(A, S.c[(i, j, k)]), S.G[(i, k)])
        if lhs != rhs:
            fail("cocycle1", [i, j, k])
            break
    for i, j, k, l in S.quadruples():
        A = S.algebras[i]
        lhs = A.mul(S.c[(i, j, k)], S.c[(i, k, l)])
        rhs = A.mul(S.apply_G(i, j, S.c[(j, k, l)]), S.c[(i, j, l)])
        if not _same_vec(lhs, rhs):
            fail("cocycle2", [i, j, k, l])
            break
    rep["pass"] = all(r["pass"] for r in rep.values())
    return rep


def stack_iso_report(H, b, S1: StackDatum, S2: StackDatum):
    """Check G2_ij = H_i Ad(b_ij) G1_ij H_j^{-1} and
    H_i^{-1}(c2_ijk) = b_ij G1_ij(b_jk) c1_ijk b_ik^{-1}."""
    if S1.nerve != S2.nerve:
        raise ValueError("stack data on different nerves")
    Hinv = {}
    for i in S1.nerve.index_set:
        Hi = H[i]
        w = algebra_automorphism_witness(Hi, S1.algebras[i], S2.algebras[i])
        if w is not None:
            return {"pass": False, "witness": ["H", i]}
        Hinv[i] = inverse(Hi)

    def bb(i, j):
        if (i, j) in b:
            return b[(i, j)]
        if i == j:
            return S1.algebras[i].unit
        raise ValueError(f"b missing on ({i}, {j})")

    for i, j in S1.pairs():
        A = S1.algebras[i]
        try:
            Ad = conjugation(A, bb(i, j))
        except ZeroDivisionError:
            return {"pass": False, "witness": ["b", i, j]}
        rhs = matmul(matmul(matmul(H[i], Ad), S1.G[(i, j)]), Hinv[j])
        if rhs != S2.G[(i, j)]:
            return {"pass": False, "witness": ["G", i, j]}
    for i, j, k in S1.triples():
        A = S1.algebras[i]
        lhs = matvec(Hinv[i], S2.c[(i, j, k)])
        rhs = A.mul(A.mul(A.mul(bb(i, j), S1.apply_G(i, j, bb(j, k))), S1.c[(i, j, k)]),
                    A.inverse(bb(i, k)))
        if not _same_vec(lhs, rhs):
            return {"pass": False, "witness": ["c", i, j, k]}
    return {"pass": True, "witness": None}


def stack_iso_verify(H, b, S1, S2) -> bool:
    return stack_iso_report(H, b, S1, S2)["pass"]


# -- twisted matrix algebras --------------------------------------------------------

class TwistedMatrixAlgebra(AlgebraPresentation):
    """Matr^sigma_tw: basis a E_ij with a running over a basis of A_i.
    ``slots[n] = (i, j, a)``, ``index[(i, j, a)] = n``."""

    def __init__(self, S: StackDatum, sigma):
        sigma = S.nerve._norm(sigma)
        if sigma not in S.nerve._set:
            raise ValueError(f"{sigma} is not a simplex")
        self.sigma = sigma
        self.stack = S
        slots = []
        for i in sigma:
            for j in sigma:
                for a in range(S.algebras[i].dim):
                    slots.append((i, j, a))
        index = {s: n for n, s in enumerate(slots)}
        mult = []
        for (i, j, a) in slots:
            A = S.algebras[i]
            ea = A.basis_vector(a)
            for k in sigma:
                c = S.c[(i, j, k)]
                for b in range(S.algebras[j].dim):
                    Gb = S.G[(i, j)]
                    img = [row[b] for row in Gb]
                    val = A.mul(A.mul(ea, img), c)
                    for m, x in enumerate(val):
                        if x:
                            mult.append((index[(i, j, a)], index[(j, k, b)], index[(i, k, m)], x))
        unit = [0] * len(slots)
        for i in sigma:
            u = S.algebras[i].unit
            for a, x in enumerate(u):
                if x:
                    unit[index[(i, i, a)]] = x
        super().__init__(len(slots), mult, unit, name=f"Matr_tw{list(sigma)}", check=False)
        self.slots = slots
        self.index = index


def twisted_matrix_build(S: StackDatum, sigma) -> TwistedMatrixAlgebra:
    return TwistedMatrixAlgebra(S, sigma)


def local_cochain_witness(D: HochschildCochain):
    """None if D is local on its twisted matrix algebra, else the offending
    (inputs, output) pair."""
    T = D.algebra
    if not isinstance(T, TwistedMatrixAlgebra):
        raise TypeError("local cochains live on twisted matrix algebras")
    for key, row in D.tensor.items():
        ins = [T.slots[n] for n in key]
        for out in row:
            oi, oj, _ = T.slots[out]
            if not ins:
                if oi != oj:
                    return (key, out)
                continue
            for p in range(len(ins) - 1):
                if ins[p][1] != ins[p + 1][0]:
                    return (key, out)
            if (oi, oj) != (ins[0][0], ins[-1][1]):
                return (key, out)
    return None


def local_cochain_check(D: HochschildCochain) -> bool:
    return local_cochain_witness(D) is None


def restrict_cochain(D: HochschildCochain, target: TwistedMatrixAlgebra):
    """Restriction of a cochain on Matr^tau to the subalgebra Matr^sigma,
    sigma a face of tau.  Values must land in the sigma slots."""
    src = D.algebra
    if not set(target.sigma) <= set(src.sigma):
        raise ValueError("restriction goes to a face")
    keep = {n: target.index[s] for n, s in enumerate(src.slots) if s in target.index}
    t = {}
    for key, row in D.tensor.items():
        if not all(n in keep for n in key):
            continue
        nk = tuple(keep[n] for n in key)
        for out, c in row.items():
            if out not in keep:
                raise ValueError("value leaves the subalgebra")
            t.setdefault(nk, {})[keep[out]] = c
    return HochschildCochain(target, D.degree, t)


# -- chain data and barycentric reconstruction -------------------------------------------

class ChainData:
    """Data indexed by simplices of a nerve: algebras AA[sigma],
    maps G[(sigma, tau)]: AA[tau] -> AA[sigma] for sigma <= tau and units
    c[(sigma, tau, rho)] in AA[sigma] for sigma <= tau <= rho.  Degenerate
    entries default to identities and units."""

    def __init__(self, nerve: Nerve, algebras, G, c):
        self.nerve = nerve
        if isinstance(algebras, AlgebraPresentation):
            algebras = {s: algebras for s in nerve.simplices}
        self.algebras = {nerve._norm(s): A for s, A in algebras.items()}
        norm = nerve._norm
        self.G = {}
        for s, t in self._chains(2):
            key = (s, t)
            given = {(norm(a), norm(b)): M for (a, b), M in G.items()}
            if key in given:
                self.G[key] = given[key]
            elif s == t:
                self.G[key] = identity(self.algebras[s].dim)
            else:
                raise ValueError(f"G missing on {key}")
        givenc = {tuple(norm(x) for x in k): v for k, v in c.items()}
        self.c = {}
        for s, t, r in self._chains(3):
            key = (s, t, r)
            if key in givenc:
                self.c[key] = givenc[key]
            elif s == t or t == r:
                self.c[key] = list(self.algebras[s].unit)
            else:
                raise ValueError(f"c missing on {key}")

    def _chains(self, k):
        return [ch for ch in self.nerve.chains(k - 1)]


def validate_chain_data(CD: ChainData):
    rep = {k: {"pass": True, "witness": None}
           for k in ("isomorphisms", "normalized", "cocycle1", "cocycle2")}

    def fail(k, w):
        if rep[k]["pass"]:
            rep[k] = {"pass": False, "witness": w}

    for (s, t), M in CD.G.items():
        if algebra_automorphism_witness(M, CD.algebras[t], CD.algebras[s]) is not None:
            fail("isomorphisms", [list(s), list(t)])
    for (s, t, r), v in CD.c.items():
        if (s == t or t == r) and not _same_vec(v, CD.algebras[s].unit):
            fail("normalized", [list(s), list(t), list(r)])
    if not rep["isomorphisms"]["pass"]:
        rep["pass"] = False
        return rep
    for s, t, r in CD.nerve.chains(2):
        A = CD.algebras[s]
        try:
            Ad = conjugation(A, CD.c[(s, t, r)])
        except ZeroDivisionError:
            fail("cocycle1", [list(s), list(t), list(r)])
            continue
        if matmul(CD.G[(s, t)], CD.G[(t, r)]) != matmul(Ad, CD.G[(s, r)]):
            fail("cocycle1", [list(s), list(t), list(r)])
    for s, t, r, q in CD.nerve.chains(3):
        A = CD.algebras[s]
        lhs = A.mul(CD.c[(s, t, r)], CD.c[(s, r, q)])
        rhs = A.mul(matvec(CD.G[(s, t)], CD.c[(t, r, q)]), CD.c[(s, t, q)])
        if not _same_vec(lhs, rhs):
            fail("cocycle2", [list(s), list(t), list(r), list(q)])
    rep["pass"] = all(v["pass"] for v in rep.values())
    return rep


def chain_data_from_stack(S: StackDatum):
    """Restrict a stack datum along chains, using the first vertex of each
    simplex: AA_sigma = A_{sigma_0}, G_{sigma tau} = G_{sigma_0 tau_0},
    c_{sigma tau rho} = c_{sigma_0 tau_0 rho_0}."""
    nerve = S.nerve
    algebras = {s: S.algebras[s[0]] for s in nerve.simplices}
    G = {(s, t): S.G[(s[0], t[0])] for s, t in nerve.chains(1)}
    c = {(s, t, r): S.c[(s[0], t[0], r[0])] for s, t, r in nerve.chains(2)}
    return ChainData(nerve, algebras, G, c)


def barycentric_reconstruct(CD: ChainData, check=True):
    """Stack datum with A_i = AA_(i), G_ij = G_(i)(ij) G_(j)(ij)^{-1} and
    c_ijk the alternated product over the six faces of the barycentric
    subdivision of (ijk)."""
    if check:
        rep = validate_chain_data(CD)
        if not rep["pass"]:
            raise ValueError(f"incoherent chain data: {rep}")
    nerve = CD.nerve
    norm = nerve._norm

    def simp(*vs):
        return norm(tuple(dict.fromkeys(vs)))

    Ginv = {}

    def G_inv(s, t):
        if (s, t) not in Ginv:
            Ginv[(s, t)] = inverse(CD.G[(s, t)])
        return Ginv[(s, t)]

    def Gpair(i, j, e):
        # G_(i)(e) G_(j)(e)^{-1}: AA_(j) -> AA_(i)
        return matmul(CD.G[(simp(i), e)], G_inv(simp(j), e))

    algebras = {i: CD.algebras[simp(i)] for i in nerve.index_set}
    proto = StackDatum.__new__(StackDatum)
    proto.nerve = nerve
    proto.algebras = algebras
    G = {}
    for i, j in StackDatum.pairs(proto):
        G[(i, j)] = Gpair(i, j, simp(i, j)) if i != j else identity(algebras[i].dim)
    c = {}
    for i, j, k in StackDatum.triples(proto):
        A = algebras[i]
        Ai, Aj, Ak = simp(i), simp(j), simp(k)
        ij, jk, ik, ijk = simp(i, j), simp(j, k), simp(i, k), simp(i, j, k)
        Bj = CD.algebras[Aj]
        Bk = CD.algebras[Ak]
        f1 = CD.c[(Ai, ij, ijk)]
        inner2 = Bj.mul(Bj.inverse(CD.c[(Aj, ij, ijk)]), CD.c[(Aj, jk, ijk)])
        f2 = matvec(Gpair(i, j, ijk), inner2)
        inner3 = Bk.mul(Bk.inverse(CD.c[(Ak, jk, ijk)]), CD.c[(Ak, ik, ijk)])
        f3 = matvec(Gpair(i, k, ijk), inner3)
        f4 = A.inverse(CD.c[(Ai, ik, ijk)])
        c[(i, j, k)] = A.mul(A.mul(A.mul(f1, f2), f3), f4)
    return StackDatum(nerve, algebras, G, c, name="reconstructed")
