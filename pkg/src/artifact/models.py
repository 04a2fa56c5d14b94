"""Small exact DGLAs used by the tests, the examples and the CLI."""

from __future__ import annotations

from .dgla import DglaPresentation


def abelian(dims, differential=None, name="abelian"):
    return DglaPresentation(dims, differential or {}, (), name=name)


def sl2(name="sl2"):
    """e, f, h in degree 0: [h,e]=2e, [h,f]=-2f, [e,f]=h."""
    E, F, H = 0, 1, 2
    entries = [
        (0, H, 0, E, E, 2),
        (0, H, 0, F, F, -2),
        (0, E, 0, F, H, 1),
    ]
    return DglaPresentation({0: 3}, {}, entries, name=name,
                            labels={0: ["e", "f", "h"]}, antisymmetrize=True)


def heisenberg(name="heisenberg"):
    """x, y, z in degree 0 with [x,y] = z."""
    return DglaPresentation({0: 3}, {}, [(0, 0, 0, 1, 2, 1)], name=name,
                            labels={0: ["x", "y", "z"]}, antisymmetrize=True)


# A small graded-commutative dga used to spread a Lie algebra over degrees
# -1..2.  Basis (degree): 1 (0), e (-1), f (1), ef (0), u (2), eu (1), with
# d f = u, d(ef) = -eu, and fu = efu = 0 imposed.
DGA_BASIS = [("1", 0), ("e", -1), ("f", 1), ("ef", 0), ("u", 2), ("eu", 1)]
_IDX = {n: i for i, (n, _) in enumerate(DGA_BASIS)}


def _dga_mult(x, y):
    """Product of basis monomials, returns (sign, name) or None."""
    if x == "1":
        return 1, y
    if y == "1":
        return 1, x
    letters = {"e": 0, "f": 1, "u": 2}
    deg = {"e": -1, "f": 1, "u": 2}
    word = list(x) + list(y)
    if len(set(word)) != len(word):
        return None
    # sort to canonical order e < f < u, tracking Koszul sign
    sign = 1
    w = word[:]
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if letters[w[j]] > letters[w[j + 1]]:
                if deg[w[j]] % 2 and deg[w[j + 1]] % 2:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    name = "".join(w)
    if name not in _IDX:
        return None
    return sign, name


def _dga_d(name, unit_boundary=False):
    if unit_boundary:
        # variant with d e = 1: d(ef) = f - eu, d(eu) = u
        return {"e": [(1, "1")], "f": [(1, "u")], "ef": [(1, "f"), (-1, "eu")],
                "eu": [(1, "u")]}.get(name, [])
    return {"f": [(1, "u")], "ef": [(-1, "eu")]}.get(name, [])


def lie_tensor_dga(lie_dims, lie_bracket, name, lie_labels=None, unit_boundary=False):
    """g (x) A for a Lie algebra g in degree 0 (structure constants
    ``lie_bracket``: iterable of (a, b, k, c), both orderings) and the
    six-dimensional dga A above.  ``unit_boundary`` switches to the acyclic
    variant of A with d e = 1, which makes d nonzero on degree -1."""
    n = lie_dims
    by_deg = {}
    for i, (nm, dg) in enumerate(DGA_BASIS):
        by_deg.setdefault(dg, []).append(nm)
    index = {}
    dims = {}
    labels = {}
    for dg in sorted(by_deg):
        k = 0
        labels[dg] = []
        for nm in by_deg[dg]:
            for a in range(n):
                index[(a, nm)] = (dg, k)
                labels[dg].append(f"{(lie_labels or [str(i) for i in range(n)])[a]}{'' if nm == '1' else '*' + nm}")
                k += 1
        dims[dg] = k
    diff = {}
    for a in range(n):
        for nm, _ in DGA_BASIS:
            p, col = index[(a, nm)]
            for c, tgt in _dga_d(nm, unit_boundary):
                q, row = index[(a, tgt)]
                diff.setdefault(p, []).append((row, col, c))
    entries = []
    for a, b, k, c in lie_bracket:
        for x, _ in DGA_BASIS:
            for y, _ in DGA_BASIS:
                m = _dga_mult(x, y)
                if m is None:
                    continue
                sign, z = m
                p, i = index[(a, x)]
                q, j = index[(b, y)]
                r, t = index[(k, z)]
                entries.append((p, i, q, j, t, sign * c))
    return DglaPresentation(dims, diff, entries, name=name, labels=labels)


def heisenberg_dga(name="heisenberg_dga", unit_boundary=False):
    """Heisenberg algebra tensored with the dga above: a 2-step nilpotent
    DGLA concentrated in degrees -1..2."""
    br = [(0, 1, 2, 1), (1, 0, 2, -1)]
    return lie_tensor_dga(3, br, name, ["x", "y", "z"], unit_boundary)


def abelian_dga(n=2, name="abelian_dga", unit_boundary=False):
    return lie_tensor_dga(n, [], name, unit_boundary=unit_boundary)


def exterior_dga(generators, dgen):
    """Free graded-commutative algebra on odd generators (exterior algebra).

    generators: list of (name, degree) with odd degrees; dgen: name ->
    list of (coeff, tuple of generator names) giving d on generators.
    Returns (basis as list of (word, degree), mult(w1, w2) -> (sign, word) or
    None, d(word) -> list of (coeff, word)).
    """
    names = [g for g, _ in generators]
    deg = dict(generators)
    order = {g: i for i, g in enumerate(names)}
    basis = []
    for mask in range(1 << len(names)):
        w = tuple(g for i, g in enumerate(names) if mask >> i & 1)
        basis.append((w, sum(deg[g] for g in w)))

    def mult(w1, w2):
        seq = list(w1) + list(w2)
        if len(set(seq)) != len(seq):
            return None
        sign = 1
        for a in range(len(seq)):
            for b in range(a + 1, len(seq)):
                if order[seq[a]] > order[seq[b]]:
                    sign = -sign
        return sign, tuple(sorted(seq, key=order.__getitem__))

    def d(w):
        out = {}
        for i, g in enumerate(w):
            sign = -1 if i % 2 else 1      # every generator is odd
            for c, img in dgen.get(g, []):
                left = mult(w[:i], img)
                if left is None:
                    continue
                s1, lw = left
                full = mult(lw, w[i + 1:])
                if full is None:
                    continue
                s2, fw = full
                out[fw] = out.get(fw, 0) + sign * s1 * s2 * c
        return [(c, w2) for w2, c in out.items() if c]

    return basis, mult, d


def lie_tensor_exterior(lie_dims, lie_bracket, name, generators, dgen, lie_labels=None):
    basis, mult, dA = exterior_dga(generators, dgen)
    index = {}
    dims = {}
    labels = {}
    for w, dg in sorted(basis, key=lambda b: (b[1], len(b[0]), b[0])):
        for a in range(lie_dims):
            k = dims.get(dg, 0)
            index[(a, w)] = (dg, k)
            dims[dg] = k + 1
            lab = (lie_labels or [str(i) for i in range(lie_dims)])[a]
            labels.setdefault(dg, []).append(lab + ("*" + "".join(w) if w else ""))
    diff = {}
    for a in range(lie_dims):
        for w, _ in basis:
            p, col = index[(a, w)]
            for c, w2 in dA(w):
                q, row = index[(a, w2)]
                diff.setdefault(p, []).append((row, col, c))
    entries = []
    for a, b, k, c in lie_bracket:
        for x, _ in basis:
            for y, _ in basis:
                m = mult(x, y)
                if m is None:
                    continue
                sign, z = m
                p, i = index[(a, x)]
                q, j = index[(b, y)]
                _, t = index[(k, z)]
                entries.append((p, i, q, j, t, sign * c))
    return DglaPresentation(dims, diff, entries, name=name, labels=labels)


def heisenberg_exterior(name="heisenberg_ext"):
    """Heisenberg algebra tensored with the exterior algebra on e (degree -1)
    and f1, f2 (degree 1), d e = 1, d f1 = f1 f2.  Two-step nilpotent, degrees
    -1..2, with nonzero brackets between every pair of degrees that fit."""
    br = [(0, 1, 2, 1), (1, 0, 2, -1)]
    gens = [("e", -1), ("f1", 1), ("f2", 1)]
    dgen = {"e": [(1, ())], "f1": [(1, ("f1", "f2"))]}
    return lie_tensor_exterior(3, br, name, gens, dgen, ["x", "y", "z"])


def abelian_exterior(n=2, name="abelian_ext"):
    gens = [("e", -1), ("f1", 1), ("f2", 1)]
    dgen = {"e": [(1, ())], "f1": [(1, ("f1", "f2"))]}
    return lie_tensor_exterior(n, [], name, gens, dgen)
