"""Exact rational linear algebra on top of sympy's DomainMatrix over QQ."""

from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _to_qq(c):
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def _from_qq(x):
    f = Fraction(int(x.numerator), int(x.denominator))
    return int(f) if f.denominator == 1 else f


def to_domain(rows, ncols=None):
    rows = [list(r) for r in rows]
    nr = len(rows)
    nc = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    return DomainMatrix([[_to_qq(c) for c in r] for r in rows], (nr, nc), QQ)


def sparse_to_domain(entries, nrows, ncols):
    """entries: dict (i, j) -> rational."""
    d = {}
    for (i, j), c in entries.items():
        if c:
            d.setdefault(i, {})[j] = _to_qq(c)
    return DomainMatrix(d, (nrows, ncols), QQ)


def rank(rows, ncols=None):
    if not rows:
        return 0
    return to_domain(rows, ncols).rank()


def sparse_rank(entries, nrows, ncols):
    if nrows == 0 or ncols == 0:
        return 0
    return sparse_to_domain(entries, nrows, ncols).rank()


def nullspace(rows, ncols):
    """Basis (list of vectors) of {x : A x = 0}."""
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    ns = to_domain(rows, ncols).nullspace()
    return [[_from_qq(x) for x in r] for r in ns.to_Matrix().tolist()] if ns.shape[0] else []


def sparse_nullspace(entries, nrows, ncols):
    if nrows == 0:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    M = sparse_to_domain(entries, nrows, ncols)
    ns = M.nullspace()
    if ns.shape[0] == 0:
        return []
    return [[_from_qq(x) for x in row] for row in ns.to_list()]


SMALL = 40


def _gauss_solve(A, b):
    """Gauss-Jordan over Fractions for small dense systems."""
    n = len(A[0]) if A else 0
    M = [[Fraction(x) for x in row] + [Fraction(bb)] for row, bb in zip(A, b)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][col]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col]:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
        if r == len(M):
            break
    if any(row[n] and not any(row[:n]) for row in M):
        return None
    x = [0] * n
    for i, pc in enumerate(pivots):
        x[pc] = _simplify(M[i][n])
    return x


def _simplify(f):
    return int(f) if f.denominator == 1 else f


def solve(A, b):
    """One solution of A x = b, or None."""
    n = len(A[0]) if A else 0
    if n <= SMALL and len(A) <= SMALL:
        return _gauss_solve(A, b)
    aug = [list(r) + [bb] for r, bb in zip(A, b)]
    M = to_domain(aug, n + 1)
    R, pivots = M.rref()
    if n in pivots:
        return None
    rows = R.to_list()
    x = [0] * n
    for r, pc in enumerate(pivots):
        x[pc] = _from_qq(rows[r][n])
    return x


def inverse(rows):
    """Inverse of a square matrix, or None when singular."""
    n = len(rows)
    if n <= SMALL:
        M = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
             for i, r in enumerate(rows)]
        for col in range(n):
            piv = next((i for i in range(col, n) if M[i][col]), None)
            if piv is None:
                return None
            M[col], M[piv] = M[piv], M[col]
            inv = 1 / M[col][col]
            M[col] = [x * inv for x in M[col]]
            for i in range(n):
                if i != col and M[i][col]:
                    f = M[i][col]
                    M[i] = [x - f * y for x, y in zip(M[i], M[col])]
        return [[_simplify(x) for x in r[n:]] for r in M]
    M = to_domain(rows, n)
    if M.rank() < n:
        return None
    inv = M.inv()
    return [[_from_qq(x) for x in r] for r in inv.to_list()]


def matmul(A, B):
    n, m = len(A), len(B[0]) if B else 0
    out = [[0] * m for _ in range(n)]
    for i, row in enumerate(A):
        for k, a in enumerate(row):
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        out[i][j] += a * b
    return out


def matvec(A, v):
    return [sum(a * x for a, x in zip(row, v) if a and x) for row in A]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
