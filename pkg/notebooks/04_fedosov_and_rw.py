# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Weyl algebra, Fedosov connections and the RW form
#
# The flat model: R^2 with its standard symplectic form, fibre variables
# y^1, y^2 and base coordinates x^1, x^2.  Truncation keeps hbar^k with
# k <= N and |y| + 2k <= D.

# %%
from fractions import Fraction

import numpy as np

from artifact.fedosov import (SymplecticModel, WeylElement, characteristic_class, exact_term,
                              fedosov_solve, flatness_residual, gauge_move, rw_form)

M = SymplecticModel.standard(1)
y1, y2 = WeylElement.y(M, 0), WeylElement.y(M, 1)
print("y1*y2 - y2*y1 =", y1 * y2 - y2 * y1)
print("y1^2 * y2^2 =", WeylElement.monomial(M, y=(2, 0), D=8) * WeylElement.monomial(M, y=(0, 2), D=8))

# %% [markdown]
# ## Solving for a flat connection with a prescribed class

# %%
theta = {-1: M.omega, 0: [[0, 2], [-2, 0]]}
pair = fedosov_solve(M, theta, truncation=(3, 6))
print("iterations:", pair.iterations, " flat:", flatness_residual(pair) == [])
th = characteristic_class(pair)
for m in th.orders():
    print(m, th.matrix(m))

# %% [markdown]
# A gauge move by X in hbar W changes the class by an exact term only.

# %%
X = WeylElement(M, {(1, (1, 0), (1, 0)): 1, (2, (1, 1), (0, 0)): 3}, pair.N, pair.D)
moved, alpha = gauge_move(pair, X)
print(characteristic_class(moved) == th + exact_term(alpha, pair.window))

# %% [markdown]
# ## The RW form of a curvature-like tensor

# %%
rng = np.random.default_rng(3)
m = M.dim
R = np.zeros((m, m, m, m), dtype=object)
for a in range(m):
    for b in range(a, m):
        for i in range(m):
            for j in range(m):
                R[a, b, i, j] = R[b, a, i, j] = Fraction(int(rng.integers(-3, 4)))
print(rw_form(R.tolist(), M))
