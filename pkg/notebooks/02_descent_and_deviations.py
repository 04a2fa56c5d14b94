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
# # Descent data and their deviation cocycles
#
# A constant sheaf of DGLAs on the nerve of a two-set cover gives a Cech
# cosimplicial DGLA.  A descent datum (lambda, x, t) is exact when it comes
# from a global gauge transformation.  When a datum only holds modulo
# hbar^(n+1), its failure at the next order is a cocycle.

# %%
import random

from artifact import models
from artifact.sampling import near_descent, near_iso, random_exact_datum
from artifact.simplicial import (Nerve, SimplicialDglaSheaf, cech_complex, constant_cosimplicial,
                                 descent_verify, deviation_cocycle, iso_deviation, totalize)

rng = random.Random(1)
C = cech_complex(SimplicialDglaSheaf.constant(Nerve.full(2), models.heisenberg_exterior()), cap=4)
print([len(C.keys(p)) for p in range(4)])

# %% [markdown]
# ## An exact datum

# %%
D = random_exact_datum(rng, C, 2)
rep = descent_verify(D)
print({k: v["pass"] if isinstance(v, dict) else v for k, v in rep.items()})

# %% [markdown]
# ## Near descent
#
# `near_descent(rng, C, n)` builds a datum that holds modulo hbar^(n+1) and
# fails at order n+1.  The extracted components are closed for d plus the
# Cech boundary.

# %%
for n in (0, 1):
    res = deviation_cocycle(near_descent(rng, C, n), order=n + 1)
    print(n, res.precondition_ok, res.closed)

D, Dp, hh, s = near_iso(rng, C, 1)
print("iso deviation closed:", iso_deviation(D, Dp, hh, s, level="iso", order=2).closed)

# %% [markdown]
# ## Totalization
#
# Tot of the constant cosimplicial DGLA, built from polynomial forms on
# simplices.  In degree 0 its flat part has the same dimension as the kernel
# of d on the input.

# %%
L = models.heisenberg_dga()
T = totalize(constant_cosimplicial(L, cap=3), p_max=2, D_t=3)
print(L.dims, "->", T.dims)
