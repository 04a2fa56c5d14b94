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
# # Stack data, twisted matrices and barycentric reconstruction
#
# A stack datum on a cover has algebras A_i, isomorphisms G_ij and units
# c_ijk.  The twisted matrix algebra glues them into one algebra per simplex,
# and it is associative exactly when the four-index cocycle condition holds.

# %%
import random

from artifact.gerbe import (barycentric_reconstruct, chain_data_from_stack, stack_iso_verify,
                            twisted_matrix_build, validate_stack)
from artifact.hochschild import triangular_algebra, truncated_polynomial_algebra
from artifact.sampling import perturb_stack, random_chain_data, random_stack
from artifact.simplicial import Nerve

rng = random.Random(2)
X = Nerve.full(3)
T2 = triangular_algebra(2)

# %%
S, H, b, triv = random_stack(rng, X, T2)
print("valid:", validate_stack(S)["pass"], " isomorphic to trivial:", stack_iso_verify(H, b, triv, S))
M = twisted_matrix_build(S, X.index_set)
print("twisted algebra of dimension", M.dim, "associative:", M.is_associative())

# %% [markdown]
# Multiply one c_ijk by a central scalar.  The first cocycle condition does
# not see it; the second one does, and so does associativity.

# %%
bad, key = perturb_stack(rng, S)
rep = validate_stack(bad)
print(key, rep["cocycle1"]["pass"], rep["cocycle2"])
print("associative:", twisted_matrix_build(bad, X.index_set).is_associative())

# %% [markdown]
# ## From chains of simplices back to a stack datum

# %%
CD = random_chain_data(rng, Nerve.full(4), truncated_polynomial_algebra(2))
print(validate_stack(barycentric_reconstruct(CD))["pass"])

R = barycentric_reconstruct(chain_data_from_stack(S))
ident = {i: [[int(r == c) for c in range(3)] for r in range(3)] for i in X.index_set}
b = {(i, j): T2.inverse(S.c[(i, j, i)]) if i < j else list(T2.unit) for i, j in S.pairs()}
print("round trip isomorphic:", stack_iso_verify(ident, b, S, R))
