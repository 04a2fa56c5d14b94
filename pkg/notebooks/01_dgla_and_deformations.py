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
# # DGLAs, Maurer-Cartan elements and deformations
#
# Everything here is exact: scalars are rationals, and the Artinian ring is
# Q[hbar]/(hbar^(N+1)).  We start with a small nilpotent model, then move to
# the Hochschild DGLA of Q[x]/(x^3), where Maurer-Cartan elements are exactly
# the associative first order deformations.

# %%
import random

from artifact import models
from artifact.deligne import GaugeTransformation, MaurerCartanElement, gauge_apply, mc_defect
from artifact.dgla import GradedElement, bch, report_ok, validate_dgla
from artifact.hochschild import deformation_bridge, hochschild_dgla, truncated_polynomial_algebra
from artifact.sampling import random_element, random_first_order_deformation

rng = random.Random(0)

# %% [markdown]
# ## The axiom suite
#
# `validate_dgla` checks d^2 = 0, graded antisymmetry, Jacobi and Leibniz on
# basis elements and reports a witness for each failure.

# %%
L = models.heisenberg_exterior()
print(L.dims)
print(validate_dgla(L))

# %% [markdown]
# ## Gauge action
#
# Starting from 0, the gauge image of any X in L^0 (tensored with the maximal
# ideal) is a Maurer-Cartan element.  The action is compatible with BCH.

# %%
N = 2
X = random_element(rng, L, N, 0, [1, 2], 0.5)
Y = random_element(rng, L, N, 0, [1, 2], 0.5)
lam = gauge_apply(X, GradedElement.zero(L, N))
print("MC defect:", mc_defect(lam).is_zero())
print("group action:", gauge_apply(Y, lam) == gauge_apply(bch(Y, X), GradedElement.zero(L, N)))

G = GaugeTransformation.from_source(Y, MaurerCartanElement(lam))
print("certified gauge transformation:", G.certify())

# %% [markdown]
# ## Hochschild cochains of Q[x]/(x^3)
#
# The shifted Hochschild complex is a DGLA with the Gerstenhaber bracket.
# Degree 1 holds the 2-cochains, i.e. candidate corrections of the product.

# %%
A = truncated_polynomial_algebra(3)
h = hochschild_dgla(A)
print(h.presentation.dims, report_ok(validate_dgla(h.presentation)))

# %% [markdown]
# A random first order deformation m + hbar P: the MC equation holds exactly
# when the deformed table is associative modulo hbar^2.

# %%
agree = 0
mc_count = 0
for _ in range(50):
    lam = random_first_order_deformation(rng, h, 1)
    is_mc = mc_defect(lam).is_zero()
    table = deformation_bridge(lam, "from_mc", h)
    agree += is_mc == table.is_associative()
    mc_count += is_mc
print(f"{agree}/50 agree, {mc_count} of them Maurer-Cartan")
