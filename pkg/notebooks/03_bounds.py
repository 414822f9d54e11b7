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
# # Error bounds
#
# A Berry-Esseen type inequality bounds the weighted sup distance
# `rho_u = sup_x |x^(u-1) (phi(x) - psi(x))|` between two c.d.f.s by an
# integral of their transform difference plus a smoothness remainder. The
# constant `c(b)` solves `int_{|r|<=c} sin^2 r / (pi r^2) dr = (2/3)(1 + 1/(pi b))`.

# %%
from mellinmix import (
    Beta, BerryEsseenInputs, EstimatorConfig, Exponential, MixtureModel, berry_esseen_terms,
    min_T, rho_sup, sample_mixture, solve_cb, thm1_terms, thm2_terms, two_point,
)

# %%
print("c(0.8) =", solve_cb(0.8), " minimal T at u = 1/2:", min_T(0.8, 0.5))

# %% [markdown]
# ## Two exponential laws
#
# For Exp(1) against Exp(1.5) at `u = 1/2` the supremum sits near `x = 0.4`.
# Their transforms differ at `v = 0`, so the first term is evaluated with
# the denominator `|u - 1 + iv|`; the `1/|v|` form diverges logarithmically.

# %%
print(rho_sup(Exponential(1.0), Exponential(1.5), 0.5))
for T in (100.0, 200.0, 400.0):
    rep = berry_esseen_terms(BerryEsseenInputs(Exponential(1.0), Exponential(1.5), 0.5, 0.8, T))
    print(T, rep.terms, rep.inputs["denominator"], rep.extra["bound_holds"])

# %% [markdown]
# ## Almost-sure and mean-square risk bounds for the estimator
#
# `thm1_terms` evaluates the three-term bound for one sample and the realised
# risk at a point; `thm2_terms` gives the mean-square counterpart, whose last
# term scales like `1/n`.

# %%
g = two_point(1.0, 2.0, 1 / 3)
model = MixtureModel(Beta(2, 2), g)
cfg = EstimatorConfig(0.5, 500.0)
rep = thm1_terms(model, sample_mixture(model, 500, seed=1), cfg, b=0.8, x=0.5)
print(rep.to_json())
for n in (500, 5000):
    print(n, thm2_terms(model, cfg, b=0.8, x=0.5, n=n).terms)
