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
# # Mellin transforms and where division is safe
#
# For a positive random variable X with c.d.f. F, the Mellin-Stieltjes
# transform is `M[F](z) = E[X^(z-1)]`. If `X = Y * eta` with Y and eta
# independent, the transform factorises: `M[F_X] = M[F_Y] * M[G]`. The
# estimator divides by `M[G]`, so we first need to know on which vertical
# lines `Re z = u` the mixing transform stays away from zero.

# %%
import numpy as np

from mellinmix import (
    Beta, Exponential, MixtureModel, UniformUnit, Zeta, hg_region, mellin_analytic,
    mellin_empirical, positive_poisson_threshold, sample_mixture, two_point,
)

# %% [markdown]
# ## Closed forms
#
# A few reference values: the uniform law at z = 1/2 gives 2, Exp(1) gives
# Gamma(1/2) = sqrt(pi), and every law gives 1 at z = 1.

# %%
print(mellin_analytic(UniformUnit(), 0.5), mellin_analytic(Exponential(1.0), 0.5), np.sqrt(np.pi))
print([mellin_analytic(d, 1.0) for d in (Beta(2, 2), Zeta(5.0), two_point(1, 2, 1 / 3))])

# %% [markdown]
# ## The product law, empirically
#
# The empirical transform of a simulated mixture approaches the product of
# the two analytic transforms at the usual root-n rate.

# %%
g = two_point(1.0, 2.0, 1 / 3)
model = MixtureModel(Beta(2, 2), g)
z = 0.5 + 2j
exact = mellin_analytic(Beta(2, 2), z) * mellin_analytic(g, z)
for n in (100, 1_000, 10_000, 100_000):
    print(n, abs(mellin_empirical(sample_mixture(model, n, seed=1), z) - exact))

# %% [markdown]
# ## Admissible lines for common mixing laws
#
# * Two atoms: `M[G](u + iv)` vanishes only on one line, here `u = 0`.
# * Zeta(5): safe for every `u < 5`; the leading-atom domination argument
#   alone only certifies `u < 1 - log2(zeta(5))`.
# * Uniform on (0, 1): `M[G](z) = 1/z` never vanishes but decays like `1/|v|`.

# %%
for law in (two_point(1.0, 2.0, 1 / 3), Zeta(5.0), UniformUnit()):
    print(law.canonical(), "->", hg_region(law).describe())

# %% [markdown]
# For positive-Poisson mixing the domination bound stops covering `u = 0`
# once `lambda` exceeds the root of `exp(lambda) = 3 lambda + 1`:

# %%
print(positive_poisson_threshold())
