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
# # Simulation study
#
# Six preset scenarios combine a Beta(2, 2) or Gamma(2, 2) signal with
# two-point, zeta(5) or uniform mixing. Each run draws a seeded sample,
# estimates F on a 100-point grid and records the grid MSE. Run seeds are a
# hash of (seed, scenario, n, run), so tables do not depend on worker count.

# %%
from dataclasses import replace

import numpy as np

from mellinmix import load_scenario, oracle_tune, risk_profile, run_experiment
from mellinmix.harness import list_scenarios

print(list_scenarios())

# %% [markdown]
# A short version of the MSE table (10 runs instead of 100):

# %%
for name in list_scenarios():
    table = run_experiment(replace(load_scenario(name), runs=10, n_values=(100, 1000)))
    for r in table.rows:
        print(f"{name:16s} n={r.n:5d} {r.method:8s} {r.avg_mse:.3g}")

# %% [markdown]
# ## Risk as the line `Re z = u` approaches the excluded value
#
# For two-point mixing `M[G]` has zeros on `u = 0`; the risk at `x = 1/2`
# spikes as `u` approaches it.

# %%
cfg = load_scenario("two_point_beta")
values = [-0.3, -1e-5, 1e-5, 0.3]
prof = risk_profile(cfg, "u_star", values, runs=25, n=1000)
for u in values:
    print(u, np.median(prof.risks(u)))

# %% [markdown]
# ## Oracle tuning
#
# With the truth known, the truncation level can be picked by minimising the
# true MSE; for uniform mixing the optimum is near T = 30.

# %%
best, scores = oracle_tune(load_scenario("uniform_beta"), "mellin", "T", [15, 20, 30, 40, 60], tuning_runs=20)
print(best, scores)
