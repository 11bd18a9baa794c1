# %% [markdown]
# # Area-interaction process against the Voronoi v-process
#
# The area-interaction process weighs a pattern by beta^n gamma^(-area of
# the union of radius-0.01 disks).  With gamma1 = 1.5 (gamma = 1.5^10000)
# it clusters.  beta is tuned so the mean count is 2000, then R* and the
# J-curve are compared with the alpha = 0.5 v-process.

# %%
import numpy as np

from vorproc.aipp import AippParams, sample, tune_beta
from vorproc.geometry import build_tessellation
from vorproc.harness import ExperimentPlan, run
from vorproc.stats import j_curve, redundancy_of

R = np.linspace(0, 0.03, 31)

# %% tune beta
params = AippParams(gamma1=1.5, target_count=2000)
beta, trace = tune_beta(params, 0.02, seed=1)
print(f"beta = {beta:.1f} after {len(trace)} rounds; last mean count {trace[-1][1]:.0f}")

# %% a few draws (the chain burns in for 2e6 proposals each)
for seed in range(3):
    pts, diag = sample(params.with_beta(beta), seed=seed)
    t = build_tessellation(pts, "square")
    c = j_curve(pts, R, "square", tess=t)
    print(f"draw {seed}: n={len(pts)} R*={redundancy_of(t):.3f} "
          f"acceptance={diag.acceptance_rate:.2f} lnJ(0.01)={c.lnJ[10]:+.3f}")

# %% the v-process with the same R*
rec = run(ExperimentPlan(process="v", alpha=0.5, n_points=2000, replicates=3, seed=2,
                         stats=("rstar", "j"), r_grid=tuple(R)))
print(f"v-process alpha=0.5: R*={rec.rstar_mean:.3f} lnJ(0.01)={rec.curve.lnJ[10]:+.3f}")

# %% [markdown]
# Both give R* near 0.2, while their J-curves separate clearly.
