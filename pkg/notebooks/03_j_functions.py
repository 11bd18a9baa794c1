# %% [markdown]
# # J-function fans
#
# J(r) = (1 - G(r)) / (1 - F(r)): below 1 for clustered patterns, above 1
# for regular ones.  Estimates are kept where F <= 0.85 and averaged over
# draws, then ln J is smoothed with a weighted cubic.

# %%
import numpy as np

from vorproc.harness import ExperimentPlan, run

R = tuple(np.linspace(0, 0.03, 31))

# %%
fits = {}
for alpha in (-3.0, -1.0, 0.0, 0.5):
    plan = ExperimentPlan(process="v", alpha=alpha, n_points=2000, steps_per_point=12,
                          replicates=5, seed=3, stats=("rstar", "j"), r_grid=R)
    rec = run(plan)
    fits[alpha] = rec.lnj_fit
    c = rec.curve
    print(f"alpha={alpha:+.1f} R*={rec.rstar_mean:.3f} "
          f"lnJ at r=0.005,0.01: {c.lnJ[5]:+.3f} {c.lnJ[10]:+.3f}")

# %% the smoothed curves form a fan ordered by alpha
for r in (0.005, 0.01, 0.015):
    print(f"r={r:.3f}  " + "  ".join(f"{a:+.1f}:{fits[a](r):+.4f}" for a in fits))
