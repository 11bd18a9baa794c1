# %% [markdown]
# # How far do edge effects reach?
#
# Cells are grouped by NN-depth, the number of adjacency steps to a cell
# touching the square's boundary (boundary cells are depth 1).  R* of each
# depth class is compared across selection functions with a two-way ANOVA.

# %%
from vorproc.harness import edge_study

for sels in (["alpha=-1", "alpha=0", "alpha=0.5"], ["vanilla", "anti-few", "anti-many"]):
    st = edge_study(sels, replicates=4, seed=1)
    print(", ".join(sels))
    for k, c in enumerate(st.depth_classes):
        label = f"depth {c}" if c < st.depth_classes[-1] else f"depth >={c}"
        means = st.responses[k].mean(axis=1)
        print(f"  {label:9s} " + " ".join(f"{m:.4f}" for m in means))
    print("  ANOVA p:", {k: f"{v:.2g}" for k, v in st.table.p.items()})
    print("  class vs deeper, p:", {k: f"{v:.2g}" for k, v in st.contrast_p.items()})
