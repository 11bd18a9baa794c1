"""Edge-effect study: R* per NN-depth class against selection functions."""
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from ..dynamics import SelectionSpec, evolve, init_uniform
from ..geometry import nn_depth
from ..stats import edge_effect_anova, thiel_redundancy
from .plan import rng_for

DEPTH_CLASSES = (1, 2, 3, 4)  # 4 stands for ">= 4"


@dataclass
class EdgeStudy:
    table: object
    responses: np.ndarray  # (depth class, selection, replicate)
    depth_classes: tuple
    selections: tuple
    contrast_p: dict  # depth class -> p of "class vs deeper cells"

    def summary(self, alpha=0.05):
        sig = self.table.significant(alpha)
        return {
            "depth_significant": sig["A"],
            "selection_significant": sig["B"],
            "interaction_significant": sig["AB"],
            "depth_classes_differing": [c for c, p in self.contrast_p.items() if p < alpha],
            "cell_means": self.responses.mean(axis=2).tolist(),
        }


def depth_class_rstar(tess, classes=DEPTH_CLASSES):
    """R* of the cells in each depth class (the last class is open-ended)."""
    d = nn_depth(tess)
    top = classes[-1]
    out = []
    for c in classes:
        sel = d >= c if c == top else d == c
        a = tess.areas[sel]
        out.append(thiel_redundancy(a) if a.size >= 2 else np.nan)
    return np.array(out)


def _contrasts(cube, classes):
    # paired within (selection, replicate): class k against the mean of the
    # deeper classes, so selection-to-selection spread does not mask depth
    out = {}
    for k, c in enumerate(classes[:-1]):
        d = (cube[k] - cube[k + 1:].mean(axis=0)).ravel()
        if np.all(d == d[0]):
            out[c] = 1.0 if d[0] == 0 else 0.0
        else:
            out[c] = float(sps.ttest_1samp(d, 0.0).pvalue)
    return out


def edge_study(selections, depth_classes=DEPTH_CLASSES, replicates=5, n_points=2000,
               steps_per_point=12, seed=0, responses=None):
    """Run each selection function on the square and ANOVA the per-class R*.

    `responses` short-circuits the simulation with a ready (class, selection,
    replicate) array.
    """
    selections = tuple(s if isinstance(s, SelectionSpec) else _parse(s) for s in selections)
    if len(selections) < 2 or len(depth_classes) < 2:
        raise ValueError("need at least two selection functions and two depth classes")
    if responses is None:
        cube = np.empty((len(depth_classes), len(selections), replicates))
        for j, spec in enumerate(selections):
            for r in range(replicates):
                st = init_uniform(n_points, "square", rng_for(seed + j, r, "init"), spec)
                st.rng = rng_for(seed + j, r, "dynamics")
                evolve(st, int(steps_per_point * n_points))
                cube[:, j, r] = depth_class_rstar(st.tess, depth_classes)
    else:
        cube = np.asarray(responses, dtype=float)
        if cube.shape[:2] != (len(depth_classes), len(selections)):
            raise ValueError("responses shape does not match the design")
    if np.isnan(cube).any():
        raise ValueError("unbalanced design: some depth class had fewer than two cells")
    table = edge_effect_anova(cube, factors=("depth", "selection"))
    return EdgeStudy(table, cube, tuple(depth_classes), tuple(str(s) for s in selections),
                     _contrasts(cube, depth_classes))


def _parse(s):
    s = str(s)
    if s.startswith("alpha="):
        return SelectionSpec.volume(float(s.split("=", 1)[1]))
    try:
        return SelectionSpec.volume(float(s))
    except ValueError:
        return SelectionSpec.named(s)
