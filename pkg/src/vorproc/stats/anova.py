"""Balanced two-way fixed-effects ANOVA."""
import csv
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass
class AnovaTable:
    factors: tuple
    levels: tuple
    ss: dict
    df: dict
    ms: dict
    F: dict
    p: dict

    def significant(self, alpha=0.05):
        return {k: self.p[k] < alpha for k in self.p}

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["source", "SS", "df", "MS", "F", "p"])
            for k in ("A", "B", "AB", "error", "total"):
                w.writerow([k, repr(self.ss[k]), self.df[k], self.ms.get(k, ""),
                            self.F.get(k, ""), self.p.get(k, "")])


def _as_cube(data):
    if isinstance(data, dict):
        a_levels = sorted({k[0] for k in data}, key=str)
        b_levels = sorted({k[1] for k in data}, key=str)
        reps = {len(data.get((a, b), ())) for a in a_levels for b in b_levels}
        if len(reps) != 1 or 0 in reps:
            raise ValueError("unbalanced design: every cell needs the same replicate count")
        cube = np.array([[np.asarray(data[(a, b)], dtype=float) for b in b_levels]
                         for a in a_levels])
        return cube, (tuple(a_levels), tuple(b_levels))
    cube = np.asarray(data, dtype=float)
    if cube.ndim != 3:
        raise ValueError("expected an (A, B, replicate) array")
    return cube, (tuple(range(cube.shape[0])), tuple(range(cube.shape[1])))


def edge_effect_anova(data, factors=("depth", "selection")):
    """Two-way ANOVA with interaction on a balanced (A, B, replicate) design."""
    y, levels = _as_cube(data)
    a, b, n = y.shape
    if n < 2:
        raise ValueError("need at least two replicates per cell")
    if a < 2 or b < 2:
        raise ValueError("need at least two levels per factor")
    # the table is shift-invariant; centring on one value makes constant data exact
    y = y - y.flat[0]
    grand = y.mean()
    ma = y.mean(axis=(1, 2))
    mb = y.mean(axis=(0, 2))
    mab = y.mean(axis=2)
    ss = {
        "A": b * n * float(np.sum((ma - grand) ** 2)),
        "B": a * n * float(np.sum((mb - grand) ** 2)),
        "AB": n * float(np.sum((mab - ma[:, None] - mb[None, :] + grand) ** 2)),
        "error": float(np.sum((y - mab[:, :, None]) ** 2)),
        "total": float(np.sum((y - grand) ** 2)),
    }
    df = {"A": a - 1, "B": b - 1, "AB": (a - 1) * (b - 1), "error": a * b * (n - 1),
          "total": a * b * n - 1}
    ms = {k: ss[k] / df[k] for k in ("A", "B", "AB", "error")}
    F, p = {}, {}
    for k in ("A", "B", "AB"):
        if ms["error"] > 0:
            F[k] = ms[k] / ms["error"]
            p[k] = float(stats.f.sf(F[k], df[k], df["error"]))
        elif ms[k] > 0:
            F[k], p[k] = np.inf, 0.0
        else:
            F[k], p[k] = 0.0, 1.0
    return AnovaTable(tuple(factors), levels, ss, df, ms, F, p)
