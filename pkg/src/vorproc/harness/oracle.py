"""Named brute-force cross-checks of the engines."""
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from ..aipp import coverage_area
from ..dynamics import SelectionSpec, cull_distribution, evolve, init_uniform, sample_culls
from ..geometry import build_tessellation
from ..geometry.oracles import halfplane_adjacency, monte_carlo_areas
from ..stats import edge_effect_anova


@dataclass
class OracleReport:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""
    instance: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps({"name": self.name, "passed": self.passed, "worst": self.worst,
                           "tolerance": self.tolerance, "detail": self.detail,
                           "instance": self.instance})


def _cell_areas(n, seed, kind="square", trials=3):
    worst, inst = 0.0, {}
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        pts = rng.random((n, 2))
        t = build_tessellation(pts, kind)
        mc = monte_carlo_areas(pts, kind, seed=int(rng.integers(2**31)))
        err = float(np.max(np.abs(mc - t.areas)))
        if err >= worst:
            worst, inst = err, {"points": pts.tolist(), "kind": kind}
    return OracleReport("cell-areas", worst <= 2e-3, worst, 2e-3,
                        "Monte-Carlo (1e6 samples) vs engine areas", inst)


def _adjacency(n, seed, kind="square", trials=3):
    rng = np.random.default_rng(seed)
    bad = 0
    inst = {}
    for _ in range(trials):
        pts = rng.random((n, 2))
        t = build_tessellation(pts, kind)
        pairs, areas = halfplane_adjacency(pts, kind)
        diff = pairs ^ t.adjacency()
        if diff or np.max(np.abs(areas - t.areas)) > 1e-9:
            bad += 1
            inst = {"points": pts.tolist(), "kind": kind,
                    "mismatched_pairs": sorted(list(p) for p in diff)}
    return OracleReport("adjacency", bad == 0, float(bad), 0.0,
                        "half-plane intersection vs engine", inst)


def _incremental(n, seed, kind="torus", replacements=2000):
    rng = np.random.default_rng(seed)
    t = build_tessellation(rng.random((n, 2)), kind)
    worst = 0.0
    for k in range(replacements):
        t.replace_point(int(rng.integers(n)), rng.random(2))
        if k % 97 == 0 or k == replacements - 1:
            ref = build_tessellation(t.points, kind)
            if ref.adjacency() != t.adjacency():
                return OracleReport("incremental", False, math.inf, 1e-9,
                                    f"adjacency differs after {k + 1} replacements",
                                    {"points": t.points.tolist(), "kind": kind})
            worst = max(worst, float(np.max(np.abs(ref.areas - t.areas))))
    return OracleReport("incremental", worst <= 1e-9, worst, 1e-9,
                        "replace_point vs full rebuild")


def _weights(n, seed):
    worst = 0.0
    for spec in (SelectionSpec.volume(0.7), SelectionSpec.named("anti-6")):
        st = init_uniform(n, "square", seed, spec)
        evolve(st, 20 * n)
        ref = st.recompute_weights()
        worst = max(worst, float(np.max(np.abs(st.weights - ref) / np.abs(ref).max())))
    return OracleReport("weights", worst <= 1e-12, worst, 1e-12,
                        "cached culling weights vs recompute-all (relative)")


def direct_anova_ss(cube):
    """Sums of squares by explicit loops over cells and replicates."""
    a, b, n = cube.shape
    vals = [cube[i, j, k] for i in range(a) for j in range(b) for k in range(n)]
    g = sum(vals) / len(vals)
    ra = [sum(cube[i, j, k] for j in range(b) for k in range(n)) / (b * n) for i in range(a)]
    rb = [sum(cube[i, j, k] for i in range(a) for k in range(n)) / (a * n) for j in range(b)]
    cell = [[sum(cube[i, j, k] for k in range(n)) / n for j in range(b)] for i in range(a)]
    ss = {"A": sum(b * n * (m - g) ** 2 for m in ra),
          "B": sum(a * n * (m - g) ** 2 for m in rb),
          "AB": sum(n * (cell[i][j] - ra[i] - rb[j] + g) ** 2
                    for i in range(a) for j in range(b)),
          "error": sum((cube[i, j, k] - cell[i][j]) ** 2
                       for i in range(a) for j in range(b) for k in range(n)),
          "total": sum((v - g) ** 2 for v in vals)}
    return ss


def _anova(n, seed):
    rng = np.random.default_rng(seed)
    cube = rng.normal(size=(4, 3, max(n, 2))) + np.arange(4)[:, None, None]
    tab = edge_effect_anova(cube)
    ref = direct_anova_ss(cube)
    worst = max(abs(tab.ss[k] - ref[k]) for k in ref)
    return OracleReport("anova", worst <= 1e-9, float(worst), 1e-9,
                        "vectorised vs loop sums of squares")


def lens_area(d, rho):
    """Area of the intersection of two radius-rho disks at distance d."""
    if d >= 2 * rho:
        return 0.0
    return 2 * rho ** 2 * math.acos(d / (2 * rho)) - 0.5 * d * math.sqrt(4 * rho ** 2 - d ** 2)


def _lens(n, seed, rho=0.01):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(max(n, 1)):
        c = 0.2 + 0.6 * rng.random(2)
        d = 2.2 * rho * rng.random()
        th = 2 * math.pi * rng.random()
        pts = np.array([c, c + d * np.array([math.cos(th), math.sin(th)])])
        expect = 2 * math.pi * rho ** 2 - lens_area(d, rho)
        worst = max(worst, abs(coverage_area(pts, rho) - expect))
    tol = 1e-12
    return OracleReport("lens", worst <= tol, worst, tol, "two-disk lens formula")


def _culling(n, seed, draws=10**6):
    st = init_uniform(n, "square", seed, SelectionSpec.volume(1.0))
    p = cull_distribution(st)
    got = np.bincount(sample_culls(st, draws, np.random.default_rng(seed + 1)),
                      minlength=st.n)
    res = sps.chisquare(got, p * draws)
    return OracleReport("culling", res.pvalue > 1e-3, float(res.pvalue), 1e-3,
                        "chi-square of Fenwick culling draws against the cull law")


CHECKS = {
    "cell-areas": _cell_areas,
    "adjacency": _adjacency,
    "incremental": _incremental,
    "weights": _weights,
    "anova": _anova,
    "lens": _lens,
    "culling": _culling,
}

DEFAULT_SIZES = {"cell-areas": 32, "adjacency": 16, "incremental": 64, "weights": 200,
                 "anova": 5, "lens": 50, "culling": 100}


def oracle(name, size=None, seed=0):
    if name not in CHECKS:
        raise KeyError(f"unknown oracle check {name!r}; choose from {sorted(CHECKS)}")
    size = DEFAULT_SIZES[name] if size is None else size
    return CHECKS[name](size, seed)
