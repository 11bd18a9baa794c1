"""Empty-space, nearest-neighbour and J-function estimates."""
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..geometry import as_domain, build_tessellation
from .redundancy import depth_filter

J_CAP = 0.85
GRID = 128


def _tree(points, domain):
    return cKDTree(points, boxsize=1.0 if domain.kind == "torus" else None)


def _check_grid(r_grid, domain):
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or np.any(np.diff(r) <= 0):
        raise ValueError("r_grid must be strictly increasing")
    if r[0] < 0 or r[-1] > domain.diameter:
        raise ValueError(f"r_grid must lie in [0, {domain.diameter:.4g}]")
    return r


def _border(xy):
    return np.minimum(np.minimum(xy[:, 0], 1 - xy[:, 0]), np.minimum(xy[:, 1], 1 - xy[:, 1]))


def _minus_sampled_cdf(dist, border, r, erode):
    out = np.empty(len(r))
    for k, rk in enumerate(r):
        keep = border >= rk if erode else slice(None)
        d = dist[keep]
        if d.size == 0:
            # erosion emptied the window: fall back to the whole domain
            d = dist
        out[k] = np.count_nonzero(d <= rk) / d.size
    return out


def reference_grid(grid=GRID):
    c = (np.arange(grid) + 0.5) / grid
    xx, yy = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def empty_space_F(points, r_grid, domain="square", grid=GRID):
    """Fraction of grid reference locations within r of a point.

    The square uses minus-sampling (locations closer than r to the boundary
    are dropped); the torus needs no correction.
    """
    domain = as_domain(domain)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 1:
        raise ValueError("need at least one point")
    r = _check_grid(r_grid, domain)
    ref = reference_grid(grid)
    dist, _ = _tree(pts, domain).query(ref)
    return _minus_sampled_cdf(dist, _border(ref), r, domain.kind == "square")


def nn_distances(points, domain="square"):
    domain = as_domain(domain)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    d, _ = _tree(pts, domain).query(pts, k=2)
    return d[:, 1]


def nn_distance_G(points, r_grid, domain="square", included_ids=None, tess=None, m=3):
    """Fraction of included points whose nearest other point is within r.

    On the square the default inclusion set is the NN-depth >= m window and
    minus-sampling is applied on top of it.
    """
    domain = as_domain(domain)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    r = _check_grid(r_grid, domain)
    if included_ids is None:
        included_ids = np.arange(len(pts))
        if domain.kind == "square" and len(pts) >= 3:
            tess = tess if tess is not None else build_tessellation(pts, domain)
            ids = depth_filter(tess, m)
            if ids.size:
                included_ids = ids
    ids = np.asarray(included_ids)
    dist = nn_distances(pts, domain)[ids]
    return _minus_sampled_cdf(dist, _border(pts[ids]), r, domain.kind == "square")


def j_estimate(F, G, cap=J_CAP):
    """(1 - G) / (1 - F), masked to F <= cap."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    mask = (F <= cap) & (F < 1.0)
    J = np.full(F.shape, np.nan)
    J[mask] = (1.0 - G[mask]) / (1.0 - F[mask])
    return J, mask


@dataclass
class CurveData:
    r: np.ndarray
    F: np.ndarray
    G: np.ndarray
    J: np.ndarray
    mask: np.ndarray
    sd_J: np.ndarray = None
    sd_F: np.ndarray = None
    sd_G: np.ndarray = None
    n_draws: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def lnJ(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(self.J)
        out[~self.mask] = np.nan
        return out

    @property
    def sd_lnJ(self):
        # delta method
        if self.sd_J is None:
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.sd_J / self.J
        out[~self.mask] = np.nan
        return out

    def rows(self):
        sd = self.sd_J if self.sd_J is not None else np.zeros_like(self.r)
        for k in range(len(self.r)):
            yield (self.r[k], self.F[k], self.G[k], self.J[k], self.lnJ[k], sd[k],
                   self.n_draws)

    def to_csv(self, path, header_meta=None):
        with open(path, "w", newline="") as fh:
            for k, v in (header_meta or {}).items():
                fh.write(f"# {k}: {v}\n")
            w = csv.writer(fh)
            w.writerow(["r", "F", "G", "J", "lnJ", "sd", "n_draws"])
            for row in self.rows():
                w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                            for x in row])

    def to_dict(self):
        def clean(a):
            return None if a is None else [None if not np.isfinite(v) else float(v) for v in a]
        return {"r": clean(self.r), "F": clean(self.F), "G": clean(self.G),
                "J": clean(self.J), "lnJ": clean(self.lnJ), "sd_J": clean(self.sd_J),
                "mask": [bool(m) for m in self.mask], "n_draws": self.n_draws,
                "meta": self.meta}


def default_r_grid(points, domain="square", n=64, grid=GRID):
    """n radii from 0 to the smallest r at which a pilot F-hat reaches 0.85."""
    domain = as_domain(domain)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ref = reference_grid(grid)
    dist, _ = _tree(pts, domain).query(ref)
    rmax = float(np.quantile(dist, J_CAP))
    return np.linspace(0.0, min(rmax, domain.diameter), n)


def j_curve(points, r_grid, domain="square", tess=None, m=3, grid=GRID):
    """F-hat, G-hat and J-hat of a single pattern."""
    F = empty_space_F(points, r_grid, domain, grid)
    G = nn_distance_G(points, r_grid, domain, tess=tess, m=m)
    J, mask = j_estimate(F, G)
    return CurveData(np.asarray(r_grid, dtype=float), F, G, J, mask)


def average_curves(curves):
    """Pointwise means with sample standard deviations over independent draws.

    J is averaged directly (not recomputed from the mean F and G); the mask is
    the intersection of the input masks.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("no curves to average")
    r = curves[0].r
    for c in curves[1:]:
        if c.r.shape != r.shape or np.any(c.r != r):
            raise ValueError("curves are on different r grids")
    mask = np.logical_and.reduce([c.mask for c in curves])
    F = np.array([c.F for c in curves])
    G = np.array([c.G for c in curves])
    J = np.array([np.where(c.mask, c.J, np.nan) for c in curves])
    k = len(curves)
    Jm = np.full(r.shape, np.nan)
    sdJ = np.full(r.shape, np.nan)
    Jm[mask], sdJ[mask] = _mean_sd(J[:, mask])
    Fm, sdF = _mean_sd(F)
    Gm, sdG = _mean_sd(G)
    return CurveData(r.copy(), Fm, Gm, Jm, mask, sd_J=sdJ, sd_F=sdF, sd_G=sdG, n_draws=k)


def _mean_sd(x):
    # columns where every draw agrees are returned exactly (no rounding drift)
    same = np.all(x == x[:1], axis=0)
    mean = np.where(same, x[0], x.mean(axis=0))
    sd = np.where(same, 0.0, x.std(axis=0, ddof=1 if len(x) > 1 else 0))
    return mean, sd
