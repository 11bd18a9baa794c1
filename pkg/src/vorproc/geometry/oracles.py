"""Brute-force reference constructions used to check the tessellation engine."""
import itertools

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import Polygon, box


def _halfplane(p, q, big=4.0):
    # polygon approximating {z : |z - p| <= |z - q|}, large enough to cover M
    m = 0.5 * (p + q)
    d = q - p
    d = d / np.hypot(*d)
    t = np.array([-d[1], d[0]])
    return Polygon([m + big * t, m + big * t - big * d, m - big * t - big * d, m - big * t])


def halfplane_cells(points, kind="square"):
    """Cells as the intersection of all N-1 bisector half-planes (x 9 images on
    the torus), clipped to the domain.  O(N^2) shapely operations."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    shifts = [np.zeros(2)] if kind == "square" else [
        np.array(s, dtype=float) for s in itertools.product((-1, 0, 1), repeat=2)]
    cells = []
    for i in range(n):
        p = pts[i]
        cell = box(0, 0, 1, 1) if kind == "square" else box(p[0] - 0.5, p[1] - 0.5,
                                                              p[0] + 0.5, p[1] + 0.5)
        for j in range(n):
            for s in shifts:
                if j == i and not s.any():
                    continue
                cell = cell.intersection(_halfplane(p, pts[j] + s))
        cells.append(cell)
    return cells


def halfplane_adjacency(points, kind="square", min_length=1e-9, width=1e-11):
    """Neighbour pairs whose oracle cells share a boundary of positive length.

    Shared edges are detected as the part of cell i's boundary lying within
    `width` of the (i, j) bisector, which sidesteps the float gaps between
    independently clipped shapely polygons.
    """
    pts = np.asarray(points, dtype=float)
    cells = halfplane_cells(pts, kind)
    shifts = [np.zeros(2)] if kind == "square" else [
        np.array(s, dtype=float) for s in itertools.product((-1, 0, 1), repeat=2)]
    pairs = set()
    for i, j in itertools.combinations(range(len(pts)), 2):
        ring = cells[i].exterior
        for s in shifts:
            q = pts[j] + s
            m = 0.5 * (pts[i] + q)
            d = (q - pts[i]) / np.hypot(*(q - pts[i]))
            t = np.array([-d[1], d[0]])
            strip = Polygon([m + 4 * t + width * d, m + 4 * t - width * d,
                             m - 4 * t - width * d, m - 4 * t + width * d])
            if ring.intersection(strip).length > min_length:
                pairs.add((i, j))
                break
    return pairs, np.array([c.area for c in cells])


def monte_carlo_areas(points, kind="square", samples=10**6, seed=0):
    """Cell areas by assigning uniform sample points to their nearest generator."""
    pts = np.asarray(points, dtype=float)
    rng = np.random.default_rng(seed)
    z = rng.random((samples, 2))
    tree = cKDTree(pts, boxsize=1.0 if kind == "torus" else None)
    _, idx = tree.query(z)
    return np.bincount(idx, minlength=len(pts)) / samples
