"""Voronoi tessellations of the circle, unit square and flat torus."""
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import _circle, _planar
from .domain import Domain, as_domain

MIN_SEPARATION = _planar.MIN_SEPARATION
MAX_VERTICES = 256
MAX_NEIGHBOURS = 256


class GeometryError(ValueError):
    """Raised for inputs the tessellation engine cannot accept."""


class DegenerateConfigurationError(GeometryError):
    def __init__(self, message, labels=()):
        super().__init__(message)
        self.labels = tuple(int(x) for x in labels)


class ProximityError(GeometryError):
    """A placement fell within MIN_SEPARATION of an existing point; redraw it."""


class UnsupportedDomainError(GeometryError):
    pass


@dataclass
class Configuration:
    points: np.ndarray
    labels: np.ndarray = None

    def __post_init__(self):
        self.points = np.array(self.points, dtype=float)
        if self.labels is None:
            self.labels = np.arange(len(self.points), dtype=np.int64)
        else:
            self.labels = np.array(self.labels, dtype=np.int64)
        if len(self.labels) != len(self.points):
            raise ValueError("points and labels differ in length")

    def __len__(self):
        return len(self.points)


@dataclass
class Cell:
    generator_id: int
    area: float
    neighbor_ids: frozenset
    touches_boundary: bool
    polygon: np.ndarray = field(repr=False)


def _check_distinct(points, labels, domain):
    if domain.dim == 1:
        order = np.argsort(points, kind="stable")
        xs = points[order]
        if len(xs) > 1:
            gaps = np.diff(np.append(xs, xs[0] + 1.0))
            k = int(np.argmin(gaps))
            if gaps[k] < MIN_SEPARATION:
                bad = (labels[order[k]], labels[order[(k + 1) % len(xs)]])
                raise DegenerateConfigurationError(
                    f"points {bad[0]} and {bad[1]} closer than {MIN_SEPARATION}", bad)
        return
    box = 1.0 if domain.kind == "torus" else None
    pairs = cKDTree(points, boxsize=box).query_pairs(MIN_SEPARATION)
    if pairs:
        a, b = min(pairs)
        raise DegenerateConfigurationError(
            f"points {labels[a]} and {labels[b]} closer than {MIN_SEPARATION}",
            (labels[a], labels[b]))


def _check_general_position(points, labels):
    base = points[0]
    d = points - base
    far = int(np.argmax(np.einsum("ij,ij->i", d, d)))
    u = d[far]
    cross = np.abs(u[0] * d[:, 1] - u[1] * d[:, 0])
    if cross.max() <= 1e-12 * max(np.dot(u, u), 1e-300):
        raise DegenerateConfigurationError(
            "all points are collinear", labels)


def _wrap(points, domain):
    if domain.kind == "torus":
        points = np.mod(points, 1.0)
        points[points >= 1.0] = 0.0
    elif domain.kind == "circle":
        points = np.mod(points, 1.0)
        points[points >= 1.0] = 0.0
    return points


class Tessellation:
    """Common surface of circle and planar tessellations.

    Cells are addressed by slot index 0..N-1; `labels[slot]` is the stable id
    of the generator currently occupying the slot.
    """

    domain: Domain
    points: np.ndarray
    labels: np.ndarray
    areas: np.ndarray
    version: int

    def __len__(self):
        return len(self.points)

    @property
    def n(self):
        return len(self.points)

    def cells(self):
        return [self.cell(i) for i in range(self.n)]

    def adjacency(self):
        """Set of neighbour pairs (i, j), i < j, by slot index."""
        out = set()
        for i in range(self.n):
            for j in self.neighbors(i):
                j = int(j)
                if i < j:
                    out.add((i, j))
                elif j < i:
                    out.add((j, i))
        return out

    def replace_point(self, remove_id, new_point):
        raise NotImplementedError

    def copy(self):
        raise NotImplementedError


class CircleTessellation(Tessellation):
    def __init__(self, points, labels, domain):
        self.domain = domain
        self.points = np.array(points, dtype=float)
        self.labels = np.array(labels, dtype=np.int64)
        n = len(self.points)
        self.order = np.argsort(self.points, kind="stable").astype(np.int64)
        self.rank = np.empty(n, dtype=np.int64)
        self.rank[self.order] = np.arange(n)
        self.areas = np.empty(n)
        _circle.all_widths(self.points, self.order, self.areas)
        self.version = 0
        self._changed = np.empty(8, dtype=np.int64)

    def neighbors(self, i):
        n = self.n
        if n == 1:
            return np.empty(0, dtype=np.int64)
        r = self.rank[i]
        nb = {int(self.order[(r - 1) % n]), int(self.order[(r + 1) % n])}
        return np.array(sorted(nb), dtype=np.int64)

    def degrees(self):
        return np.array([len(self.neighbors(i)) for i in range(self.n)])

    def touches_boundary(self, i):
        return False

    def cell(self, i):
        n = self.n
        r = self.rank[i]
        x = self.points[i]
        if n == 1:
            lo = x - 0.5
        else:
            left = self.points[self.order[(r - 1) % n]]
            lo = x - 0.5 * ((x - left) % 1.0)
        poly = np.array([lo, lo + self.areas[i]])
        return Cell(int(i), float(self.areas[i]), frozenset(int(j) for j in self.neighbors(i)),
                    False, poly)

    def replace_point(self, remove_id, new_point):
        q = float(np.mod(new_point, 1.0))
        if q >= 1.0:
            q = 0.0
        others = np.delete(self.points, remove_id)
        if len(others):
            d = np.abs(others - q)
            if np.min(np.minimum(d, 1.0 - d)) < MIN_SEPARATION:
                raise ProximityError("placement too close to an existing point")
        nc = _circle.replace(int(remove_id), q, self.points, self.order, self.rank,
                             self.areas, self._changed)
        self.version += 1
        return set(int(j) for j in self._changed[:nc])

    def copy(self):
        new = object.__new__(CircleTessellation)
        new.domain = self.domain
        new.points = self.points.copy()
        new.labels = self.labels.copy()
        new.order = self.order.copy()
        new.rank = self.rank.copy()
        new.areas = self.areas.copy()
        new.version = self.version
        new._changed = np.empty(8, dtype=np.int64)
        return new


class PlanarTessellation(Tessellation):
    def __init__(self, points, labels, domain):
        self.domain = domain
        self.kind = _planar.SQUARE if domain.kind == "square" else _planar.TORUS
        self.points = np.ascontiguousarray(points, dtype=float)
        self.labels = np.array(labels, dtype=np.int64)
        n = len(self.points)
        self.active = np.ones(n, dtype=np.bool_)
        self.g = _planar.grid_size(n)
        self.head = np.empty(self.g * self.g, dtype=np.int64)
        self.nxt = np.empty(n, dtype=np.int64)
        self.bucket = np.empty(n, dtype=np.int64)
        self.polys = np.zeros((n, MAX_VERTICES, 2))
        self.polylab = np.zeros((n, MAX_VERTICES), dtype=np.int64)
        self.nverts = np.zeros(n, dtype=np.int64)
        self.areas = np.zeros(n)
        self.nbrs = np.full((n, MAX_NEIGHBOURS), -1, dtype=np.int64)
        self.nnbrs = np.zeros(n, dtype=np.int64)
        self.touches = np.zeros(n, dtype=np.bool_)
        self._alloc_scratch()
        self.version = 0
        self.rebuild()

    def _alloc_scratch(self):
        cap = MAX_VERTICES + 8
        self.scratch = (np.empty(cap), np.empty(cap), np.empty(cap, dtype=np.int64),
                        np.empty(cap), np.empty(cap), np.empty(cap, dtype=np.int64))
        self._changed = np.empty(2 * MAX_NEIGHBOURS + 2, dtype=np.int64)

    @property
    def arrays(self):
        """Kernel argument tuple shared with the dynamics loop."""
        return (self.points, self.active, self.kind, self.g, self.head, self.nxt,
                self.bucket, self.polys, self.polylab, self.nverts, self.areas,
                self.nbrs, self.nnbrs, self.touches) + self.scratch

    def rebuild(self):
        _planar.grid_build(self.points, self.active, self.g, self.head, self.nxt,
                           self.bucket)
        st = _planar.rebuild_all(self.points, self.active, self.kind, self.g, self.head,
                                 self.nxt, self.polys, self.polylab, self.nverts,
                                 self.areas, self.nbrs, self.nnbrs, self.touches,
                                 *self.scratch)
        if st != _planar.OK:
            raise GeometryError("cell storage overflow; raise MAX_VERTICES")

    def neighbors(self, i):
        return self.nbrs[i, : self.nnbrs[i]].copy()

    def degrees(self):
        return self.nnbrs.copy()

    def touches_boundary(self, i):
        return bool(self.touches[i])

    def cell(self, i):
        return Cell(int(i), float(self.areas[i]),
                    frozenset(int(j) for j in self.neighbors(i)),
                    bool(self.touches[i]), self.polys[i, : self.nverts[i]].copy())

    def replace_point(self, remove_id, new_point):
        q = np.asarray(new_point, dtype=float).reshape(2)
        if self.domain.kind == "torus":
            q = _wrap(q.copy(), self.domain)
        elif np.any(q < 0.0) or np.any(q > 1.0):
            raise GeometryError(f"point {q} outside the unit square")
        d2 = _planar.nearest_sq_dist(q[0], q[1], self.points, self.active, int(remove_id),
                                     self.kind, self.g, self.head, self.nxt)
        if d2 < MIN_SEPARATION ** 2:
            raise ProximityError("placement too close to an existing point")
        (pts, active, kind, g, head, nxt, bucket, polys, polylab, nverts, areas, nbrs,
         nnbrs, touches, *scratch) = self.arrays
        nc, st = _planar.replace(int(remove_id), q[0], q[1], pts, active, kind, g, head,
                                 nxt, bucket, polys, polylab, nverts, areas, nbrs, nnbrs,
                                 touches, *scratch, self._changed)
        if st != _planar.OK:
            raise GeometryError("cell storage overflow; raise MAX_VERTICES")
        self.version += 1
        return set(int(j) for j in self._changed[:nc])

    def copy(self):
        new = object.__new__(PlanarTessellation)
        for k, v in self.__dict__.items():
            setattr(new, k, v.copy() if isinstance(v, np.ndarray) else v)
        new._alloc_scratch()
        return new


def build_tessellation(config, domain):
    """Voronoi tessellation of `config` (a Configuration or point array)."""
    domain = as_domain(domain)
    if not isinstance(config, Configuration):
        config = Configuration(config)
    points = _wrap(np.array(config.points, dtype=float), domain)
    labels = config.labels
    n = len(points)
    if domain.dim == 1:
        points = points.reshape(-1)
        if n < 1:
            raise GeometryError("need at least one point on the circle")
        _check_distinct(points, labels, domain)
        return CircleTessellation(points, labels, domain)
    points = points.reshape(-1, 2)
    if n < 3:
        raise DegenerateConfigurationError("need at least three points in 2-D", labels)
    if domain.kind == "square" and (np.any(points < 0.0) or np.any(points > 1.0)):
        raise GeometryError("points must lie in the unit square")
    _check_distinct(points, labels, domain)
    _check_general_position(points, labels)
    return PlanarTessellation(points, labels, domain)


def replace_point(tess, remove_id, new_point):
    """Copy-on-write replacement; returns (new tessellation, changed slot ids)."""
    new = tess.copy()
    changed = new.replace_point(remove_id, new_point)
    return new, changed


def circle_cells(positions):
    """Cell widths of sorted circle positions: half the sum of the two
    adjacent spacings."""
    x = np.asarray(positions, dtype=float)
    n = len(x)
    if n == 0:
        raise GeometryError("need at least one position")
    if n == 1:
        return np.ones(1)
    gaps = np.diff(np.append(x, x[0] + 1.0))
    if np.any(gaps < MIN_SEPARATION):
        raise DegenerateConfigurationError("duplicate positions on the circle")
    return 0.5 * (gaps + np.roll(gaps, 1))


def nn_depth(tess, i=None):
    """Adjacency-path depth to the boundary (boundary cells have depth 1).

    Returns the depth of slot i, or the full depth array when i is None.
    """
    if not tess.domain.has_boundary:
        raise UnsupportedDomainError(f"nn_depth needs a boundary; got {tess.domain.kind}")
    depth = getattr(tess, "_depth_cache", None)
    if depth is None or depth[0] != tess.version:
        depth = (tess.version, _bfs_depth(tess))
        tess._depth_cache = depth
    d = depth[1]
    return d.copy() if i is None else int(d[i])


def _bfs_depth(tess):
    n = tess.n
    depth = np.zeros(n, dtype=np.int64)
    frontier = [i for i in range(n) if tess.touches_boundary(i)]
    for i in frontier:
        depth[i] = 1
    d = 1
    while frontier:
        d += 1
        nxt = []
        for i in frontier:
            for j in tess.neighbors(i):
                if depth[j] == 0:
                    depth[j] = d
                    nxt.append(j)
        frontier = nxt
    if np.any(depth == 0):
        raise GeometryError("adjacency graph is disconnected")
    return depth
