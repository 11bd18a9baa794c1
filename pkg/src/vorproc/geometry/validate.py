from dataclasses import dataclass, field

import numpy as np

from ._planar import EDGE_EPS


@dataclass
class ValidationReport:
    area_residual: float
    asymmetric_pairs: list = field(default_factory=list)
    degree_sum: int = 0
    edge_sum: int = 0  # cell edges counted with multiplicity (torus Euler check)
    mean_degree: float = 0.0
    euler_ok: bool = True
    generators_outside: list = field(default_factory=list)
    nonpositive_areas: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.area_residual <= 1e-9 and not self.asymmetric_pairs and self.euler_ok
                and not self.generators_outside and not self.nonpositive_areas
                and self.degree_sum % 2 == 0)


def _inside_convex(poly, p, tol=1e-12):
    a = poly
    b = np.roll(poly, -1, axis=0)
    cross = (b[:, 0] - a[:, 0]) * (p[1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (p[0] - a[:, 0])
    return bool(np.all(cross >= -tol))


def edge_count(tess):
    """Number of positive-length cell edges summed over cells."""
    total = 0
    for i in range(tess.n):
        poly = tess.cell(i).polygon
        e = np.diff(np.vstack([poly, poly[:1]]), axis=0)
        total += int(np.count_nonzero(np.hypot(e[:, 0], e[:, 1]) > EDGE_EPS))
    return total


def validate(tess):
    """Diagnostics only: never raises on a bad tessellation."""
    n = tess.n
    areas = np.asarray(tess.areas)
    rep = ValidationReport(area_residual=float(abs(areas.sum() - tess.domain.total_measure)))
    rep.nonpositive_areas = [int(i) for i in np.flatnonzero(areas <= 0)]
    nb = [set(int(j) for j in tess.neighbors(i)) for i in range(n)]
    for i in range(n):
        for j in nb[i]:
            if i not in nb[j]:
                rep.asymmetric_pairs.append((i, j))
    deg = np.array([len(s) for s in nb])
    rep.degree_sum = int(deg.sum())
    rep.mean_degree = float(deg.mean()) if n else 0.0
    if tess.domain.kind == "torus":
        # a small torus can give two cells several shared edges (through
        # different images), so Euler's relation is checked on edges, not sets
        rep.edge_sum = edge_count(tess)
        rep.euler_ok = rep.edge_sum == 6 * n
    if tess.domain.dim == 2:
        for i in range(n):
            c = tess.cell(i)
            if not _inside_convex(c.polygon, tess.points[i]):
                rep.generators_outside.append(i)
    return rep
