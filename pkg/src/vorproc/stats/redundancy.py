from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..geometry import nn_depth


def thiel_redundancy(areas):
    """ln N + sum p_j ln p_j with p_j the normalised cell areas.

    Zero when all cells are equal; approaches ln N as one cell takes over.
    """
    a = np.asarray(areas, dtype=float)
    if a.size == 0:
        raise ValueError("need at least one cell")
    if np.any(~(a > 0)):
        raise ValueError("cell areas must be positive")
    p = a / a.sum()
    return max(float(np.log(a.size) + np.sum(p * np.log(p))), 0.0)


def depth_filter(tess, m=3):
    """Slots whose NN-depth to the square's boundary is at least m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    d = nn_depth(tess)
    return np.flatnonzero(d >= m)


def included_ids(tess, m=3):
    """Default statistic window: depth >= m on the square, everything elsewhere."""
    if tess.domain.has_boundary:
        return depth_filter(tess, m)
    return np.arange(tess.n)


def redundancy_of(tess, m=3):
    """R* of the tessellation restricted to the default window."""
    ids = included_ids(tess, m)
    return thiel_redundancy(tess.areas[ids])


@dataclass
class Epmf:
    freq: dict

    def mean(self):
        return sum(k * v for k, v in self.freq.items())

    def tail(self, above):
        return sum(v for k, v in self.freq.items() if k > above)

    def vector(self, kmax=20):
        out = np.zeros(kmax + 1)
        for k, v in self.freq.items():
            out[min(k, kmax)] += v
        return out

    def to_json(self):
        return {str(k): v for k, v in sorted(self.freq.items())}


def nn_epmf(tess, ids=None):
    """Relative frequency of neighbour counts among the given cells."""
    ids = np.arange(tess.n) if ids is None else np.asarray(ids)
    if ids.size == 0:
        raise ValueError("empty inclusion set")
    deg = np.asarray(tess.degrees())[ids]
    counts = Counter(int(k) for k in deg)
    total = float(len(deg))
    return Epmf({k: c / total for k, c in sorted(counts.items())})


def pool_epmfs(epmfs):
    keys = sorted(set().union(*(e.freq for e in epmfs)))
    return Epmf({k: float(np.mean([e.freq.get(k, 0.0) for e in epmfs])) for k in keys})
