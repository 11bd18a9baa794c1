"""Selection functions S mapping a Voronoi cell to a culling weight."""
from dataclasses import dataclass

import numpy as np

from ..geometry.tessellation import MAX_NEIGHBOURS

VOLUME = 0
NEIGHBOUR = 1

SHARP = 5000.0


def _sharp(target, pro):
    def f(n):
        hit = n == target
        # "pro-k" favours keeping k-cells: culls everything else
        return np.where(hit, 1.0, SHARP) if pro else np.where(hit, SHARP, 1.0)
    return f


NAMED = {
    "vanilla": lambda n: n.astype(float),
    "anti-many": lambda n: n.astype(float) ** 2,
    # clamped at n >= 3: boundary cells may have fewer than three neighbours
    "anti-few": lambda n: (np.maximum(n, 3) - 2.0) ** -2,
    "anti-6": lambda n: (0.1 + np.abs(n - 6.0)) ** -2,
    "pro-6": lambda n: np.abs(n - 6.0) ** 2,
    "pro-4": _sharp(4, True),
    "anti-4": _sharp(4, False),
    "pro-5": _sharp(5, True),
    "anti-5": _sharp(5, False),
    "pro-7": _sharp(7, True),
    "anti-7": _sharp(7, False),
}


@dataclass(frozen=True)
class SelectionSpec:
    """Either `volume-power` with exponent alpha, or a named neighbour-count rule."""

    kind: str
    alpha: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.kind == "volume-power":
            if not np.isfinite(self.alpha):
                raise ValueError("alpha must be finite")
        elif self.kind == "neighbour-named":
            if self.name not in NAMED:
                raise ValueError(f"unknown selection {self.name!r}; choose from {sorted(NAMED)}")
        else:
            raise ValueError(f"unknown selection kind {self.kind!r}")

    @classmethod
    def volume(cls, alpha):
        return cls("volume-power", alpha=float(alpha))

    @classmethod
    def named(cls, name):
        return cls("neighbour-named", name=name)

    @property
    def mode(self):
        return VOLUME if self.kind == "volume-power" else NEIGHBOUR

    def table(self):
        """S_n(n) for n = 0..MAX_NEIGHBOURS (zeros for volume specs)."""
        if self.mode == VOLUME:
            return np.zeros(MAX_NEIGHBOURS + 1)
        return NAMED[self.name](np.arange(MAX_NEIGHBOURS + 1))

    def weights(self, areas, degrees):
        """Vectorised S over cells given their areas and neighbour counts."""
        if self.mode == VOLUME:
            return np.asarray(areas, dtype=float) ** self.alpha
        return self.table()[np.asarray(degrees)]

    def to_dict(self):
        if self.mode == VOLUME:
            return {"kind": self.kind, "alpha": self.alpha}
        return {"kind": self.kind, "name": self.name}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], alpha=float(d.get("alpha", 0.0)), name=d.get("name", ""))

    def __str__(self):
        return f"alpha={self.alpha:g}" if self.mode == VOLUME else self.name


def selection_weight(spec, cell):
    """S(C) for a single Cell."""
    return float(spec.weights(np.array([cell.area]), np.array([len(cell.neighbor_ids)]))[0])
