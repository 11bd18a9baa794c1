from dataclasses import dataclass

import numpy as np

KINDS = ("circle", "square", "torus")


@dataclass(frozen=True)
class Domain:
    """Unit-measure domain: the circle of circumference 1, the unit square,
    or the flat unit torus."""

    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {KINDS}")

    @property
    def total_measure(self) -> float:
        return 1.0

    @property
    def dim(self) -> int:
        return 1 if self.kind == "circle" else 2

    @property
    def has_boundary(self) -> bool:
        return self.kind == "square"

    @property
    def diameter(self) -> float:
        return {"circle": 0.5, "square": np.sqrt(2.0), "torus": np.sqrt(0.5)}[self.kind]

    def sample(self, rng, n):
        """n i.i.d. uniform points, shape (n,) on the circle, (n, 2) otherwise."""
        if self.dim == 1:
            return rng.random(n)
        return rng.random((n, 2))

    def distance(self, a, b):
        """Pairwise-broadcast distance in the domain metric."""
        d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        if self.kind != "square":
            d = np.minimum(d, 1.0 - d)
        if self.dim == 1:
            return d
        return np.hypot(d[..., 0], d[..., 1])


def as_domain(domain) -> Domain:
    return domain if isinstance(domain, Domain) else Domain(domain)


CIRCLE = Domain("circle")
SQUARE = Domain("square")
TORUS = Domain("torus")
