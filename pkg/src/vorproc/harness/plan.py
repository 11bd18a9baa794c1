"""Declarative experiment plans and seed derivation."""
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ..dynamics import SelectionSpec
from ..geometry import as_domain

PROCESSES = ("v", "n", "aipp", "csr")
ROLES = {"init": 0, "dynamics": 1, "aipp": 2, "tune": 3, "stats": 4}
DEFAULT_STATS = ("rstar", "epmf", "j", "pattern")


@dataclass(frozen=True)
class ExperimentPlan:
    process: str = "csr"
    alpha: float = 0.0
    selection: str = "vanilla"
    gamma1: float = 1.0
    domain: str = "square"
    n_points: int = 2000
    steps_per_point: float = 12.0
    replicates: int = 25
    seed: int = 0
    depth_filter: int = 3
    stats: tuple = DEFAULT_STATS
    r_grid: tuple = None
    n_radii: int = 64
    aipp_beta: float = None
    aipp_burnin: int = 2_000_000
    aipp_tolerance: float = 0.02
    aipp_clipped: bool = False
    observer_period: int = 0  # record R* every this many steps (0: off)

    def __post_init__(self):
        if self.process not in PROCESSES:
            raise ValueError(f"process must be one of {PROCESSES}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.steps_per_point < 0:
            raise ValueError("steps_per_point must be >= 0")
        as_domain(self.domain)
        if self.process in ("n", "aipp") and self.domain != "square":
            raise ValueError(f"the {self.process} process lives on the unit square")
        if self.domain == "circle" and self.process != "v" and self.process != "csr":
            raise ValueError("only v-processes and CSR run on the circle")
        object.__setattr__(self, "stats", tuple(self.stats))
        if self.r_grid is not None:
            object.__setattr__(self, "r_grid", tuple(float(r) for r in self.r_grid))
        self.selection_spec()  # validates names

    @property
    def steps(self):
        return int(round(self.steps_per_point * self.n_points))

    def selection_spec(self):
        if self.process == "n":
            return SelectionSpec.named(self.selection)
        return SelectionSpec.volume(self.alpha if self.process == "v" else 0.0)

    def label(self):
        return {"v": f"v alpha={self.alpha:g}", "n": f"n {self.selection}",
                "aipp": f"aipp gamma1={self.gamma1:g}", "csr": "csr"}[self.process]

    def to_dict(self):
        d = asdict(self)
        d["stats"] = list(self.stats)
        d["r_grid"] = None if self.r_grid is None else list(self.r_grid)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown plan keys: {sorted(unknown)}")
        d = dict(d)
        if "stats" in d:
            d["stats"] = tuple(d["stats"])
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    def fingerprint(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def but(self, **changes):
        return replace(self, **changes)


def derive_seed(seed_root, replicate, role):
    """Independent 64-bit stream seed for (seed root, replicate, role)."""
    ss = np.random.SeedSequence([int(seed_root), int(replicate), ROLES[role]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rng_for(seed_root, replicate, role):
    return np.random.default_rng(derive_seed(seed_root, replicate, role))
