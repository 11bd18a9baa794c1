"""Voronoi point-process state, single steps and multi-step evolution."""
import json
from dataclasses import dataclass, field

import numpy as np

from ..geometry import Configuration, as_domain, build_tessellation
from ..geometry.tessellation import CircleTessellation, GeometryError
from . import _kernels
from .selection import SelectionSpec

MAX_CHUNK = 4096


class DynamicsError(RuntimeError):
    pass


@dataclass
class StepRecord:
    step: int
    culled_label: int
    culled_slot: int
    weight_share: float
    new_point: tuple

    def to_json(self):
        return json.dumps({"step": self.step, "culled_label": self.culled_label,
                           "culled_slot": self.culled_slot,
                           "weight_share": self.weight_share,
                           "new_point": list(self.new_point)})


class ProcessState:
    """Configuration + tessellation + cached culling weights + RNG.

    Weights live in a Fenwick tree indexed by slot so a culling draw and the
    local weight rewrites after a replacement are O(log N) each.
    """

    def __init__(self, tess, spec, rng, step_count=0):
        self.tess = tess
        self.spec = spec
        self.rng = rng
        self.step_count = step_count
        self.next_label = int(tess.labels.max()) + 1 if tess.n else 0
        self.table = spec.table()
        self.weights = self.recompute_weights()
        self.tree = np.zeros(tess.n + 1)
        _kernels.fenwick_build(self.weights, self.tree)
        self.spare_used = 0
        n = tess.n
        self._changed = np.empty(max(2 * 256 + 2, 8), dtype=np.int64)

    @property
    def domain(self):
        return self.tess.domain

    @property
    def points(self):
        return self.tess.points

    @property
    def n(self):
        return self.tess.n

    def configuration(self):
        return Configuration(self.tess.points.copy(), self.tess.labels.copy())

    def recompute_weights(self):
        return self.spec.weights(self.tess.areas, self.tess.degrees())

    def copy(self):
        new = object.__new__(ProcessState)
        new.__dict__.update(self.__dict__)
        new.tess = self.tess.copy()
        new.weights = self.weights.copy()
        new.tree = self.tree.copy()
        new.rng = np.random.Generator(type(self.rng.bit_generator)())
        new.rng.bit_generator.state = self.rng.bit_generator.state
        new._changed = self._changed.copy()
        return new


def init_uniform(n, domain, seed, spec):
    """N i.i.d. uniform points on the domain with tessellation and weights built."""
    domain = as_domain(domain)
    if domain.dim == 2 and n < 3:
        raise ValueError("2-D domains need N >= 3")
    if n < 1:
        raise ValueError("N must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = domain.sample(rng, n)
    tess = build_tessellation(Configuration(pts), domain)
    return ProcessState(tess, spec, rng)


def from_points(points, domain, spec, seed=0):
    tess = build_tessellation(Configuration(points), as_domain(domain))
    return ProcessState(tess, spec, np.random.default_rng(seed))


def cull_distribution(state):
    """P(J = j) = S(C_j) / sum_i S(C_i), by slot."""
    w = state.weights
    total = w.sum()
    if not total > 0:
        raise DynamicsError("all culling weights vanish")
    return w / total


def sample_culls(state, n_draws, rng=None):
    """Independent culling draws from a frozen state through the Fenwick sampler."""
    rng = rng if rng is not None else state.rng
    out = np.empty(n_draws, dtype=np.int64)
    _kernels.sample_many(state.tree, state.weights, rng.random(n_draws), out)
    return out


def _kernel_call(state, draws, rec):
    tess = state.tess
    if isinstance(tess, CircleTessellation):
        return _kernels.run_circle(
            len(draws), draws, state.spec.alpha, state.weights, state.tree,
            tess.labels, state.next_label, tess.points, tess.order, tess.rank,
            tess.areas, state._changed, *rec, state.step_count)
    (pts, active, kind, g, head, nxt, bucket, polys, polylab, nverts, areas,
     nbrs, nnbrs, touches, *scratch) = tess.arrays
    return _kernels.run_planar(
        len(draws), draws, state.spec.mode, state.spec.alpha, state.table,
        state.weights, state.tree, tess.labels, state.next_label, pts, active, kind,
        g, head, nxt, bucket, polys, polylab, nverts, areas, nbrs, nnbrs, touches,
        *scratch, state._changed, *rec, state.step_count)


def _advance(state, nsteps, records):
    """Run nsteps steps.  Draw order per step: cull uniform, then the placement
    coordinates, then (rarely) fresh coordinates for each proximity redraw.
    The stream does not depend on how the steps are chunked."""
    dim = state.domain.dim
    rec = (np.empty(nsteps, dtype=np.int64), np.empty(nsteps, dtype=np.int64),
           np.empty(nsteps), np.empty((nsteps, dim)))
    done = 0
    while done < nsteps:
        saved = state.rng.bit_generator.state
        draws = state.rng.random((nsteps - done, 1 + dim))
        sub = tuple(r[done:] for r in rec)
        next_label, k, err = _kernel_call(state, draws, sub)
        _finish(state, k, next_label, err)
        done += k
        if err == _kernels.ERR_REDRAW:
            # rewind to just after step k's placement, then redraw in stream order
            state.rng.bit_generator.state = saved
            state.rng.random((k + 1) * (1 + dim))
            row = draws[k:k + 1].copy()
            while True:
                state.spare_used += 1
                row[0, 1:] = state.rng.random(dim)
                next_label, k1, err = _kernel_call(state, row, tuple(r[done:] for r in rec))
                if err != _kernels.ERR_REDRAW:
                    break
            _finish(state, k1, next_label, err)
            done += 1
    state.tess.version += nsteps
    if records is not None:
        slot, label, share, point = rec
        for t in range(nsteps):
            records.append(StepRecord(state.step_count - nsteps + t, int(label[t]),
                                      int(slot[t]), float(share[t]),
                                      tuple(float(v) for v in point[t])))


def _finish(state, k, next_label, err):
    state.next_label = int(next_label)
    state.step_count += k
    if err == _kernels.ERR_GEOMETRY:
        raise GeometryError("cell storage overflow during evolution")
    if err == _kernels.ERR_WEIGHTS:
        raise DynamicsError("all culling weights vanish")


def step(state, record=True):
    """One culling/replacement step, in place.  Returns the StepRecord."""
    records = [] if record else None
    _advance(state, 1, records)
    return records[0] if record else None


@dataclass
class Observer:
    """Calls fn(state) every `period` steps (and at step 0 when at_start)."""

    name: str
    period: int
    fn: object
    at_start: bool = False


@dataclass
class EvolutionLog:
    observations: list = field(default_factory=list)  # (step, name, value)
    records: list = field(default_factory=list)
    error: BaseException = None

    def series(self, name):
        return [(s, v) for s, n, v in self.observations if n == name]


def evolve(state, T, observers=(), record_steps=False):
    """Apply exactly T steps in place, invoking observers on their periods.

    An observer exception stops the run; the partial log is returned with the
    exception attached in `log.error` and re-raised via DynamicsError.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    log = EvolutionLog()
    records = log.records if record_steps else None
    start = state.step_count
    end = start + T

    def observe(at):
        for ob in observers:
            due = (at - start) % ob.period == 0 and (at > start or ob.at_start)
            if due:
                try:
                    value = ob.fn(state)
                except Exception as exc:
                    log.error = exc
                    raise DynamicsError(f"observer {ob.name!r} failed at step {at}") from exc
                log.observations.append((at - start, ob.name, value))

    observe(start)
    while state.step_count < end:
        nxt = end
        for ob in observers:
            k = (state.step_count - start) // ob.period + 1
            nxt = min(nxt, start + k * ob.period)
        nxt = min(nxt, state.step_count + MAX_CHUNK)
        _advance(state, nxt - state.step_count, records)
        observe(state.step_count)
    return state, log


def write_step_stream(path, records):
    with open(path, "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
