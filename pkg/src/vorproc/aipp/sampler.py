"""Area-interaction point process via spatial birth-death Metropolis-Hastings."""
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from . import _kernels

MAX_LOCAL = 4096


@dataclass(frozen=True)
class AippParams:
    """Density C beta^n gamma^(-area(x + B(rho))) with gamma = gamma1 ** gamma_exponent.

    gamma is kept as (gamma1, exponent) and only ever used through
    log_gamma = exponent * ln(gamma1); gamma1 ** 1e4 overflows a float.
    """

    beta: float = 2000.0
    gamma1: float = 1.0
    gamma_exponent: float = 1e4
    rho: float = 0.01
    target_count: int = 2000
    clipped: bool = False

    def __post_init__(self):
        if not (self.beta > 0 and self.gamma1 > 0 and self.rho > 0):
            raise ValueError("beta, gamma1 and rho must be positive")

    @property
    def log_gamma(self):
        return self.gamma_exponent * math.log(self.gamma1)

    @property
    def log_beta(self):
        return math.log(self.beta)

    def with_beta(self, beta):
        return replace(self, beta=float(beta))

    def to_dict(self):
        return {"beta": self.beta, "gamma1": self.gamma1,
                "gamma_exponent": self.gamma_exponent, "rho": self.rho,
                "target_count": self.target_count, "clipped": self.clipped}


class _Scratch:
    def __init__(self):
        self.nx = np.empty(MAX_LOCAL)
        self.ny = np.empty(MAX_LOCAL)
        self.lo = np.empty(2 * MAX_LOCAL + 4)
        self.hi = np.empty(2 * MAX_LOCAL + 4)
        self.clo = np.empty(4)
        self.chi = np.empty(4)

    def args(self):
        return self.nx, self.ny, self.lo, self.hi, self.clo, self.chi


class AippState:
    """Variable-size configuration with a cached coverage area and a bucket
    hash of side >= rho for local disk queries."""

    def __init__(self, points, rho, rng, capacity=None, clipped=False):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        n = len(pts)
        cap = max(capacity or 0, 2 * n, 64)
        self.rho = float(rho)
        self.clipped = bool(clipped)
        self.g = max(int(math.floor(1.0 / self.rho)), 1)
        self.rng = rng
        self.step_count = 0
        self._alloc(cap)
        self.pts[:n] = pts
        self.members[:n] = np.arange(n)
        self.where[:n] = np.arange(n)
        self.n = n
        self.free = np.arange(cap - 1, n - 1, -1, dtype=np.int64)
        self.free = np.concatenate([self.free, np.zeros(n, dtype=np.int64)])
        self.nfree = cap - n
        for s in range(n):
            _kernels.hash_insert(s, self.pts, self.g, self.head, self.nxt, self.prv,
                                 self.bucket)
        self._scratch = _Scratch()
        self.coverage = self.recompute_coverage()

    def _alloc(self, cap):
        self.pts = np.zeros((cap, 2))
        self.members = np.full(cap, -1, dtype=np.int64)
        self.where = np.full(cap, -1, dtype=np.int64)
        self.head = np.full(self.g * self.g, -1, dtype=np.int64)
        self.nxt = np.full(cap, -1, dtype=np.int64)
        self.prv = np.full(cap, -1, dtype=np.int64)
        self.bucket = np.full(cap, -1, dtype=np.int64)

    def _grow(self):
        pts = self.points.copy()
        cap = 2 * len(self.pts)
        new = AippState(pts, self.rho, self.rng, capacity=cap, clipped=self.clipped)
        cov, steps = self.coverage, self.step_count
        self.__dict__.update(new.__dict__)
        self.coverage, self.step_count = cov, steps

    @property
    def points(self):
        return self.pts[self.members[: self.n]].copy()

    def __len__(self):
        return self.n

    def new_area(self, u, skip=-1):
        a = _kernels.new_area(float(u[0]), float(u[1]), skip, self.pts, self.g,
                              self.head, self.nxt, self.rho, self.clipped,
                              *self._scratch.args())
        if a < 0:
            raise RuntimeError("local disk buffer overflow")
        return a

    def recompute_coverage(self):
        return coverage_area(self.points, self.rho, clipped=self.clipped)

    def copy(self):
        new = AippState(self.points, self.rho, np.random.default_rng(),
                        capacity=len(self.pts), clipped=self.clipped)
        new.rng = np.random.Generator(type(self.rng.bit_generator)())
        new.rng.bit_generator.state = self.rng.bit_generator.state
        new.coverage = self.coverage
        new.step_count = self.step_count
        return new


def coverage_area(points, rho, clipped=False):
    """Lebesgue measure of the union of radius-rho disks at the points.

    Unclipped (default) measures the Minkowski sum in the plane exactly;
    clipped measures its intersection with the unit square by grid quadrature.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not rho > 0:
        raise ValueError("rho must be positive")
    if len(pts) == 0:
        return 0.0
    if not clipped:
        st = AippState.__new__(AippState)
        st.rho = float(rho)
        st.g = max(int(math.floor(1.0 / rho)), 1)
        st._alloc(len(pts))
        st.pts[:] = pts
        for s in range(len(pts)):
            _kernels.hash_insert(s, st.pts, st.g, st.head, st.nxt, st.prv, st.bucket)
        sc = _Scratch()
        a = _kernels.union_area(st.pts, len(pts), st.rho, st.g, st.head, st.nxt,
                                *sc.args())
        if a < 0:
            raise RuntimeError("local disk buffer overflow")
        return a
    # clipped: add disks one at a time, each contributing its uncovered part
    g = max(int(math.floor(1.0 / rho)), 1)
    cap = len(pts)
    P = np.zeros((cap, 2))
    head = np.full(g * g, -1, dtype=np.int64)
    nxt = np.full(cap, -1, dtype=np.int64)
    prv = np.full(cap, -1, dtype=np.int64)
    bucket = np.full(cap, -1, dtype=np.int64)
    sc = _Scratch()
    total = 0.0
    for s, p in enumerate(pts):
        total += _kernels.new_area(p[0], p[1], -1, P, g, head, nxt, rho, True, *sc.args())
        P[s] = p
        _kernels.hash_insert(s, P, g, head, nxt, prv, bucket)
    return total


def papangelou(u, config, params):
    """beta * gamma^-(area added by a disk at u); config is an AippState or an
    array of points not containing u."""
    state = config if isinstance(config, AippState) else AippState(
        config, params.rho, None, clipped=params.clipped)
    a = state.new_area(u)
    return params.beta * math.exp(-params.log_gamma * a)


def log_density_unnormalised(points, params):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return len(pts) * params.log_beta - params.log_gamma * coverage_area(
        pts, params.rho, clipped=params.clipped)


@dataclass
class ChainDiagnostics:
    count_trace: np.ndarray
    coverage_trace: np.ndarray
    trace_every: int
    accepted: int
    proposals: int
    autocorr: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def acceptance_rate(self):
        return self.accepted / max(self.proposals, 1)

    def to_dict(self):
        return {"trace_every": self.trace_every, "accepted": self.accepted,
                "proposals": self.proposals, "acceptance_rate": self.acceptance_rate,
                "count_trace": [int(x) for x in self.count_trace],
                "coverage_trace": [float(x) for x in self.coverage_trace],
                "autocorr": {str(k): v for k, v in self.autocorr.items()},
                "warnings": list(self.warnings)}


def run(state, params, nsteps, trace_every=0):
    """Apply nsteps birth-death proposals in place; returns (accepted, traces).

    Draw order per proposal: move type, location (x, y) or member index, and
    the acceptance uniform.
    """
    if params.rho != state.rho or params.clipped != state.clipped:
        raise ValueError("state and params disagree on rho / clipping")
    ntrace = nsteps // trace_every if trace_every > 0 else 0
    count_trace = np.zeros(ntrace, dtype=np.int64)
    cov_trace = np.zeros(ntrace)
    draws = state.rng.random((nsteps, 4))
    done = 0
    accepted = 0
    while done < nsteps:
        t, n, nfree, cov, acc, err = _kernels.run_chain(
            nsteps - done, draws[done:], params.log_beta, params.log_gamma, params.rho,
            params.clipped, state.pts, state.members, state.where, state.n, state.free,
            state.nfree, state.g, state.head, state.nxt, state.prv, state.bucket,
            state.coverage, *state._scratch.args(),
            trace_every, count_trace, cov_trace, done)
        state.n, state.nfree, state.coverage = int(n), int(nfree), float(cov)
        accepted += int(acc)
        done += int(t)
        if err == 1:
            raise RuntimeError("local disk buffer overflow")
        if err == 2:
            state._grow()
    state.step_count += nsteps
    return accepted, count_trace, cov_trace


def bd_mh_step(state, params):
    """One birth-death proposal; returns True when it was accepted."""
    acc, _, _ = run(state, params, 1)
    return bool(acc)


def _autocorr(x, lag):
    x = np.asarray(x, dtype=float)
    if len(x) <= lag + 1 or np.var(x) == 0:
        return float("nan")
    x = x - x.mean()
    return float(np.dot(x[:-lag], x[lag:]) / np.dot(x, x))


def _trend_warning(trace, batches=10):
    # a stationary count trace shows no linear trend over its second half;
    # batch means tame the strong autocorrelation of successive samples
    y = np.asarray(trace[len(trace) // 2:], dtype=float)
    if len(y) < 10 * batches or np.var(y) == 0:
        return None
    m = np.array([b.mean() for b in np.array_split(y, batches)])
    res = stats.linregress(np.arange(batches), m)
    if res.pvalue < 0.001:
        return (f"count trace still trending (slope {res.slope:.3g} per batch of "
                f"{len(y) // batches} samples, p={res.pvalue:.2g})")
    return None


def initial_state(params, seed, n0=None):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n0 = params.target_count if n0 is None else n0
    pts = rng.random((int(n0), 2))
    return AippState(pts, params.rho, rng, capacity=4 * max(n0, 16), clipped=params.clipped)


DEFAULT_BURNIN = 2_000_000


def sample(params, burnin_steps=DEFAULT_BURNIN, seed=0, state=None, trace_every=1000):
    """Run the chain for burnin_steps proposals and return (points, diagnostics).

    The chain starts from target_count uniform points unless a state is given.
    """
    if burnin_steps < 0:
        raise ValueError("burnin_steps must be nonnegative")
    state = initial_state(params, seed) if state is None else state
    acc, ct, cv = run(state, params, burnin_steps, trace_every=trace_every)
    diag = ChainDiagnostics(ct, cv, trace_every, acc, burnin_steps)
    for lag in (1, 10):
        diag.autocorr[lag] = _autocorr(ct, lag)
    w = _trend_warning(ct)
    if w:
        diag.warnings.append(w)
        warnings.warn(w, RuntimeWarning, stacklevel=2)
    return state.points, diag


class TuningError(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def initial_beta(params):
    """Mean-field guess: a Poisson pattern at the target intensity leaves a
    fraction exp(-n pi rho^2) of a new disk uncovered."""
    a = math.pi * params.rho ** 2
    return params.target_count * math.exp(params.log_gamma * a * math.exp(-params.target_count * a))


def tune_beta(params, tolerance_fraction=0.02, seed=0, burnin_steps=None,
              round_steps=None, max_rounds=40, gain=0.8):
    """Robbins-Monro on ln beta until a round's mean count is within
    tolerance_fraction of target_count.

    Returns (beta, trace) with trace a list of (beta, mean count) per round.
    """
    if not tolerance_fraction > 0:
        raise ValueError("tolerance_fraction must be positive")
    if params.target_count <= 0:
        raise ValueError("target_count must be positive")
    target = params.target_count
    burnin_steps = 500 * target if burnin_steps is None else burnin_steps
    round_steps = 100 * target if round_steps is None else round_steps
    p = params.with_beta(initial_beta(params))
    state = initial_state(p, seed)
    run(state, p, burnin_steps)
    log_beta = math.log(p.beta)
    trace = []
    every = max(round_steps // 200, 1)
    for k in range(max_rounds):
        p = params.with_beta(math.exp(log_beta))
        _, ct, _ = run(state, p, round_steps, trace_every=every)
        mean = float(ct.mean())
        trace.append((p.beta, mean))
        if abs(mean - target) <= tolerance_fraction * target:
            return p.beta, trace
        log_beta += gain / (1.0 + k) ** 0.6 * (math.log(target) - math.log(max(mean, 1.0)))
    raise TuningError(f"beta tuning did not reach {tolerance_fraction:.1%} in {max_rounds} rounds",
                      trace)
