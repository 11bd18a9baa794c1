"""Replicate fan-out, statistic collection and aggregation."""
import json
import logging
import os
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..aipp import AippParams, sample as aipp_sample, tune_beta
from ..dynamics import Observer, evolve, init_uniform
from ..geometry import Configuration, as_domain, build_tessellation, write_points
from ..stats import (
    average_curves,
    default_r_grid,
    gamma_shape_mle,
    included_ids,
    j_curve,
    nn_epmf,
    pool_epmfs,
    smooth_ln_j,
    thiel_redundancy,
)
from .plan import ExperimentPlan, derive_seed, rng_for

log = logging.getLogger(__name__)


@dataclass
class Replicate:
    index: int
    seed: int
    points: np.ndarray = None
    rstar: float = None
    epmf: object = None
    curve: object = None
    gamma_shape: float = None
    widths: np.ndarray = None
    trace: list = None
    error: str = None
    pattern_file: str = None

    @property
    def ok(self):
        return self.error is None


@dataclass
class ResultRecord:
    plan: ExperimentPlan
    fingerprint: str
    replicates: list
    rstar_mean: float = float("nan")
    rstar_sd: float = float("nan")
    rstar_se: float = float("nan")
    epmf: object = None
    curve: object = None
    lnj_fit: object = None
    gamma_shape: float = None
    aipp_beta: float = None
    meta: dict = field(default_factory=dict)

    @property
    def n_ok(self):
        return sum(r.ok for r in self.replicates)

    @property
    def shortfall(self):
        return len(self.replicates) - self.n_ok

    @property
    def rstars(self):
        return np.array([r.rstar for r in self.replicates if r.ok and r.rstar is not None])

    def to_dict(self):
        d = {
            "fingerprint": self.fingerprint,
            "version": __version__,
            "plan": self.plan.to_dict(),
            "n_ok": self.n_ok,
            "shortfall": self.shortfall,
            "rstar": {"mean": _f(self.rstar_mean), "sd": _f(self.rstar_sd),
                      "se": _f(self.rstar_se)},
            "replicates": [
                {"index": r.index, "seed": r.seed, "rstar": _f(r.rstar),
                 "gamma_shape": _f(r.gamma_shape),
                 "epmf": r.epmf.to_json() if r.epmf is not None else None,
                 "pattern_file": r.pattern_file, "error": r.error}
                for r in self.replicates],
            "epmf": self.epmf.to_json() if self.epmf is not None else None,
            "curve": self.curve.to_dict() if self.curve is not None else None,
            "lnj_fit": None if self.lnj_fit is None else
            {"degree": self.lnj_fit.degree, "coef": [float(c) for c in self.lnj_fit.coef]},
            "gamma_shape": _f(self.gamma_shape),
            "aipp_beta": _f(self.aipp_beta),
            "meta": self.meta,
        }
        return d


def _f(x):
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else None


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def simulate_pattern(plan, replicate, aipp_beta=None):
    """Final point pattern of one replicate, plus its tessellation (or None)
    and any R* trace."""
    domain = as_domain(plan.domain)
    if plan.process == "aipp":
        params = AippParams(beta=aipp_beta, gamma1=plan.gamma1, target_count=plan.n_points,
                            clipped=plan.aipp_clipped)
        pts, diag = aipp_sample(params, plan.aipp_burnin,
                                seed=derive_seed(plan.seed, replicate, "aipp"))
        return pts, None, None, diag
    spec = plan.selection_spec()
    state = init_uniform(plan.n_points, domain, rng_for(plan.seed, replicate, "init"), spec)
    trace = None
    if plan.process != "csr" and plan.steps > 0:
        state.rng = rng_for(plan.seed, replicate, "dynamics")
        observers = []
        if plan.observer_period > 0:
            m = plan.depth_filter
            observers.append(Observer("rstar", plan.observer_period,
                                      lambda st: float(thiel_redundancy(
                                          st.tess.areas[included_ids(st.tess, m)])),
                                      at_start=True))
        _, evo = evolve(state, plan.steps, observers)
        trace = evo.series("rstar") if observers else None
    return state.points.copy(), state.tess, trace, None


def replicate_stats(plan, index, points, tess, r_grid, trace=None):
    rep = Replicate(index=index, seed=plan.seed, points=points, trace=trace)
    domain = as_domain(plan.domain)
    if domain.dim == 1:
        tess = tess if tess is not None else build_tessellation(points, domain)
        rep.widths = tess.areas.copy()
        if "rstar" in plan.stats:
            rep.rstar = thiel_redundancy(tess.areas)
        if "gamma" in plan.stats:
            rep.gamma_shape = gamma_shape_mle(tess.areas)
        return rep
    if tess is None:
        tess = build_tessellation(Configuration(points), domain)
    ids = included_ids(tess, plan.depth_filter)
    if "rstar" in plan.stats:
        rep.rstar = thiel_redundancy(tess.areas[ids])
    if "epmf" in plan.stats:
        rep.epmf = nn_epmf(tess, ids)
    if "j" in plan.stats and r_grid is not None:
        rep.curve = j_curve(points, r_grid, domain, tess=tess, m=plan.depth_filter)
    return rep


def _replicate_job(args):
    plan, index, aipp_beta, r_grid = args
    try:
        pts, tess, trace, _ = simulate_pattern(plan, index, aipp_beta)
        grid = r_grid
        if grid is None and "j" in plan.stats and as_domain(plan.domain).dim == 2:
            grid = default_r_grid(pts, plan.domain, plan.n_radii)
        rep = replicate_stats(plan, index, pts, tess, grid, trace)
        rep.seed = derive_seed(plan.seed, index, "init")
        return rep, grid
    except Exception as exc:  # recorded, aggregate continues over successes
        return Replicate(index=index, seed=derive_seed(plan.seed, index, "init"),
                         error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc()}"), None


def resolve_aipp_beta(plan):
    if plan.process != "aipp":
        return None
    if plan.aipp_beta is not None:
        return float(plan.aipp_beta)
    beta, _ = tune_beta(AippParams(gamma1=plan.gamma1, target_count=plan.n_points,
                                   clipped=plan.aipp_clipped),
                        tolerance_fraction=plan.aipp_tolerance,
                        seed=derive_seed(plan.seed, 0, "tune"))
    return beta


def run(plan, out_dir=None, workers=1, fmt="json"):
    """Execute every replicate of a plan and aggregate the statistics.

    The r grid for J-hat is the plan's, or else the pilot grid of replicate 0
    shared by all replicates.
    """
    aipp_beta = resolve_aipp_beta(plan)
    r_grid = None if plan.r_grid is None else np.array(plan.r_grid)
    first, grid = _replicate_job((plan, 0, aipp_beta, r_grid))
    if r_grid is None:
        r_grid = grid
    jobs = [(plan, i, aipp_beta, r_grid) for i in range(1, plan.replicates)]
    if workers > 1 and jobs:
        with ProcessPoolExecutor(workers) as ex:
            rest = [r for r, _ in ex.map(_replicate_job, jobs)]
    else:
        rest = [_replicate_job(j)[0] for j in jobs]
    reps = [first] + rest
    for r in reps:
        if not r.ok:
            log.warning("replicate %d failed: %s", r.index, r.error.splitlines()[0])
    rec = aggregate(plan, reps)
    rec.aipp_beta = aipp_beta
    if out_dir is not None:
        write_outputs(rec, out_dir, fmt)
    return rec


def aggregate(plan, reps):
    rec = ResultRecord(plan=plan, fingerprint=plan.fingerprint(), replicates=reps)
    ok = [r for r in reps if r.ok]
    rs = rec.rstars
    if len(rs):
        rec.rstar_mean = float(rs.mean())
        rec.rstar_sd = float(rs.std(ddof=1)) if len(rs) > 1 else 0.0
        rec.rstar_se = rec.rstar_sd / np.sqrt(len(rs))
    ep = [r.epmf for r in ok if r.epmf is not None]
    if ep:
        rec.epmf = pool_epmfs(ep)
    cv = [r.curve for r in ok if r.curve is not None]
    if cv:
        rec.curve = average_curves(cv)
        rec.curve.meta = {"smoothing": "weighted cubic fit of ln(mean J), weights 1/sd(ln J)"}
        if len(cv) > 1 and np.count_nonzero(rec.curve.mask) >= 4:
            try:
                rec.lnj_fit = smooth_ln_j(rec.curve)
            except (ValueError, np.linalg.LinAlgError) as exc:
                rec.meta["lnj_fit_error"] = str(exc)
    widths = [r.widths for r in ok if r.widths is not None]
    if widths and "gamma" in plan.stats:
        # pooled, each draw rescaled to mean 1 (the MLE is scale-free per draw anyway)
        pooled = np.concatenate([w / w.mean() for w in widths])
        rec.gamma_shape = gamma_shape_mle(pooled)
    rec.meta.update({"version": __version__, "fingerprint": rec.fingerprint,
                     "shortfall": rec.shortfall,
                     "aipp_coverage": "clipped" if plan.aipp_clipped else "unclipped"})
    return rec


def write_outputs(rec, out_dir, fmt="json"):
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"{rec.plan.process}-{rec.fingerprint}")
    header = f"fingerprint {rec.fingerprint}\nversion {__version__}\nseed {rec.plan.seed}"
    for r in rec.replicates:
        if r.ok and r.points is not None and "pattern" in rec.plan.stats:
            path = f"{stem}-rep{r.index:03d}.txt"
            write_points(path + ".tmp", r.points, header=f"{header}\nreplicate {r.index}")
            os.replace(path + ".tmp", path)
            r.pattern_file = os.path.basename(path)
    _atomic_write(stem + ".json", json.dumps(rec.to_dict(), indent=2))
    if fmt == "csv":
        lines = [f"# fingerprint: {rec.fingerprint}", f"# version: {__version__}",
                 f"# seed: {rec.plan.seed}", "replicate,seed,rstar"]
        lines += [f"{r.index},{r.seed},{'' if r.rstar is None else repr(r.rstar)}"
                  for r in rec.replicates]
        _atomic_write(stem + "-rstar.csv", "\n".join(lines) + "\n")
        if rec.curve is not None:
            rec.curve.to_csv(stem + "-curve.csv.tmp",
                             {"fingerprint": rec.fingerprint, "version": __version__,
                              "seed": rec.plan.seed})
            os.replace(stem + "-curve.csv.tmp", stem + "-curve.csv")
    return stem


def sweep(template, param, values, out_dir=None, workers=1):
    """One run per grid value; returns (records, rows) with rows
    (value, mean R*, sd, se, failures)."""
    values = list(values)
    if not values:
        raise ValueError("empty parameter grid")
    records, rows = [], []
    for v in values:
        try:
            rec = run(template.but(**{param: v}), out_dir=out_dir, workers=workers)
            records.append(rec)
            rows.append((v, rec.rstar_mean, rec.rstar_sd, rec.rstar_se, rec.shortfall))
        except Exception as exc:
            log.warning("sweep point %s=%r failed: %s", param, v, exc)
            records.append(None)
            rows.append((v, float("nan"), float("nan"), float("nan"), template.replicates))
    if out_dir is not None:
        lines = [f"# template: {template.fingerprint()}", f"# version: {__version__}",
                 f"{param},mean_rstar,sd,se,failures"]
        lines += [",".join(repr(x) if isinstance(x, float) else str(x) for x in row)
                  for row in rows]
        _atomic_write(os.path.join(out_dir, f"sweep-{param}-{template.fingerprint()}.csv"),
                      "\n".join(lines) + "\n")
    return records, rows
