"""Command-line entry point: vorproc {simulate,sweep,aipp,stats,oracle,edge-study}."""
import argparse
import glob
import json
import logging
import os
import sys

import numpy as np

from .. import __version__
from ..geometry import read_points
from .plan import ExperimentPlan, rng_for

EXIT_OK, EXIT_PRECONDITION, EXIT_MISMATCH = 0, 2, 3

_PLAN_FLAGS = {
    "process": dict(choices=["v", "n", "aipp", "csr"]),
    "alpha": dict(type=float),
    "selection": dict(),
    "gamma1": dict(type=float),
    "n_points": dict(type=int),
    "steps_per_point": dict(type=float),
    "replicates": dict(type=int),
    "seed": dict(type=int),
    "domain": dict(choices=["circle", "square", "torus"]),
    "depth_filter": dict(type=int),
}


class PreconditionError(Exception):
    pass


def _plan_args(p):
    p.add_argument("--plan", help="JSON plan file; flags override its fields")
    for name, kw in _PLAN_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, default=None, **kw)
    p.add_argument("--stats", help="comma-separated: rstar,epmf,j,pattern,gamma")
    p.add_argument("--aipp-beta", type=float, default=None)
    p.add_argument("--aipp-burnin", type=int, default=None)
    _out_args(p)


def _out_args(p):
    p.add_argument("--out-dir", default=".")
    p.add_argument("--format", choices=["csv", "json"], default="json")


def plan_from_args(a, **forced):
    base = ExperimentPlan.load(a.plan).to_dict() if a.plan else {}
    for name in _PLAN_FLAGS:
        v = getattr(a, name)
        if v is not None:
            base[name] = v
    if a.stats:
        base["stats"] = tuple(s.strip() for s in a.stats.split(",") if s.strip())
    if a.aipp_beta is not None:
        base["aipp_beta"] = a.aipp_beta
    if a.aipp_burnin is not None:
        base["aipp_burnin"] = a.aipp_burnin
    base.update(forced)
    if base.get("domain") == "circle" and "stats" not in base:
        base["stats"] = ("rstar", "gamma", "pattern")
    try:
        return ExperimentPlan.from_dict(base)
    except (TypeError, ValueError, KeyError) as exc:
        raise PreconditionError(str(exc)) from exc


def _summary(rec):
    return {"fingerprint": rec.fingerprint, "label": rec.plan.label(), "seed": rec.plan.seed,
            "rstar_mean": rec.rstar_mean, "rstar_sd": rec.rstar_sd, "rstar_se": rec.rstar_se,
            "replicates_ok": rec.n_ok, "shortfall": rec.shortfall,
            "gamma_shape": rec.gamma_shape, "aipp_beta": rec.aipp_beta}


def write_manifest(path, plan):
    spec = plan.selection_spec()
    lines = [f"version: {__version__}", f"fingerprint: {plan.fingerprint()}",
             f"domain: {plan.domain}", f"N: {plan.n_points}", f"T: {plan.steps}",
             f"selection: {spec}", f"seed: {plan.seed}",
             f"observer_periods: rstar={plan.observer_period}"]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_simulate(a):
    from ..dynamics import evolve, init_uniform, write_step_stream
    from .run import run

    plan = plan_from_args(a)
    os.makedirs(a.out_dir, exist_ok=True)
    rec = run(plan, out_dir=a.out_dir, workers=a.workers, fmt=a.format)
    stem = os.path.join(a.out_dir, f"{plan.process}-{plan.fingerprint()}")
    write_manifest(stem + "-manifest.txt", plan)
    if a.step_stream and plan.process in ("v", "n"):
        # replicate 0 replayed with step records; identical streams by construction
        st = init_uniform(plan.n_points, plan.domain, rng_for(plan.seed, 0, "init"),
                          plan.selection_spec())
        st.rng = rng_for(plan.seed, 0, "dynamics")
        _, evo = evolve(st, plan.steps, record_steps=True)
        write_step_stream(stem + "-steps.jsonl", evo.records)
    print(json.dumps(_summary(rec), indent=2))
    return EXIT_OK if rec.n_ok else EXIT_PRECONDITION


def _parse_values(s):
    if ":" in s:  # start:stop:step, stop inclusive
        a, b, c = (float(x) for x in s.split(":"))
        k = int(np.floor((b - a) / c + 1e-9)) + 1
        return [round(a + i * c, 12) for i in range(k)]
    out = []
    for v in s.split(","):
        v = v.strip()
        if not v:
            continue
        try:
            out.append(float(v))
        except ValueError:
            out.append(v)
    return out


def cmd_sweep(a):
    from .run import sweep

    plan = plan_from_args(a)
    values = _parse_values(a.values)
    if not values:
        raise PreconditionError("empty parameter grid")
    if a.param not in ExperimentPlan.__dataclass_fields__:
        raise PreconditionError(f"unknown plan parameter {a.param!r}")
    _, rows = sweep(plan, a.param, values, out_dir=a.out_dir, workers=a.workers)
    print(f"{a.param},mean_rstar,sd,se,failures")
    for row in rows:
        print(",".join(str(x) for x in row))
    return EXIT_OK


def cmd_aipp(a):
    from ..aipp import AippParams, sample, tune_beta
    from ..geometry import write_points
    from .plan import derive_seed

    params = AippParams(gamma1=a.gamma1, target_count=a.n_points, rho=a.rho,
                        clipped=a.clipped)
    beta = a.beta
    trace = []
    if beta is None:
        beta, trace = tune_beta(params, tolerance_fraction=a.tolerance,
                                seed=derive_seed(a.seed, 0, "tune"))
    params = params.with_beta(beta)
    pts, diag = sample(params, a.burnin, seed=derive_seed(a.seed, 0, "aipp"))
    os.makedirs(a.out_dir, exist_ok=True)
    stem = os.path.join(a.out_dir, f"aipp-g{a.gamma1:g}-s{a.seed}")
    write_points(stem + ".txt", pts, header=f"seed {a.seed}\nversion {__version__}")
    manifest = {"version": __version__, "seed": a.seed, "params": params.to_dict(),
                "burnin": a.burnin, "tuning_trace": [list(map(float, t)) for t in trace],
                "count": int(len(pts))}
    with open(stem + "-manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    with open(stem + "-diagnostics.json", "w") as fh:
        json.dump(diag.to_dict(), fh)
    print(json.dumps({"beta": beta, "count": int(len(pts)),
                      "acceptance_rate": diag.acceptance_rate, "warnings": diag.warnings}))
    return EXIT_OK


def cmd_stats(a):
    """Recompute statistics from saved pattern files."""
    from ..stats import default_r_grid
    from .run import Replicate, aggregate, replicate_stats, write_outputs

    files = sorted(glob.glob(os.path.join(a.patterns, "*-rep*.txt"))
                   if os.path.isdir(a.patterns) else glob.glob(a.patterns))
    if not files:
        raise PreconditionError(f"no pattern files under {a.patterns!r}")
    plan = plan_from_args(a, replicates=len(files), steps_per_point=0)
    reps, grid = [], None if plan.r_grid is None else np.array(plan.r_grid)
    for i, f in enumerate(files):
        pts = read_points(f)
        if grid is None and "j" in plan.stats and plan.domain != "circle":
            grid = default_r_grid(pts, plan.domain, plan.n_radii)
        try:
            rep = replicate_stats(plan.but(n_points=len(pts)), i, pts, None, grid)
        except Exception as exc:
            rep = Replicate(index=i, seed=plan.seed, error=f"{type(exc).__name__}: {exc}")
        rep.pattern_file = os.path.basename(f)
        reps.append(rep)
    rec = aggregate(plan, reps)
    rec.plan = plan.but(stats=tuple(s for s in plan.stats if s != "pattern"))
    write_outputs(rec, a.out_dir, a.format)
    print(json.dumps(_summary(rec), indent=2))
    return EXIT_OK


def cmd_oracle(a):
    from .oracle import CHECKS, oracle

    names = sorted(CHECKS) if a.check == "all" else [a.check]
    if any(n not in CHECKS for n in names):
        raise PreconditionError(f"unknown check {a.check!r}; choose from {sorted(CHECKS)}")
    worst = EXIT_OK
    for n in names:
        rep = oracle(n, a.size, a.seed)
        print(("PASS " if rep.passed else "FAIL ") + f"{n}: worst={rep.worst:.3g} "
              f"tol={rep.tolerance:g}")
        if not rep.passed:
            worst = EXIT_MISMATCH
            os.makedirs(a.out_dir, exist_ok=True)
            with open(os.path.join(a.out_dir, f"oracle-{n}-seed{a.seed}.json"), "w") as fh:
                fh.write(rep.to_json())
    return worst


def cmd_edge(a):
    from .edge import edge_study

    sels = [s.strip() for s in a.selections.split(",") if s.strip()]
    classes = tuple(int(c) for c in a.depth_classes.split(","))
    try:
        st = edge_study(sels, classes, a.replicates, n_points=a.n_points,
                        steps_per_point=a.steps_per_point, seed=a.seed)
    except (ValueError, KeyError) as exc:
        raise PreconditionError(str(exc)) from exc
    os.makedirs(a.out_dir, exist_ok=True)
    st.table.to_csv(os.path.join(a.out_dir, f"edge-anova-seed{a.seed}.csv"))
    out = st.summary()
    out.update({"seed": a.seed, "version": __version__, "selections": list(st.selections),
                "depth_classes": list(st.depth_classes),
                "contrast_p": {str(k): v for k, v in st.contrast_p.items()}})
    with open(os.path.join(a.out_dir, f"edge-summary-seed{a.seed}.json"), "w") as fh:
        json.dump(out, fh, indent=2)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="vorproc", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run every replicate of one plan")
    _plan_args(s)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--step-stream", action="store_true",
                   help="also write replicate 0's step records as JSON lines")
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("sweep", help="one run per value of a plan parameter")
    _plan_args(s)
    s.add_argument("--param", default="alpha")
    s.add_argument("--values", required=True, help="comma list or start:stop:step")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(fn=cmd_sweep)

    s = sub.add_parser("aipp", help="tune beta and sample one area-interaction pattern")
    s.add_argument("--gamma1", type=float, default=1.5)
    s.add_argument("--n-points", type=int, default=2000, help="target mean count")
    s.add_argument("--beta", type=float, default=None, help="skip tuning")
    s.add_argument("--rho", type=float, default=0.01)
    s.add_argument("--tolerance", type=float, default=0.02)
    s.add_argument("--burnin", type=int, default=2_000_000)
    s.add_argument("--clipped", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    _out_args(s)
    s.set_defaults(fn=cmd_aipp)

    s = sub.add_parser("stats", help="recompute statistics from saved patterns")
    s.add_argument("patterns", help="directory of *-repNNN.txt files or a glob")
    _plan_args(s)
    s.set_defaults(fn=cmd_stats)

    s = sub.add_parser("oracle", help="brute-force cross-check of an engine")
    s.add_argument("check", help="check name or 'all'")
    s.add_argument("--size", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", default=".")
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("edge-study", help="ANOVA of R* by NN-depth class and selection")
    s.add_argument("--selections", default="vanilla,anti-few,anti-many")
    s.add_argument("--depth-classes", default="1,2,3,4")
    s.add_argument("--replicates", type=int, default=5)
    s.add_argument("--n-points", type=int, default=2000)
    s.add_argument("--steps-per-point", type=float, default=12)
    s.add_argument("--seed", type=int, default=0)
    _out_args(s)
    s.set_defaults(fn=cmd_edge)
    return p


def main(argv=None):
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.fn(a)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
