import json
import os

import numpy as np
import pytest

from vorproc.geometry import build_tessellation, read_points
from vorproc.harness import (
    CHECKS,
    ExperimentPlan,
    derive_seed,
    edge_study,
    oracle,
    rng_for,
    run,
    sweep,
)
import importlib

run_mod = importlib.import_module("vorproc.harness.run")
from vorproc.harness.cli import main
from vorproc.stats import included_ids, thiel_redundancy

SMALL = dict(n_points=200, steps_per_point=2, replicates=3, seed=11)


def test_plan_validation_and_round_trip(tmp_path):
    with pytest.raises(ValueError):
        ExperimentPlan(replicates=0)
    with pytest.raises(ValueError):
        ExperimentPlan(steps_per_point=-1)
    with pytest.raises(ValueError):
        ExperimentPlan(process="n", selection="nope")
    with pytest.raises(ValueError):
        ExperimentPlan(process="n", domain="torus")
    p = ExperimentPlan(process="n", selection="anti-6", **SMALL)
    p.save(tmp_path / "p.json")
    q = ExperimentPlan.load(tmp_path / "p.json")
    assert q == p and q.fingerprint() == p.fingerprint()
    assert p.but(seed=12).fingerprint() != p.fingerprint()
    with pytest.raises(ValueError):
        ExperimentPlan.from_dict({"bogus": 1})


def test_seed_derivation_distinct():
    seeds = {derive_seed(0, r, role) for r in range(20) for role in ("init", "dynamics", "aipp")}
    assert len(seeds) == 60
    assert derive_seed(5, 3, "init") == derive_seed(5, 3, "init")
    assert rng_for(5, 3, "init").random() == rng_for(5, 3, "init").random()


def test_csr_single_replicate_is_raw_pattern():
    plan = ExperimentPlan(process="csr", n_points=300, replicates=1, steps_per_point=0,
                          seed=4, stats=("rstar",))
    rec = run(plan)
    pts = rng_for(4, 0, "init").random((300, 2))
    t = build_tessellation(pts, "square")
    assert rec.rstar_mean == thiel_redundancy(t.areas[included_ids(t, 3)])
    assert rec.n_ok == 1 and rec.shortfall == 0


def test_standard_error_algebra():
    rec = run(ExperimentPlan(process="v", alpha=0.5, stats=("rstar",), **SMALL))
    rs = rec.rstars
    assert len(rs) == 3
    assert rec.rstar_se == rs.std(ddof=1) / np.sqrt(3)
    assert rec.rstar_mean == pytest.approx(rs[::-1].mean(), abs=1e-15)


def test_end_to_end_determinism(tmp_path):
    plan = ExperimentPlan(process="n", selection="vanilla", **SMALL)
    outs = []
    for k in range(2):
        d = tmp_path / f"o{k}"
        run(plan, out_dir=str(d), fmt="csv")
        outs.append({f: (d / f).read_bytes() for f in sorted(os.listdir(d))})
    assert outs[0] == outs[1]
    stem = f"n-{plan.fingerprint()}"
    files = outs[0]
    assert f"{stem}.json" in files and f"{stem}-curve.csv" in files
    doc = json.loads(files[f"{stem}.json"])
    assert doc["fingerprint"] == plan.fingerprint() and doc["version"]
    assert files[f"{stem}-curve.csv"].startswith(f"# fingerprint: {plan.fingerprint()}".encode())
    pts = read_points(tmp_path / "o0" / f"{stem}-rep000.txt")
    assert pts.shape == (200, 2)


def test_workers_match_serial():
    plan = ExperimentPlan(process="v", alpha=-0.5, stats=("rstar", "epmf"), **SMALL)
    a = run(plan, workers=1)
    b = run(plan, workers=2)
    assert np.array_equal(a.rstars, b.rstars)


def test_replicate_failure_isolated(monkeypatch):
    real = run_mod.simulate_pattern

    def flaky(plan, replicate, aipp_beta=None):
        if replicate == 1:
            raise RuntimeError("injected")
        return real(plan, replicate, aipp_beta)

    monkeypatch.setattr(run_mod, "simulate_pattern", flaky)
    rec = run(ExperimentPlan(process="csr", stats=("rstar",), **SMALL))
    assert rec.n_ok == 2 and rec.shortfall == 1
    assert "injected" in rec.replicates[1].error
    assert np.isfinite(rec.rstar_mean)


def test_circle_plan_gamma_shape():
    plan = ExperimentPlan(process="v", alpha=0.0, domain="circle", n_points=300,
                          steps_per_point=5, replicates=4, stats=("rstar", "gamma"))
    rec = run(plan)
    assert 1.5 < rec.gamma_shape < 2.5


def test_sweep_rows_and_empty_grid(tmp_path):
    tpl = ExperimentPlan(process="v", domain="circle", n_points=100, steps_per_point=3,
                         replicates=2, stats=("rstar",))
    recs, rows = sweep(tpl, "alpha", [-1.0, 0.5], out_dir=str(tmp_path))
    assert [r[0] for r in rows] == [-1.0, 0.5] and len(recs) == 2
    assert rows[0][1] < rows[1][1]
    csv = [f for f in os.listdir(tmp_path) if f.startswith("sweep-")]
    assert len(csv) == 1
    with pytest.raises(ValueError):
        sweep(tpl, "alpha", [])


def test_sweep_isolates_point_failures():
    tpl = ExperimentPlan(process="v", domain="circle", n_points=50, steps_per_point=1,
                         replicates=2, stats=("rstar",))
    recs, rows = sweep(tpl, "domain", ["circle", "sphere"])
    assert recs[1] is None and np.isnan(rows[1][1])
    assert np.isfinite(rows[0][1])


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_oracle_checks_pass(name):
    rep = oracle(name, seed=3)
    assert rep.passed, rep.detail


def test_oracle_unknown_and_failure_serialises(monkeypatch):
    with pytest.raises(KeyError):
        oracle("no-such-check")
    om = importlib.import_module("vorproc.harness.oracle")
    monkeypatch.setattr(om, "monte_carlo_areas",
                        lambda pts, kind, seed=0: np.full(len(pts), 1.0 / len(pts)) + 0.01)
    rep = oracle("cell-areas", size=10, seed=0)
    assert not rep.passed
    doc = json.loads(rep.to_json())
    assert len(doc["instance"]["points"]) == 10


def test_edge_study_synthetic():
    same = np.full((4, 3, 5), 0.14)
    st = edge_study(["vanilla", "anti-few", "anti-many"], responses=same)
    s = st.summary()
    assert not (s["depth_significant"] or s["selection_significant"]
                or s["interaction_significant"])
    rng = np.random.default_rng(0)
    cube = 0.14 + 0.001 * rng.standard_normal((4, 3, 5))
    cube[0] += 0.02  # only the boundary layer differs
    st = edge_study(["vanilla", "anti-few", "anti-many"], responses=cube)
    assert st.summary()["depth_significant"]
    assert st.summary()["depth_classes_differing"] == [1]
    with pytest.raises(ValueError):
        edge_study(["vanilla"], responses=same[:, :1])
    with pytest.raises(ValueError):
        edge_study(["vanilla", "anti-few"], responses=same)


# CLI

def test_cli_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["simulate", "--process", "csr", "--n-points", "100", "--replicates", "2",
                 "--out-dir", out, "--format", "csv"]) == 0
    assert main(["simulate", "--process", "n", "--domain", "torus", "--out-dir", out]) == 2
    assert main(["simulate", "--process", "n", "--selection", "pro-9", "--out-dir", out]) == 2
    assert main(["sweep", "--process", "v", "--values", "", "--out-dir", out]) == 2
    assert main(["oracle", "nope"]) == 2
    assert main(["oracle", "anova"]) == 0
    assert main(["stats", str(tmp_path / "missing"), "--out-dir", out]) == 2


def test_cli_oracle_mismatch_exit(monkeypatch, tmp_path):
    om = importlib.import_module("vorproc.harness.oracle")
    monkeypatch.setattr(om, "direct_anova_ss", lambda cube: {"A": -1.0})
    monkeypatch.setitem(om.CHECKS, "anova", om._anova)
    assert main(["oracle", "anova", "--out-dir", str(tmp_path)]) == 3
    assert any(f.startswith("oracle-anova") for f in os.listdir(tmp_path))


def test_cli_simulate_then_stats(tmp_path, capsys):
    sim = tmp_path / "sim"
    assert main(["simulate", "--process", "v", "--alpha", "0.5", "--n-points", "150",
                 "--steps-per-point", "2", "--replicates", "2", "--seed", "5",
                 "--out-dir", str(sim), "--step-stream"]) == 0
    first = json.loads(capsys.readouterr().out)
    files = os.listdir(sim)
    assert any(f.endswith("-manifest.txt") for f in files)
    steps = [f for f in files if f.endswith("-steps.jsonl")][0]
    assert len((sim / steps).read_text().splitlines()) == 300
    manifest = [f for f in files if f.endswith("-manifest.txt")][0]
    assert "seed: 5" in (sim / manifest).read_text()
    assert main(["stats", str(sim), "--process", "v", "--alpha", "0.5",
                 "--out-dir", str(tmp_path / "st")]) == 0
    again = json.loads(capsys.readouterr().out)
    assert again["rstar_mean"] == pytest.approx(first["rstar_mean"], rel=1e-12)


def test_cli_aipp(tmp_path, capsys):
    assert main(["aipp", "--gamma1", "1.0", "--beta", "100", "--n-points", "100",
                 "--burnin", "5000", "--seed", "2", "--out-dir", str(tmp_path)]) == 0
    files = os.listdir(tmp_path)
    assert any(f.endswith("-diagnostics.json") for f in files)
    assert any(f.endswith("-manifest.json") for f in files)
