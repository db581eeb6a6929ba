import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from sp2noc.cli import main
from sp2noc.experiment import OUTPUT_DIR_ENV, evaluate_instance, run_experiment
from sp2noc.generate import GeneratorParams, generate_flowset, max_link_utilization
from sp2noc.io import dump_flowset, flowset_from_dict, flowset_to_dict, load_flowset

DATA = Path(__file__).resolve().parents[1] / "src" / "sp2noc" / "data"
EXAMPLE1 = DATA / "example1.json"


def test_example1_fixture_paths(ex1):
    assert [f.path.links for f in ex1] == [
        ("R0.0>R0.1",), ("R0.0>R0.1", "R0.1>R0.2"), ("R0.1>R0.2", "R0.2>R1.2")]
    assert [f.flits for f in ex1] == [20, 19, 29]


def test_xy_default_and_pair_descriptors():
    doc = {"topology": {"type": "mesh", "rows": 3, "cols": 3},
           "flows": [{"id": "a", "priority": 1, "flits": 4, "period": 50, "deadline": 40,
                      "source": [0, 0], "dest": [2, 1]},
                     {"id": "b", "priority": 2, "flits": 4, "period": 50,
                      "path": [[[0, 1], [0, 2]], "R0.2>R1.2"]}]}
    fs = flowset_from_dict(doc)
    assert fs[0].path.links == ("R0.0>R0.1", "R0.1>R1.1", "R1.1>R2.1")
    assert fs[1].path.links == ("R0.1>R0.2", "R0.2>R1.2")
    assert fs[1].deadline == 50


@pytest.mark.parametrize("bad", [
    {"topology": {"type": "torus", "rows": 2, "cols": 2}, "flows": []},
    {"topology": {"type": "mesh", "rows": 2, "cols": 2},
     "flows": [{"id": "a", "priority": 1, "flits": 1, "period": 5, "source": [0, 0]}]},
    {"topology": {"type": "mesh", "rows": 2, "cols": 2},
     "flows": [{"id": "a", "priority": 1, "flits": 1, "period": 5, "source": [1, 1],
                "dest": [0, 1], "path": ["R0.0>R0.1"]}]},
])
def test_bad_documents(bad):
    with pytest.raises(ValueError):
        flowset_from_dict(bad)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 12))
def test_round_trip(seed, n):
    fs = generate_flowset(GeneratorParams(n_flows=n, seed=seed))
    assert flowset_from_dict(json.loads(json.dumps(flowset_to_dict(fs)))) == fs


def test_file_round_trip(tmp_path, ex1):
    dump_flowset(ex1, tmp_path / "x.json")
    assert load_flowset(tmp_path / "x.json") == ex1


def test_generator_contract():
    assert len(generate_flowset(GeneratorParams(n_flows=0))) == 0
    assert generate_flowset(GeneratorParams(seed=9)) == generate_flowset(GeneratorParams(seed=9))
    with pytest.raises(ValueError):
        generate_flowset(GeneratorParams(rows=1, cols=2, n_flows=3))
    with pytest.raises(ValueError):
        GeneratorParams(deadline_min=0.0)


def test_generated_sets_are_valid():
    for seed in range(100):
        fs = generate_flowset(GeneratorParams(rows=4, cols=4, n_flows=8, seed=seed))
        assert len(fs) == 8
        fs.check_constrained()
        pairs = {(f.source, f.dest) for f in fs}
        assert len(pairs) == 8
        for f in fs:
            assert f.deadline >= f.c_hat
            assert f.source != f.dest
        ds = [f.deadline for f in fs]
        assert ds == sorted(ds)
        assert [f.priority for f in fs] == list(range(1, 9))


def test_max_link_utilization(ex1):
    assert max_link_utilization(ex1) == pytest.approx((20 + 30) / 200)


def test_experiment_example1(tmp_path):
    cfg = {"flowsets": [str(EXAMPLE1)], "sporadic_runs": 3}
    report = run_experiment(cfg)
    [inst] = report.instances
    assert [f.r_sp2 for f in inst.analysis.flows] == [20, 40, 50]
    assert sum(inst.misses.values()) == 0 and report.ok
    assert inst.max_response == {"f1": 20, "f2": 40, "f3": 50}


def test_experiment_zero_seeds():
    report = run_experiment({"seeds": 0})
    assert report.instances == [] and report.ok
    assert report.summary()["instances"] == 0


def test_experiment_reproducible_and_written(tmp_path):
    cfg = {"seeds": [1, 2, 3], "generator": {"n_flows": 6}, "sporadic_runs": 2}
    a, b = run_experiment(cfg), run_experiment(cfg)
    a.write(tmp_path / "a")
    b.write(tmp_path / "b")
    for name in ("flows.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["instances"] == 3 and summary["ok"]
    assert sum(b["instances"] for b in summary["bins"]) == 3


def test_experiment_parallel_matches_serial():
    cfg = {"seeds": 3, "seed_base": 40, "sporadic_runs": 1}
    serial = run_experiment(cfg).flows_csv()
    assert run_experiment({**cfg, "workers": 2}).flows_csv() == serial


def test_sufficiency_sweep_small():
    cfg = {"seeds": 30, "sporadic_runs": 5}
    report = run_experiment(cfg)
    t = report.totals()
    assert t["dominance_violations"] == t["sufficiency_violations"] == t["invariant_violations"] == 0


def test_instance_detects_planted_unsafe_bound(ex1, monkeypatch):
    # a bound smaller than reality must be reported as a sufficiency violation
    from sp2noc import experiment
    from sp2noc.rta import analyze_all as real

    def optimistic(fs, **kw):
        res = real(fs, **kw)
        res.flows[2].r_sp2 = 45
        return res

    monkeypatch.setattr(experiment, "analyze_all", optimistic)
    inst = evaluate_instance("x", ex1, sporadic_runs=0)
    assert inst.sufficiency_violations


# CLI


def test_cli_enumerate(capsys):
    assert main(["enumerate", "--flits", "10", "--links", "3"]) == 0
    assert capsys.readouterr().out.strip() == "min=12,max=30"
    assert main(["enumerate", "--flits", "2", "--links", "2", "--count"]) == 0
    assert capsys.readouterr().out.strip() == "min=3,max=4,count=3"
    assert main(["enumerate", "--flits", "9", "--links", "4", "--budget", "10"]) == 2


def test_cli_usage_errors(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    assert main(["analyze", "/nonexistent.json"]) == 2


def test_cli_analyze(capsys):
    assert main(["analyze", str(EXAMPLE1)]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].startswith("flow_id,eta,c_hat,R_sp2")
    assert [r.split(",")[3] for r in rows[1:]] == ["20", "40", "50"]


def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "trace.txt"
    assert main(["simulate", str(EXAMPLE1), "--horizon", "60", "--releases", "sync",
                 "--out", str(out)]) == 0
    assert "E,50,complete,f3" in out.read_text().splitlines()
    for mode in ("periodic", "sporadic"):
        assert main(["simulate", str(EXAMPLE1), "--horizon", "500", "--releases", mode,
                     "--seed", "4"]) == 0
    assert main(["simulate", str(EXAMPLE1), "--horizon", "10", "--releases", "nope"]) == 2


def test_cli_generate_and_experiment(tmp_path, capsys, monkeypatch):
    target = tmp_path / "gen.json"
    assert main(["generate", "--out", str(target), "--n-flows", "5", "--seed", "7"]) == 0
    assert load_flowset(target) == generate_flowset(GeneratorParams(n_flows=5, seed=7))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"flowsets": ["gen.json"], "sporadic_runs": 2}))
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "envout"))
    assert main(["experiment", str(cfg)]) == 0
    assert (tmp_path / "envout" / "summary.json").exists()
    assert main(["experiment", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "flows.csv").exists()
