"""Seeded experiment sweeps: generate, analyze, simulate, cross-check.

A config is a JSON object. Either ``flowsets`` (list of flow-set files,
relative to the config) or ``seeds`` plus ``generator`` must be given::

    {"seeds": 100, "seed_base": 0,
     "generator": {"rows": 4, "cols": 4, "n_flows": 8},
     "sporadic_runs": 20, "jitter_fraction": 0.25,
     "horizon_factor": 2, "horizon_cap": 1000000,
     "suspension_checks": true, "workers": 1, "out_dir": "out"}
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .flowset import FlowSet, ss_set
from .generate import GeneratorParams, generate_flowset, max_link_utilization
from .io import load_flowset
from .rta import AnalysisResult, analyze_all, dominance_check
from .sim import (check_trace, lambda_suspensions, simulate, sporadic_releases,
                  synchronous_releases)

OUTPUT_DIR_ENV = "SP2NOC_OUTPUT_DIR"
BIN_WIDTH = 0.1

DEFAULTS = {
    "seed_base": 0,
    "sporadic_runs": 20,
    "jitter_fraction": 0.25,
    "horizon_factor": 2,
    "horizon_cap": 1_000_000,
    "suspension_checks": True,
    "dominance_samples": 256,
    "workers": 1,
}


@dataclass
class InstanceResult:
    key: str
    utilization: float
    analysis: AnalysisResult
    horizon: int
    runs: int = 0
    misses: dict[str, int] = field(default_factory=dict)
    max_response: dict[str, int] = field(default_factory=dict)
    dominance_violations: list[str] = field(default_factory=list)
    sufficiency_violations: list[str] = field(default_factory=list)
    invariant_violations: list[str] = field(default_factory=list)
    model_violations: int = 0


@dataclass
class ExperimentReport:
    instances: list[InstanceResult] = field(default_factory=list)

    def totals(self) -> dict[str, int]:
        return {
            "instances": len(self.instances),
            "simulation_runs": sum(r.runs for r in self.instances),
            "dominance_violations": sum(len(r.dominance_violations) for r in self.instances),
            "sufficiency_violations": sum(len(r.sufficiency_violations) for r in self.instances),
            "invariant_violations": sum(len(r.invariant_violations) for r in self.instances),
            "model_violations": sum(r.model_violations for r in self.instances),
            "deadline_misses": sum(sum(r.misses.values()) for r in self.instances),
        }

    @property
    def ok(self) -> bool:
        t = self.totals()
        return not (t["dominance_violations"] or t["sufficiency_violations"]
                    or t["invariant_violations"])

    def bins(self) -> list[dict]:
        """Schedulability ratios per bin of most-loaded-link utilization."""
        acc: dict[int, list[int]] = {}
        for r in self.instances:
            b = int(r.utilization // BIN_WIDTH)
            row = acc.setdefault(b, [0, 0, 0])
            row[0] += 1
            row[1] += r.analysis.schedulable_sp2
            row[2] += r.analysis.schedulable_baseline
        out = []
        for b in sorted(acc):
            n, s, base = acc[b]
            out.append({"util_lo": round(b * BIN_WIDTH, 10), "util_hi": round((b + 1) * BIN_WIDTH, 10),
                        "instances": n, "schedulable_sp2": s, "schedulable_baseline": base,
                        "ratio_sp2": s / n, "ratio_baseline": base / n})
        return out

    def summary(self) -> dict:
        return {**self.totals(), "ok": self.ok, "bins": self.bins()}

    def flows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "flow_id", "eta", "c_hat", "R_sp2", "R_baseline",
                    "schedulable_sp2", "schedulable_baseline", "max_response", "misses"])
        for r in self.instances:
            for f in r.analysis.flows:
                w.writerow([r.key, f.flow_id, f.eta, f.c_hat,
                            "" if f.r_sp2 is None else f.r_sp2,
                            "" if f.r_baseline is None else f.r_baseline,
                            int(f.schedulable_sp2), int(f.schedulable_baseline),
                            r.max_response.get(f.flow_id, ""), r.misses.get(f.flow_id, 0)])
        return buf.getvalue()

    def write(self, out_dir: Union[str, Path]) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "flows.csv").write_text(self.flows_csv(), encoding="utf-8")
        (out / "summary.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")


def horizon_for(fs: FlowSet, factor: float = 2, cap: int = 1_000_000) -> int:
    if not len(fs):
        return 1
    return max(1, min(cap, int(factor * max(f.period for f in fs))))


def evaluate_instance(key: str, fs: FlowSet, seed: int = 0, **options) -> InstanceResult:
    """Analyze one flow set and cross-check the bounds against simulated schedules."""
    opts = {**DEFAULTS, **options}
    analysis = analyze_all(fs)
    horizon = horizon_for(fs, opts["horizon_factor"], opts["horizon_cap"])
    res = InstanceResult(key, max_link_utilization(fs), analysis, horizon)
    res.dominance_violations = dominance_check(fs, samples=opts["dominance_samples"],
                                               result=analysis).violations
    bounds = analysis.r_sp2()
    index = {f.id: i for i, f in enumerate(fs)}
    patterns = [("sync", synchronous_releases(fs, horizon))]
    for r in range(opts["sporadic_runs"]):
        patterns.append((f"sporadic{r}", sporadic_releases(
            fs, horizon, seed * 1_000_003 + r + 1, opts["jitter_fraction"])))
    ss = [ss_set(fs, i) for i in range(len(fs))]

    for name, rel in patterns:
        trace = simulate(fs, rel, horizon)
        res.runs += 1
        if not trace.valid:
            res.model_violations += 1
        for v in check_trace(trace, fs):
            res.invariant_violations.append(f"{name}: t={v.t} {v.kind} {v.flow_id} {v.detail}")
        for e in trace.misses():
            res.misses[e.flow_id] = res.misses.get(e.flow_id, 0) + 1
            if index[e.flow_id] in bounds:
                res.sufficiency_violations.append(f"{name}: {e.flow_id} missed at t={e.t}")
        for fid, release, done in trace.responses():
            if done is not None:
                res.max_response[fid] = max(res.max_response.get(fid, 0), done - release)
            bound = bounds.get(index[fid])
            if bound is None:
                continue
            if (done is not None and done - release > bound) or \
                    (done is None and release + bound <= horizon):
                res.sufficiency_violations.append(
                    f"{name}: {fid} released at {release} exceeded bound {bound}")
        if opts["suspension_checks"]:
            for i, per_j in lambda_suspensions(trace, fs).items():
                for j, windows in per_j.items():
                    if j not in ss[i]:
                        res.invariant_violations.append(
                            f"{name}: {fs[j].id} self-suspended on path of {fs[i].id} "
                            "but is not in its SS set")
                    if j in bounds:
                        budget = bounds[j] - fs[j].c_hat
                        for release, cycles in windows.items():
                            if cycles > budget:
                                res.invariant_violations.append(
                                    f"{name}: {fs[j].id}@{release} suspended {cycles} cycles "
                                    f"on path of {fs[i].id}, budget {budget}")
    return res


def _generated(args) -> InstanceResult:
    seed, gen, opts = args
    fs = generate_flowset(GeneratorParams(**{**gen, "seed": seed}))
    return evaluate_instance(f"seed{seed}", fs, seed=seed, **opts)


def _from_file(args) -> InstanceResult:
    path, opts = args
    return evaluate_instance(Path(path).stem, load_flowset(path), **opts)


def run_experiment(config: dict, base_dir: Optional[Union[str, Path]] = None) -> ExperimentReport:
    opts = {k: config.get(k, v) for k, v in DEFAULTS.items()}
    workers = opts.pop("workers")
    seed_base = opts.pop("seed_base")
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    if config.get("flowsets"):
        jobs = [(str(base / p), opts) for p in config["flowsets"]]
        fn = _from_file
    else:
        seeds = config.get("seeds", 0)
        seeds = list(range(seed_base, seed_base + seeds)) if isinstance(seeds, int) else list(seeds)
        gen = dict(config.get("generator", {}))
        gen.pop("seed", None)
        jobs = [(s, gen, opts) for s in seeds]
        fn = _generated

    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, jobs))
    else:
        results = [fn(j) for j in jobs]
    return ExperimentReport(results)


def default_output_dir(config: dict, base_dir: Path) -> Path:
    if config.get("out_dir"):
        return base_dir / config["out_dir"]
    return Path(os.environ.get(OUTPUT_DIR_ENV, "sp2noc-out"))
