"""Random flow sets on a mesh with XY routes and deadline-monotonic priorities."""
from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

from .flowset import Flow, FlowSet
from .topology import build_mesh, xy_route


@dataclass(frozen=True)
class GeneratorParams:
    rows: int = 4
    cols: int = 4
    n_flows: int = 8
    flits_min: int = 1
    flits_max: int = 48
    period_min: int = 30
    period_max: int = 300
    deadline_min: float = 0.5
    deadline_max: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_flows < 0:
            raise ValueError("n_flows must be non-negative")
        if not 1 <= self.flits_min <= self.flits_max:
            raise ValueError("need 1 <= flits_min <= flits_max")
        if not 1 <= self.period_min <= self.period_max:
            raise ValueError("need 1 <= period_min <= period_max")
        if not 0 < self.deadline_min <= self.deadline_max <= 1:
            raise ValueError("deadline factors must satisfy 0 < min <= max <= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def generate_flowset(p: GeneratorParams) -> FlowSet:
    topo = build_mesh(p.rows, p.cols, with_core_links=True)
    coords = sorted(topo.routers.values())
    pairs = [(a, b) for a in coords for b in coords if a != b]
    if p.n_flows > len(pairs):
        raise ValueError(f"{p.n_flows} flows exceed the {len(pairs)} distinct router pairs")
    rng = random.Random(p.seed)
    chosen = rng.sample(pairs, p.n_flows)
    drafts = []
    for n, (src, dst) in enumerate(chosen):
        path = xy_route(topo, src, dst)
        flits = rng.randint(p.flits_min, p.flits_max)
        c_hat = flits + path.eta - 1
        period = round(math.exp(rng.uniform(math.log(p.period_min), math.log(p.period_max))))
        period = max(period, c_hat)
        factor = rng.uniform(p.deadline_min, p.deadline_max)
        deadline = min(period, max(c_hat, math.floor(factor * period)))
        drafts.append((deadline, n, flits, period, path, src, dst))
    flows = []
    for prio, (deadline, n, flits, period, path, src, dst) in enumerate(sorted(drafts), 1):
        flows.append(Flow(f"f{n}", prio, flits, period, deadline, path, src, dst))
    return FlowSet(topo, flows)


def max_link_utilization(fs: FlowSet) -> float:
    """Largest sum of Chat/T over the flows crossing any single link."""
    load: dict[str, float] = {}
    for f in fs:
        for l in f.path.links:
            load[l] = load.get(l, 0.0) + f.c_hat / f.period
    return max(load.values(), default=0.0)
