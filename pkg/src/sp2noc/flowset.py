"""Flows, flow sets and their contention structure.

Flows inside a :class:`FlowSet` are addressed by their 0-based position,
which is also their priority rank (position 0 is the highest priority).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, wraps
from typing import Iterable, Optional

from .topology import Coord, Path, Topology


@dataclass(frozen=True)
class Flow:
    id: str
    priority: int
    flits: int
    period: int
    deadline: int
    path: Path
    source: Optional[Coord] = None
    dest: Optional[Coord] = None

    def __post_init__(self):
        if self.priority < 1:
            raise ValueError(f"{self.id}: priority must be a positive integer")
        if self.flits < 1:
            raise ValueError(f"{self.id}: a message carries at least one flit")
        if self.period < 1 or self.deadline < 1:
            raise ValueError(f"{self.id}: period and deadline must be positive")

    @property
    def eta(self) -> int:
        return self.path.eta

    @property
    def c_hat(self) -> int:
        return effective_time(self)

    @cached_property
    def link_set(self) -> frozenset[str]:
        return frozenset(self.path.links)

    @property
    def constrained(self) -> bool:
        return self.deadline <= self.period


def effective_time(flow: Flow) -> int:
    """Cycles a message needs with all of its links granted: C + eta - 1."""
    return flow.flits + flow.path.eta - 1


@dataclass(frozen=True)
class FlowSet:
    topology: Topology
    flows: tuple[Flow, ...]

    def __init__(self, topology: Topology, flows: Iterable[Flow]):
        ordered = tuple(sorted(flows, key=lambda f: f.priority))
        prios = [f.priority for f in ordered]
        if len(set(prios)) != len(prios):
            raise ValueError("flow priorities must be unique")
        ids = [f.id for f in ordered]
        if len(set(ids)) != len(ids):
            raise ValueError("flow ids must be unique")
        for f in ordered:
            topology.make_path(f.path.links)
        object.__setattr__(self, "topology", topology)
        object.__setattr__(self, "flows", ordered)
        object.__setattr__(self, "_memo", {})

    def __len__(self) -> int:
        return len(self.flows)

    def __getitem__(self, i: int) -> Flow:
        return self.flows[i]

    def __iter__(self):
        return iter(self.flows)

    def index(self, flow_id: str) -> int:
        for i, f in enumerate(self.flows):
            if f.id == flow_id:
                return i
        raise KeyError(flow_id)

    def check_constrained(self) -> None:
        for f in self.flows:
            if not f.constrained:
                raise ValueError(f"{f.id}: deadline {f.deadline} exceeds period {f.period}")


def _memoized(fn):
    # flow sets are immutable, so per-instance results never go stale
    @wraps(fn)
    def wrapper(fs: FlowSet, i: int) -> frozenset[int]:
        key = (fn.__name__, i)
        if key not in fs._memo:
            fs._memo[key] = fn(fs, i)
        return fs._memo[key]

    return wrapper


@_memoized
def share_set(fs: FlowSet, i: int) -> frozenset[int]:
    """Higher-priority flows sharing at least one (directed) link with flow ``i``."""
    mine = fs[i].link_set
    return frozenset(j for j in range(i) if not fs[j].link_set.isdisjoint(mine))


@_memoized
def ss_set(fs: FlowSet, i: int) -> frozenset[int]:
    """Flows that can appear self-suspended on the path of flow ``i``.

    A member ``l`` of the share set qualifies when some flow contending
    with ``l`` does not touch the path of ``i`` at all.
    """
    mine = fs[i].link_set
    return frozenset(
        l for l in share_set(fs, i)
        if any(fs[n].link_set.isdisjoint(mine) for n in share_set(fs, l))
    )


@_memoized
def share1_set(fs: FlowSet, k: int) -> frozenset[int]:
    """share_k minus the members whose own share set lies entirely within share_k.

    Evaluated as plain set algebra on share sets, without looking at paths
    directly, so it can serve as a cross-check for :func:`ss_set`.
    """
    share_k = share_set(fs, k)
    covered = {l for l in share_k if not (share_set(fs, l) - share_k)}
    return share_k - covered
