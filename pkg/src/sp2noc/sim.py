"""Cycle-accurate fixed-priority SP2 arbitration.

Each cycle, active messages are visited in priority order and a message is
granted iff none of its links was claimed by a message granted before it;
a granted message claims every link on its path, even links that carry no
flit this cycle. A message needs ``C + eta - 1`` granted cycles.

Arbitration only changes when a message is released or completes, so
:func:`simulate` evaluates :func:`arbitrate_cycle` at those instants and
holds the grant set in between. The resulting trace is stored as maximal
runs of identical link assignments and expands to a per-cycle view on
demand.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .flowset import FlowSet

IDLE = "-"

_KIND_ORDER = {"complete": 0, "miss": 1, "release": 2, "violation": 3}


@dataclass(frozen=True)
class ReleasePattern:
    """Absolute release times (cycles), one sorted tuple per flow index."""

    times: tuple[tuple[int, ...], ...]

    def validate(self, fs: FlowSet) -> None:
        if len(self.times) != len(fs):
            raise ValueError("release pattern does not match the flow set")
        for f, ts in zip(fs, self.times):
            for a, b in zip(ts, ts[1:]):
                if b - a < f.period:
                    raise ValueError(f"{f.id}: releases {a} and {b} closer than T={f.period}")


def synchronous_releases(fs: FlowSet, horizon: int) -> ReleasePattern:
    return periodic_releases(fs, horizon, [0] * len(fs))


def periodic_releases(fs: FlowSet, horizon: int, offsets: Sequence[int]) -> ReleasePattern:
    return ReleasePattern(tuple(tuple(range(o, horizon, f.period)) for f, o in zip(fs, offsets)))


def sporadic_releases(fs: FlowSet, horizon: int, seed: int,
                      jitter_fraction: float = 0.25) -> ReleasePattern:
    """Random first release in [0, T), then gaps of T plus geometric jitter.

    The jitter has mean ``jitter_fraction * T``.
    """
    rng = random.Random(seed)
    out = []
    for f in fs:
        t = rng.randrange(f.period)
        mean = jitter_fraction * f.period
        p = 1.0 / (1.0 + mean)
        ts = []
        while t < horizon:
            ts.append(t)
            extra = 0
            if p < 1.0:
                extra = int(math.log(1.0 - rng.random()) / math.log(1.0 - p))
            t += f.period + extra
        out.append(tuple(ts))
    return ReleasePattern(tuple(out))


@dataclass
class MessageState:
    flow: int
    release: int
    remaining: int
    completion: Optional[int] = None


@dataclass(frozen=True)
class Event:
    t: int
    kind: str
    flow_id: str


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    assignment: tuple[tuple[str, str], ...]  # sorted (link, flow id) pairs

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self.assignment)


@dataclass
class ScheduleTrace:
    horizon: int
    links: tuple[str, ...]
    segments: list[Segment] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not any(e.kind == "violation" for e in self.events)

    def at(self, t: int) -> dict[str, Optional[str]]:
        """Link -> flow id (None when idle) during cycle ``t``."""
        if not 0 <= t < self.horizon:
            raise IndexError(t)
        out: dict[str, Optional[str]] = dict.fromkeys(self.links)
        for seg in self.segments:
            if seg.start <= t < seg.end:
                out.update(seg.mapping)
                break
        return out

    def responses(self) -> list[tuple[str, int, Optional[int]]]:
        """(flow id, release, completion or None) per message, in release order."""
        pending: dict[str, deque] = {}
        out = []
        for e in self.events:
            if e.kind == "release":
                rec = [e.flow_id, e.t, None]
                pending.setdefault(e.flow_id, deque()).append(rec)
                out.append(rec)
            elif e.kind == "complete":
                pending[e.flow_id].popleft()[2] = e.t
        return [tuple(r) for r in out]

    def misses(self) -> list[Event]:
        return [e for e in self.events if e.kind == "miss"]

    def to_text(self) -> str:
        lines = []
        seg_iter = iter(self.segments)
        seg = next(seg_iter, None)
        for t in range(self.horizon):
            while seg is not None and seg.end <= t:
                seg = next(seg_iter, None)
            m = seg.mapping if seg is not None and seg.start <= t else {}
            lines.append(",".join([str(t)] + [f"{l}={m.get(l, IDLE)}" for l in self.links]))
        for e in self.events:
            lines.append(f"E,{e.t},{e.kind},{e.flow_id}")
        return "\n".join(lines) + "\n"


def parse_trace(text: str) -> ScheduleTrace:
    links: Optional[tuple[str, ...]] = None
    rows: list[tuple[tuple[str, str], ...]] = []
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if parts[0] == "E":
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: malformed event")
            events.append(Event(int(parts[1]), parts[2], parts[3]))
            continue
        if int(parts[0]) != len(rows):
            raise ValueError(f"line {lineno}: expected cycle {len(rows)}")
        pairs = [p.split("=", 1) for p in parts[1:]]
        names = tuple(p[0] for p in pairs)
        if links is None:
            links = names
        elif names != links:
            raise ValueError(f"line {lineno}: link columns changed")
        rows.append(tuple(sorted((l, v) for l, v in pairs if v != IDLE)))
    trace = ScheduleTrace(len(rows), links or ())
    for t, assignment in enumerate(rows):
        _append(trace.segments, t, t + 1, assignment)
    trace.events = events
    return trace


def _append(segments: list[Segment], start: int, end: int, assignment) -> None:
    if not assignment or end <= start:
        return
    if segments and segments[-1].end == start and segments[-1].assignment == assignment:
        segments[-1] = Segment(segments[-1].start, end, assignment)
    else:
        segments.append(Segment(start, end, assignment))


def arbitrate_cycle(active: Iterable[MessageState], fs: FlowSet) -> frozenset[int]:
    """Greedy priority-order grant of whole paths; returns granted flow indices."""
    active = sorted(active, key=lambda m: m.flow)
    flows = [m.flow for m in active]
    if len(set(flows)) != len(flows):
        raise ValueError("two active messages share one priority")
    claimed: set[str] = set()
    granted = set()
    for m in active:
        links = fs[m.flow].link_set
        if claimed.isdisjoint(links):
            granted.add(m.flow)
            claimed |= links
    return frozenset(granted)


def simulate(fs: FlowSet, releases: ReleasePattern, horizon: int) -> ScheduleTrace:
    if horizon < 1:
        raise ValueError("horizon must be at least one cycle")
    releases.validate(fs)
    n = len(fs)
    links = tuple(sorted({l for f in fs for l in f.path.links}))
    trace = ScheduleTrace(horizon, links)
    events: list[tuple[int, int, int, str]] = []

    def emit(t: int, kind: str, i: int) -> None:
        events.append((t, _KIND_ORDER[kind], i, kind))

    queues: list[deque[MessageState]] = [deque() for _ in range(n)]
    pending = [deque(ts) for ts in releases.times]
    t = 0
    while t < horizon:
        for i in range(n):
            while pending[i] and pending[i][0] == t:
                pending[i].popleft()
                if queues[i]:
                    emit(t, "violation", i)
                queues[i].append(MessageState(i, t, fs[i].c_hat))
                emit(t, "release", i)
        heads = [q[0] for q in queues if q]
        next_release = min((p[0] for p in pending if p), default=horizon)
        if not heads:
            t = min(next_release, horizon)
            continue
        granted = arbitrate_cycle(heads, fs)
        step_end = min(next_release, horizon,
                       min(t + queues[i][0].remaining for i in granted))
        assignment = tuple(sorted((l, fs[i].id) for i in granted for l in fs[i].path.links))
        _append(trace.segments, t, step_end, assignment)
        for i in sorted(granted):
            m = queues[i][0]
            m.remaining -= step_end - t
            if m.remaining == 0:
                m.completion = step_end
                queues[i].popleft()
                emit(step_end, "complete", i)
                if step_end - m.release > fs[i].deadline:
                    emit(m.release + fs[i].deadline, "miss", i)
        t = step_end
    for i, q in enumerate(queues):
        for m in q:
            if m.release + fs[i].deadline <= horizon:
                emit(m.release + fs[i].deadline, "miss", i)
    events.sort()
    trace.events = [Event(t, kind, fs[i].id) for t, _, i, kind in events]
    return trace


@dataclass(frozen=True)
class Violation:
    t: int
    kind: str
    flow_id: str
    detail: str = ""


@dataclass
class _Pending:
    release: int
    granted: int = 0


def _replay(trace: ScheduleTrace, fs: FlowSet, violations: list[Violation]
            ) -> Iterator[tuple[int, int, dict[str, str], dict[int, _Pending]]]:
    """Walk the trace in maximal intervals where assignment and active set are fixed.

    Yields ``(start, end, link -> flow id, flow index -> head message)`` and
    records grant-accounting problems into ``violations``.
    """
    index = {f.id: i for i, f in enumerate(fs)}
    releases: dict[int, list[int]] = {}
    completes: dict[int, list[int]] = {}
    for e in trace.events:
        if e.kind not in ("release", "complete"):
            continue
        if e.flow_id not in index:
            violations.append(Violation(e.t, "unknown-flow", e.flow_id))
            continue
        target = releases if e.kind == "release" else completes
        target.setdefault(e.t, []).append(index[e.flow_id])
    points = {0, trace.horizon}
    for seg in trace.segments:
        points.update((seg.start, seg.end))
    points.update(t for t in releases if t <= trace.horizon)
    points.update(t for t in completes if t <= trace.horizon)
    points = sorted(p for p in points if 0 <= p <= trace.horizon)

    queues: list[deque[_Pending]] = [deque() for _ in fs]
    segs = iter(trace.segments)
    seg = next(segs, None)

    def settle(t: int) -> None:
        done = completes.get(t, [])
        for i in done:
            q = queues[i]
            if not q:
                violations.append(Violation(t, "completion", fs[i].id, "no active message"))
            elif q[0].granted != fs[i].c_hat:
                violations.append(Violation(t, "completion", fs[i].id,
                                            f"{q[0].granted} grants, expected {fs[i].c_hat}"))
                q.popleft()
            else:
                q.popleft()
        for i, q in enumerate(queues):
            if q and q[0].granted >= fs[i].c_hat and i not in done:
                violations.append(Violation(t, "completion", fs[i].id,
                                            f"{q[0].granted} grants without completing"))
                q.popleft()

    for a, b in zip(points, points[1:]):
        settle(a)
        for i in releases.get(a, []):
            queues[i].append(_Pending(a))
        while seg is not None and seg.end <= a:
            seg = next(segs, None)
        mapping = seg.mapping if seg is not None and seg.start <= a else {}
        heads = {i: q[0] for i, q in enumerate(queues) if q}
        yield a, b, mapping, heads
        for i in sorted({index[v] for v in mapping.values() if v in index}):
            if i in heads:
                heads[i].granted += b - a
            else:
                violations.append(Violation(a, "idle-grant", fs[i].id, "links held without an active message"))
    settle(trace.horizon)


def check_trace(trace: ScheduleTrace, fs: FlowSet) -> list[Violation]:
    """Verify all-or-nothing, work conservation and grant accounting.

    Returns the list of violations; an empty list means the trace is a
    valid fixed-priority SP2 schedule for ``fs``.
    """
    violations: list[Violation] = []
    index = {f.id: i for i, f in enumerate(fs)}
    for a, b, mapping, heads in _replay(trace, fs, violations):
        held: dict[int, set[str]] = {}
        for link, fid in mapping.items():
            if fid not in index:
                violations.append(Violation(a, "unknown-flow", fid, link))
                continue
            held.setdefault(index[fid], set()).add(link)
        for i, ls in held.items():
            if ls != fs[i].link_set:
                violations.append(Violation(a, "all-or-nothing", fs[i].id,
                                            f"holds {sorted(ls)} of {sorted(fs[i].link_set)}"))
        for i in heads:
            if i in held:
                continue
            blocked = any(l in mapping and index.get(mapping[l], i) < i for l in fs[i].path.links)
            if not blocked:
                violations.append(Violation(a, "work-conservation", fs[i].id,
                                            f"active and unblocked during [{a},{b})"))
    return violations


def lambda_suspensions(trace: ScheduleTrace, fs: FlowSet, i: Optional[int] = None):
    """Cycles during which higher-priority flows are self-suspended on the path of ``i``.

    A flow ``j < i`` counts at a cycle when it is active, shares a link with
    (but does not have the same path as) flow ``i``, holds none of the links
    of flow ``i``, and every link of flow ``i`` is idle or held by a
    lower-priority flow than ``j``.

    Returns ``{j: {release of the message of j: cycles}}`` for one flow, or
    that mapping keyed by every ``i`` when ``i`` is None.
    """
    index = {f.id: k for k, f in enumerate(fs)}
    targets = range(len(fs)) if i is None else [i]
    candidates = {
        k: [j for j in range(k)
            if not fs[j].link_set.isdisjoint(fs[k].link_set) and fs[j].link_set != fs[k].link_set]
        for k in targets
    }
    out: dict[int, dict[int, dict[int, int]]] = {k: {} for k in targets}
    for a, b, mapping, heads in _replay(trace, fs, []):
        if not heads:
            continue
        for k in targets:
            owners = [index.get(mapping[l]) if l in mapping else None for l in fs[k].path.links]
            for j in candidates[k]:
                if j in heads and all(o is None or o > j for o in owners):
                    per = out[k].setdefault(j, {})
                    rel = heads[j].release
                    per[rel] = per.get(rel, 0) + (b - a)
    return out if i is None else out[i]
