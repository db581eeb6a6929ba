"""Response-time analyses for fixed-priority SP2 and the wormhole baseline.

All demands are expressed in effective time ``C + eta - 1``. Only flows in
the share set of the flow under analysis interfere directly; flows that
reach it indirectly enter through suspension (SP2) or jitter (baseline)
terms built from the higher-priority response times.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Optional, Sequence

from .flowset import FlowSet, share1_set, share_set, ss_set

X_POLICIES = ("share1", "exhaustive", "all-zero")
MAX_EXHAUSTIVE_BITS = 16


class AnalysisError(ValueError):
    """A precondition of the analysis does not hold."""


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def solve_fixed_point(rhs: Callable[[int], int], start: int, limit: int
                      ) -> tuple[Optional[int], int]:
    """Iterate ``t <- rhs(t)`` from ``start``; stop at a fixed point or once ``t > limit``.

    Returns ``(t or None, iterations)``.
    """
    t, iters = start, 0
    while True:
        if t > limit:
            return None, iters
        nxt = rhs(t)
        iters += 1
        if nxt < t:
            raise AnalysisError(f"right-hand side decreased ({t} -> {nxt})")
        if nxt == t:
            return t, iters
        t = nxt


def _need(fs: FlowSet, k: int, response_times: Mapping[int, int], members) -> None:
    missing = [fs[j].id for j in sorted(members) if response_times.get(j) is None]
    if missing:
        raise AnalysisError(f"{fs[k].id}: no response time for higher-priority {missing}")


def suspension_budgets(fs: FlowSet, k: int, response_times: Mapping[int, int]) -> dict[int, int]:
    """S_j = R_j - Chat_j for members of SS(k), 0 for the other share members."""
    share = share_set(fs, k)
    ss = ss_set(fs, k)
    _need(fs, k, response_times, ss)
    return {j: (response_times[j] - fs[j].c_hat if j in ss else 0) for j in sorted(share)}


def share1_assignment(fs: FlowSet, k: int) -> dict[int, int]:
    """x_j = 0 for share^1 members, 1 for the rest of the share set."""
    s1 = share1_set(fs, k)
    return {j: (0 if j in s1 else 1) for j in sorted(share_set(fs, k))}


def sp2_rhs(fs: FlowSet, k: int, response_times: Mapping[int, int],
            x: Mapping[int, int], t: int) -> int:
    """Right-hand side of the suspension-aware test for flow ``k`` at ``t``."""
    share = sorted(share_set(fs, k))
    _need(fs, k, response_times, share)
    s = suspension_budgets(fs, k, response_times)
    total = fs[k].c_hat  # S_k = 0
    for i in share:
        q = sum(s[j] * x[j] for j in share if j >= i)
        jitter = (1 - x[i]) * (response_times[i] - fs[i].c_hat)
        total += _ceil_div(t + q + jitter, fs[i].period) * fs[i].c_hat
    return total


def baseline_rhs(fs: FlowSet, k: int, response_times: Mapping[int, int],
                 t: int, backpressure: Optional[Mapping[tuple[int, int], int]] = None) -> int:
    """Right-hand side of the wormhole baseline for flow ``k`` at ``t``.

    ``backpressure`` maps (interferer, k) to a non-negative constant B.
    """
    share = sorted(share_set(fs, k))
    s1 = share1_set(fs, k)
    _need(fs, k, response_times, s1)
    total = fs[k].c_hat
    for j in share:
        b = (backpressure or {}).get((j, k), 0)
        if b < 0:
            raise ValueError(f"negative back-pressure for ({fs[j].id}, {fs[k].id})")
        jitter = response_times[j] - fs[j].c_hat if j in s1 else 0
        total += _ceil_div(t + jitter, fs[j].period) * (fs[j].c_hat + b)
    return total


def _x_vectors(fs: FlowSet, k: int, policy: str) -> list[dict[int, int]]:
    share = sorted(share_set(fs, k))
    if policy == "share1":
        return [share1_assignment(fs, k)]
    if policy == "all-zero":
        return [dict.fromkeys(share, 0)]
    if policy == "exhaustive":
        if len(share) > MAX_EXHAUSTIVE_BITS:
            return [share1_assignment(fs, k), dict.fromkeys(share, 0)]
        return [dict(zip(share, bits)) for bits in product((0, 1), repeat=len(share))]
    raise ValueError(f"unknown x policy {policy!r}; expected one of {X_POLICIES}")


def _rta_sp2(fs, k, response_times, x_policy):
    _need(fs, k, response_times, share_set(fs, k))
    f = fs[k]
    best, total_iters, used = None, 0, None
    for x in _x_vectors(fs, k, x_policy):
        r, iters = solve_fixed_point(lambda t: sp2_rhs(fs, k, response_times, x, t),
                                     f.c_hat, f.deadline)
        total_iters += iters
        if r is not None and (best is None or r < best):
            best, used = r, x
    return best, total_iters, used


def rta_sp2(fs: FlowSet, k: int, response_times: Mapping[int, int],
            x_policy: str = "share1") -> Optional[int]:
    """Worst-case response-time bound of flow ``k`` under fixed-priority SP2.

    ``response_times`` holds the bounds already established for the
    higher-priority flows that share a link with ``k``. Returns None when
    the iteration exceeds the deadline.
    """
    return _rta_sp2(fs, k, response_times, x_policy)[0]


def _rta_baseline(fs, k, response_times, backpressure):
    if backpressure and any(b < 0 for b in backpressure.values()):
        raise ValueError("back-pressure constants must be non-negative")
    _need(fs, k, response_times, share1_set(fs, k))
    f = fs[k]
    return solve_fixed_point(lambda t: baseline_rhs(fs, k, response_times, t, backpressure),
                             f.c_hat, f.deadline)


def rta_baseline(fs: FlowSet, k: int, response_times: Mapping[int, int],
                 backpressure: Optional[Mapping[tuple[int, int], int]] = None) -> Optional[int]:
    return _rta_baseline(fs, k, response_times, backpressure)[0]


@dataclass(frozen=True)
class TransformedFlow:
    index: int
    c_hat: int
    period: int
    deadline: int
    suspension: int
    interferes: bool


def transform_flowset(fs: FlowSet, k: int, response_times: Mapping[int, int]) -> list[TransformedFlow]:
    """Higher-priority flows of ``k`` as self-suspending tasks on the path of ``k``.

    Flows outside the share set are listed with ``interferes=False``.
    """
    share = share_set(fs, k)
    ss = ss_set(fs, k)
    _need(fs, k, response_times, ss)
    out = []
    for j in range(k):
        f = fs[j]
        s = response_times[j] - f.c_hat if j in ss else 0
        out.append(TransformedFlow(j, f.c_hat, f.period, f.deadline, s, j in share))
    return out


@dataclass
class FlowResult:
    flow_id: str
    eta: int
    c_hat: int
    r_sp2: Optional[int] = None
    r_baseline: Optional[int] = None
    iterations: int = 0
    x: dict[int, int] = field(default_factory=dict)

    @property
    def schedulable_sp2(self) -> bool:
        return self.r_sp2 is not None

    @property
    def schedulable_baseline(self) -> bool:
        return self.r_baseline is not None


@dataclass
class AnalysisResult:
    flows: list[FlowResult] = field(default_factory=list)

    @property
    def schedulable_sp2(self) -> bool:
        return all(f.schedulable_sp2 for f in self.flows)

    @property
    def schedulable_baseline(self) -> bool:
        return all(f.schedulable_baseline for f in self.flows)

    def r_sp2(self) -> dict[int, int]:
        return {i: f.r_sp2 for i, f in enumerate(self.flows) if f.r_sp2 is not None}

    def r_baseline(self) -> dict[int, int]:
        return {i: f.r_baseline for i, f in enumerate(self.flows) if f.r_baseline is not None}

    def to_csv(self) -> str:
        def cell(v):
            return "" if v is None else str(v)

        lines = ["flow_id,eta,c_hat,R_sp2,R_baseline,schedulable_sp2,schedulable_baseline,iters"]
        for f in self.flows:
            lines.append(",".join([f.flow_id, str(f.eta), str(f.c_hat), cell(f.r_sp2),
                                   cell(f.r_baseline), str(int(f.schedulable_sp2)),
                                   str(int(f.schedulable_baseline)), str(f.iterations)]))
        return "\n".join(lines) + "\n"


def analyze_all(fs: FlowSet, x_policy: str = "share1",
                backpressure: Optional[Mapping[tuple[int, int], int]] = None) -> AnalysisResult:
    """Analyze every flow in priority order with both tests.

    A flow whose interferers (share set for SP2, share set or jitter
    sources for the baseline) lack a bound is reported unschedulable.
    """
    fs.check_constrained()
    result = AnalysisResult()
    r_sp2: dict[int, int] = {}
    r_base: dict[int, int] = {}
    for k, f in enumerate(fs):
        fr = FlowResult(f.id, f.eta, f.c_hat)
        share = share_set(fs, k)
        if all(j in r_sp2 for j in share):
            fr.r_sp2, fr.iterations, x = _rta_sp2(fs, k, r_sp2, x_policy)
            fr.x = x or {}
            if fr.r_sp2 is not None:
                r_sp2[k] = fr.r_sp2
        if all(j in r_base for j in share):
            fr.r_baseline, _ = _rta_baseline(fs, k, r_base, backpressure)
            if fr.r_baseline is not None:
                r_base[k] = fr.r_baseline
        result.flows.append(fr)
    return result


@dataclass
class DominanceReport:
    violations: list[str] = field(default_factory=list)
    compared: int = 0
    pointwise_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def dominance_check(fs: FlowSet, samples: Optional[int] = 256,
                    result: Optional[AnalysisResult] = None) -> DominanceReport:
    """SP2 bound (share1 x-assignment) never exceeds the B=0 baseline bound.

    Also checks that both right-hand sides coincide at sampled ``t`` in
    ``1..D_k`` when evaluated with the same higher-priority bounds.
    ``samples=None`` evaluates every ``t``.
    """
    report = DominanceReport()
    if result is None:
        result = analyze_all(fs, x_policy="share1")
    r = result.r_sp2()
    for k, fr in enumerate(result.flows):
        if fr.r_baseline is not None:
            report.compared += 1
            if fr.r_sp2 is None or fr.r_sp2 > fr.r_baseline:
                report.violations.append(
                    f"{fr.flow_id}: R_sp2={fr.r_sp2} > R_baseline={fr.r_baseline}")
        if not all(j in r for j in share_set(fs, k)):
            continue
        x = share1_assignment(fs, k)
        for t in _sample_points(fs[k].deadline, samples):
            a = sp2_rhs(fs, k, r, x, t)
            b = baseline_rhs(fs, k, r, t)
            report.pointwise_checked += 1
            if a != b:
                report.violations.append(f"{fr.flow_id}: rhs differ at t={t} ({a} vs {b})")
    return report


def _sample_points(limit: int, samples: Optional[int]) -> Sequence[int]:
    if samples is None or limit <= samples:
        return range(1, limit + 1)
    step = (limit - 1) / (samples - 1)
    return sorted({1 + round(step * n) for n in range(samples)})
