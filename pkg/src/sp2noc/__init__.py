"""Fixed-priority SP2 arbitration for real-time network-on-chips.

SP2 grants a flow either every link of its route in a cycle or none of
them. This package provides mesh topologies, flow sets, an exhaustive
progression-state oracle, a cycle-accurate SP2 simulator, response-time
analyses, and an experiment harness.
"""
from .flowset import Flow, FlowSet, effective_time, share1_set, share_set, ss_set
from .generate import GeneratorParams, generate_flowset
from .io import example1, load_flowset
from .progression import BudgetExhausted, count_series, series_bounds, valid_successors
from .rta import (AnalysisResult, analyze_all, dominance_check, rta_baseline, rta_sp2,
                  transform_flowset)
from .sim import ScheduleTrace, arbitrate_cycle, check_trace, simulate, synchronous_releases
from .topology import Path, Topology, build_mesh, xy_route

__all__ = [
    "AnalysisResult", "BudgetExhausted", "Flow", "FlowSet", "GeneratorParams", "Path",
    "ScheduleTrace", "Topology", "analyze_all", "arbitrate_cycle", "build_mesh",
    "check_trace", "count_series", "dominance_check", "effective_time", "example1",
    "generate_flowset", "load_flowset", "rta_baseline", "rta_sp2", "series_bounds",
    "share1_set", "share_set", "simulate", "ss_set", "synchronous_releases",
    "transform_flowset", "valid_successors", "xy_route",
]
