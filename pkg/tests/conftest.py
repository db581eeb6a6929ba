import pytest

from sp2noc.flowset import Flow, FlowSet
from sp2noc.io import example1
from sp2noc.topology import build_mesh


def make_flowset(specs, rows=3, cols=3):
    """specs: (flits, period, deadline, [link ids]) in priority order."""
    topo = build_mesh(rows, cols)
    flows = [
        Flow(f"f{n + 1}", n + 1, c, t, d, topo.make_path(links))
        for n, (c, t, d, links) in enumerate(specs)
    ]
    return FlowSet(topo, flows)


@pytest.fixture
def ex1():
    return example1()
