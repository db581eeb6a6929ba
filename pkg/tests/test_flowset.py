import random

import pytest
from hypothesis import given, settings, strategies as st

from sp2noc.flowset import Flow, FlowSet, effective_time, share1_set, share_set, ss_set
from sp2noc.generate import GeneratorParams, generate_flowset
from sp2noc.topology import build_mesh

from conftest import make_flowset


def test_effective_time_examples(ex1):
    topo = build_mesh(3, 3)
    f = Flow("x", 1, 10, 100, 100, topo.make_path(["A0.0>R0.0", "R0.0>R0.1", "R0.1>A0.1"]))
    assert effective_time(f) == 12
    assert effective_time(Flow("y", 1, 1, 5, 5, topo.make_path(["R0.0>R0.1"]))) == 1
    assert effective_time(ex1[2]) == 30
    assert [f.c_hat for f in ex1] == [20, 20, 30]


def test_example1_contention(ex1):
    assert share_set(ex1, 0) == frozenset()
    assert share_set(ex1, 1) == {0}
    assert share_set(ex1, 2) == {1}
    assert ss_set(ex1, 2) == {1}
    assert share1_set(ex1, 2) == {1}
    assert ss_set(ex1, 1) == frozenset()


def test_disjoint_paths_have_no_contention():
    fs = make_flowset([(3, 50, 50, ["R0.0>R0.1"]), (3, 50, 50, ["R0.1>R0.0"]),
                       (3, 50, 50, ["R1.0>R1.1", "R1.1>R1.2"])])
    for i in range(3):
        assert share_set(fs, i) == ss_set(fs, i) == share1_set(fs, i) == frozenset()


def test_pairwise_sharing_clique():
    fs = make_flowset([(3, 50, 50, ["R0.0>R0.1"]),
                       (3, 50, 50, ["R0.0>R0.1", "R0.1>R0.2"]),
                       (3, 50, 50, ["A0.0>R0.0", "R0.0>R0.1"])])
    assert share_set(fs, 2) == {0, 1}
    assert ss_set(fs, 2) == share1_set(fs, 2) == frozenset()


def test_opposite_directions_do_not_contend():
    fs = make_flowset([(3, 50, 50, ["R0.0>R0.1"]), (3, 50, 50, ["R0.1>R0.0"])])
    assert share_set(fs, 1) == frozenset()


def test_flowset_validation():
    topo = build_mesh(2, 2)
    p = topo.make_path(["R0.0>R0.1"])
    with pytest.raises(ValueError):
        FlowSet(topo, [Flow("a", 1, 1, 5, 5, p), Flow("b", 1, 1, 5, 5, p)])
    with pytest.raises(ValueError):
        FlowSet(topo, [Flow("a", 1, 1, 5, 5, p), Flow("a", 2, 1, 5, 5, p)])
    with pytest.raises(ValueError):
        Flow("a", 1, 0, 5, 5, p)
    with pytest.raises(ValueError):
        Flow("a", 0, 1, 5, 5, p)
    fs = FlowSet(topo, [Flow("b", 7, 1, 5, 5, p), Flow("a", 3, 1, 5, 5, p)])
    assert [f.id for f in fs] == ["a", "b"]
    with pytest.raises(ValueError):
        FlowSet(topo, [Flow("a", 1, 1, 5, 9, p)]).check_constrained()


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=200)
@given(seeds, st.integers(3, 10))
def test_ss_equals_share1(seed, n):
    fs = generate_flowset(GeneratorParams(n_flows=n, seed=seed))
    for k in range(len(fs)):
        assert ss_set(fs, k) == share1_set(fs, k)
        assert ss_set(fs, k) <= share_set(fs, k)


@settings(max_examples=100)
@given(seeds, st.integers(2, 10))
def test_inclusion_lemma(seed, n):
    fs = generate_flowset(GeneratorParams(n_flows=n, seed=seed))
    for i in range(len(fs)):
        for j in share_set(fs, i):
            hits = [m for m in share_set(fs, j) if not fs[m].link_set.isdisjoint(fs[i].link_set)]
            if len(hits) == len(share_set(fs, j)):
                assert set(hits) <= share_set(fs, i)


@settings(max_examples=100)
@given(seeds)
def test_share_set_monotone_under_path_extension(seed):
    fs = generate_flowset(GeneratorParams(n_flows=8, seed=seed))
    rng = random.Random(seed)
    i = rng.randrange(len(fs))
    f = fs[i]
    topo = fs.topology
    visited = set(topo.path_nodes(f.path))
    end = topo.path_nodes(f.path)[-1]
    options = [l for l in topo.links.values() if l.src == end and l.dst not in visited]
    if not options:
        return
    extra = rng.choice(options)
    longer = Flow(f.id, f.priority, f.flits, f.period, f.deadline,
                  topo.make_path(f.path.links + (extra.id,)))
    fs2 = FlowSet(topo, [longer if g.id == f.id else g for g in fs])
    assert share_set(fs, i) <= share_set(fs2, i)
