import itertools

import numpy as np
import pytest

from svetlichny.graphs import (
    PP,
    TP,
    CommGraph,
    GraphError,
    all_graphs,
    catalog,
    classify,
    complete,
    dependency_sets,
    empty,
    fig2,
    is_separable,
    random_graph,
)


def brute_classify(g):
    deps = dependency_sets(g)
    unpaired = [
        (i, j)
        for i in range(1, g.m + 1)
        for j in range(i + 1, g.m + 1)
        if not any({i, j} <= deps[k] for k in deps)
    ]
    return (PP, unpaired[0]) if unpaired else (TP, None)


def test_dependency_sets_examples():
    assert dependency_sets(empty(3)) == {1: {1}, 2: {2}, 3: {3}}
    assert dependency_sets(catalog("fig1_iii")) == {1: {1, 2, 3}, 2: {1, 2, 4}, 3: {1, 2, 3}, 4: {1, 2, 4}}
    assert all(d == {1, 2, 3, 4} for d in dependency_sets(complete(4)).values())


def test_catalog_dependency_lists():
    assert dependency_sets(catalog("fig1_iia")) == {1: {1, 3}, 2: {2, 4}, 3: {1, 3}, 4: {2, 4}}
    assert dependency_sets(catalog("fig1_iib"))[4] == {4}
    assert dependency_sets(catalog("fig1_iva"))[1] == {1, 2, 3, 4}
    assert dependency_sets(catalog("fig1_ivb")) == {1: {1, 3}, 2: {1, 2}, 3: {2, 3, 4}, 4: {1, 2, 4}}
    assert catalog("fig1_v") == complete(4)
    assert catalog("empty", m=3).edges == frozenset()


def test_classify_examples():
    c = classify(catalog("fig1_i"))
    assert (c.kind, c.witness) == (PP, (1, 2))
    assert classify(catalog("fig1_iii")).witness == (3, 4)
    assert classify(catalog("fig1_iva")).kind == TP
    assert classify(catalog("fig1_ivb")).kind == TP
    c = classify(catalog("nonseparable_pp"))
    assert (c.kind, c.witness) == (PP, (1, 3))


def test_tp_cover_map_lowest_party():
    c = classify(catalog("fig1_iva"))
    assert set(c.cover.values()) == {1}
    c = classify(catalog("fig1_ivb"))
    deps = dependency_sets(catalog("fig1_ivb"))
    for (i, j), k in c.cover.items():
        assert {i, j} <= deps[k]
        assert not any({i, j} <= deps[kk] for kk in range(1, k))


def test_separability_examples():
    assert is_separable(catalog("fig1_iia"))
    assert not is_separable(catalog("fig1_iii"))
    assert not is_separable(catalog("nonseparable_pp"))


@pytest.mark.parametrize("m,k", [(m, k) for m in range(4, 8) for k in range(2, m - 1)])
def test_fig2_always_pp_with_witness_1_m(m, k):
    g = fig2(m, k)
    assert (1, m) not in g.edges and (m, 1) not in g.edges
    deps = dependency_sets(g)
    assert not any({1, m} <= d for d in deps.values())
    c = classify(g)
    assert (c.kind, c.witness) == (PP, (1, m))


def test_fig2_params():
    with pytest.raises(GraphError):
        fig2(6, 1)
    with pytest.raises(GraphError):
        fig2(6, 5)
    with pytest.raises(GraphError):
        catalog("nope")


def test_m1_rejected():
    with pytest.raises(GraphError):
        classify(CommGraph(1))


def test_self_loop_ignored_with_warning():
    with pytest.warns(UserWarning):
        g = CommGraph(3, frozenset({(1, 1), (1, 2)}))
    assert g.edges == {(1, 2)}


def test_exhaustive_m3_classify_matches_brute_and_separable_is_pp():
    for g in all_graphs(3):
        c = classify(g)
        assert (c.kind, c.witness) == brute_classify(g)
        if is_separable(g):
            assert c.kind == PP


@pytest.mark.parametrize("m", [4, 5])
def test_sampled_separable_is_pp(m):
    rng = np.random.default_rng(11)
    for _ in range(300):
        g = random_graph(m, rng, p=rng.uniform(0.05, 0.6))
        c = classify(g)
        assert (c.kind, c.witness) == brute_classify(g)
        if is_separable(g):
            assert c.kind == PP


def test_adding_edges_never_breaks_tp():
    for g in all_graphs(3):
        if classify(g).kind == TP:
            for e in itertools.permutations(range(1, 4), 2):
                assert classify(g.with_edge(*e)).kind == TP
    rng = np.random.default_rng(3)
    for _ in range(200):
        g = random_graph(4, rng)
        if classify(g).kind == TP:
            e = tuple(int(v) for v in rng.choice(np.arange(1, 5), 2, replace=False))
            assert classify(g.with_edge(*e)).kind == TP


def test_graph_json_round_trip():
    g = catalog("fig1_ivb")
    assert CommGraph.from_json(g.to_json()) == g
