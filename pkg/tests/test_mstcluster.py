import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    brute_force_mst,
    ids,
    index_pairs,
    is_cycle_optimal,
    random_connected,
    random_distances,
)
from indnet.errors import ConnectivityError, DomainError
from indnet.mstcluster import SpanningTree, mst_oracle, replaced_links, single_linkage
from indnet.netbuild import DistanceMatrix

INF = np.inf


def xyz():
    d = np.array([[INF, 2.0e-6, 2.0e-5], [2.0e-6, INF, 4.0e-6], [2.0e-5, 4.0e-6, INF]])
    return DistanceMatrix.from_array(("X", "Y", "Z"), d)


def test_three_node_example():
    merges, tree = single_linkage(xyz())
    assert {frozenset(e[:2]) for e in tree.edges} == {frozenset("XY"), frozenset("YZ")}
    assert tree.threshold == 4.0e-6
    assert merges.distances() == [2.0e-6, 4.0e-6]
    assert merges.steps[0].pair == ("X", "Y")
    assert merges.steps[1].cluster_a == {"X", "Y"} and merges.steps[1].cluster_b == {"Z"}
    # the three candidate trees, checked by hand: XY+YZ is the lightest
    totals = {"XY+YZ": 6e-6, "XY+XZ": 2.2e-5, "XZ+YZ": 2.4e-5}
    assert min(totals, key=totals.get) == "XY+YZ"
    assert mst_oracle(xyz()).edges == tree.edges


def test_equal_distances_tie_break_is_star_on_first_node():
    n = 5
    d = np.full((n, n), 3.0)
    dm = DistanceMatrix.from_array(ids(n), d)
    merges, tree = single_linkage(dm)
    assert tree.threshold == 3.0
    assert index_pairs(tree) == {(0, k) for k in range(1, n)}
    assert mst_oracle(dm).edges == tree.edges


def test_chain_matrix():
    n = 6
    d = np.full((n, n), INF)
    for k in range(n - 1):
        d[k, k + 1] = d[k + 1, k] = float(10 - k)
    dm = DistanceMatrix.from_array(ids(n), d)
    _, tree = single_linkage(dm)
    assert index_pairs(tree) == {(k, k + 1) for k in range(n - 1)}
    assert mst_oracle(dm).edges == tree.edges
    assert tree.threshold == 10.0


def test_36_nodes_takes_35_steps():
    rng = np.random.default_rng(1)
    dm = random_distances(rng, 36)
    merges, tree = single_linkage(dm)
    assert len(merges) == 35 and len(tree.edges) == 35


def test_disconnected_raises_with_components():
    d = np.full((4, 4), INF)
    d[0, 1] = d[1, 0] = 1.0
    d[2, 3] = d[3, 2] = 2.0
    dm = DistanceMatrix.from_array(ids(4), d)
    with pytest.raises(ConnectivityError) as err:
        single_linkage(dm)
    assert sorted(err.value.components) == [["N00", "N01"], ["N02", "N03"]]
    with pytest.raises(ConnectivityError):
        mst_oracle(dm)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_against_exhaustive_enumeration(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        dm = random_distances(rng, n)
        _, tree = single_linkage(dm)
        total, best = brute_force_mst(np.array(dm.distances))
        assert index_pairs(tree) == best
        assert tree.total_distance() == pytest.approx(total, rel=1e-12)


def test_oracle_complete_graph_matches_enumeration():
    rng = np.random.default_rng(11)
    for n in (4, 6):
        dm = random_distances(rng, n)
        assert index_pairs(mst_oracle(dm)) == brute_force_mst(np.array(dm.distances))[1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(3, 12))
def test_clustering_properties(seed, n):
    rng = np.random.default_rng(seed)
    dm = random_connected(rng, n)
    merges, tree = single_linkage(dm)
    oracle = mst_oracle(dm)
    assert tree.edges == oracle.edges
    assert tree.threshold == max(d for _, _, d in oracle.edges)
    seq = merges.distances()
    assert all(a <= b for a, b in zip(seq, seq[1:]))
    assert is_cycle_optimal(set(index_pairs(tree)), np.array(dm.distances))
    # merge distance is the minimum over inter-cluster pairs at that step
    pos = {name: k for k, name in enumerate(dm.industries)}
    for step in merges.steps:
        best = min(
            dm.distances[pos[a], pos[b]] for a in step.cluster_a for b in step.cluster_b
        )
        assert step.distance == best


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(4, 10))
def test_ties_agree_with_oracle(seed, n):
    rng = np.random.default_rng(seed)
    dm = random_distances(rng, n, unique=False, p_missing=0.2)
    try:
        _, tree = single_linkage(dm)
    except ConnectivityError:
        with pytest.raises(ConnectivityError):
            mst_oracle(dm)
        return
    assert tree.edges == mst_oracle(dm).edges


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1e-3, 1e3))
def test_scaling_weights_keeps_tree(seed, c):
    rng = np.random.default_rng(seed)
    dm = random_distances(rng, 8)
    w = 1.0 / np.array(dm.distances)
    with np.errstate(divide="ignore"):
        scaled = DistanceMatrix.from_array(dm.industries, 1.0 / (w * c))
    _, t1 = single_linkage(dm)
    _, t2 = single_linkage(scaled)
    assert t1.edge_set() == t2.edge_set()
    assert t2.threshold == pytest.approx(t1.threshold / c, rel=1e-12)


def tree_of(pairs):
    names = sorted({x for p in pairs for x in p})
    return SpanningTree(tuple(names), tuple((a, b, 1.0) for a, b in pairs), 1.0)


def test_replaced_links_examples():
    a = tree_of([("X", "Y"), ("Y", "Z")])
    b = tree_of([("X", "Y"), ("X", "Z")])
    assert replaced_links(a, a) == 0
    assert replaced_links(a, b) == 1
    # orientation of a pair does not matter
    assert replaced_links(a, tree_of([("Y", "X"), ("Z", "Y")])) == 0


def test_replaced_links_node_mismatch():
    with pytest.raises(DomainError):
        replaced_links(tree_of([("X", "Y"), ("Y", "Z")]), tree_of([("X", "Y"), ("Y", "W")]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(3, 15))
def test_replaced_links_symmetric_and_bounded(seed, n):
    rng = np.random.default_rng(seed)
    _, a = single_linkage(random_distances(rng, n))
    _, b = single_linkage(random_distances(rng, n))
    rl = replaced_links(a, b)
    assert rl == replaced_links(b, a)
    assert 0 <= rl <= n - 1


def test_prufer_enumeration_counts():
    from conftest import prufer_trees

    # Cayley: n^(n-2) labelled trees
    for n in (3, 4, 5):
        trees = set(prufer_trees(n))
        assert len(trees) == n ** (n - 2)
        for t in trees:
            assert len(t) == n - 1
    assert len(list(itertools.islice(prufer_trees(6), 10))) == 10
