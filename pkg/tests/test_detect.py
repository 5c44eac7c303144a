import math
from collections import defaultdict, deque
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from mdcommunities.detect import (
    CommunityAssignment,
    ConnectedComponents,
    CoverageError,
    FixedAssignment,
    LabelPropagation,
    connected_components,
    densify,
    fixed_assignment,
    label_propagation,
)
from mdcommunities.network import MonoNetwork


def mono(edges, weights=None, dimension=0):
    src = [u for u, _ in edges]
    dst = [v for _, v in edges]
    w = weights if weights is not None else [1.0] * len(edges)
    return MonoNetwork.from_edges(dimension, src, dst, w)


def partition(assignment):
    return sorted(tuple(c.tolist()) for c in assignment.communities())


def bfs_components(g):
    adj = defaultdict(set)
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        adj[u].add(v)
        adj[v].add(u)
    seen, comps = set(), []
    for s in g.nodes.tolist():
        if s in seen:
            continue
        comp, queue = [], deque([s])
        seen.add(s)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        comps.append(tuple(sorted(comp)))
    return sorted(comps)


def neighbour_label_weights(g, labels):
    """Per node: total incident weight carried by each neighbour label (independent recount)."""
    lab = dict(zip(g.nodes.tolist(), labels))
    acc = defaultdict(lambda: defaultdict(float))
    for u, v, w in zip(g.src.tolist(), g.dst.tolist(), g.weight.tolist()):
        acc[u][lab[v]] += w
        acc[v][lab[u]] += w
    return lab, acc


def assert_stable(g, labels):
    lab, acc = neighbour_label_weights(g, labels)
    for n, weights in acc.items():
        best = max(weights.values())
        assert math.isclose(weights.get(lab[n], 0.0), best, rel_tol=1e-12), n


def random_mono(rng, n=30, p=0.12, dimension=0):
    edges = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]
    if not edges:
        edges = [(0, 1)]
    weights = rng.uniform(1, 10, size=len(edges)).tolist()
    return mono(edges, weights, dimension)


def test_single_edge_one_community():
    a = label_propagation(mono([(3, 8)]))
    assert partition(a) == [(3, 8)]


def test_two_cliques_with_weak_bridge():
    left = list(combinations(range(4), 2))
    right = list(combinations(range(4, 8), 2))
    edges = left + right + [(3, 4)]
    weights = [1.0] * (len(left) + len(right)) + [0.01]
    g = mono(edges, weights)
    for seed in range(10):
        lp = LabelPropagation(seed=seed)
        a = lp.detect(g)
        assert lp.converged_
        assert partition(a) == [(0, 1, 2, 3), (4, 5, 6, 7)]
        assert_stable(g, a.labels.tolist())


def test_path_plus_triangle():
    g = mono([(0, 1), (2, 3), (3, 4), (2, 4)])
    assert partition(label_propagation(g)) == [(0, 1), (2, 3, 4)]


def test_labelprop_is_deterministic(rng):
    g = random_mono(rng, n=60, p=0.08)
    a = label_propagation(g, seed=7, max_iters=50)
    b = label_propagation(g, seed=7, max_iters=50)
    assert a == b


def test_labelprop_properties_on_random_graphs(rng):
    for _ in range(30):
        g = random_mono(rng, n=40, p=0.1)
        lp = LabelPropagation(seed=int(rng.integers(1000)))
        a = lp.detect(g)
        labels = a.labels.tolist()
        # one label per node, dense
        assert a.nodes.tolist() == g.nodes.tolist()
        assert sorted(set(labels)) == list(range(a.n_communities))
        if lp.converged_:
            assert_stable(g, labels)
        # no community spans two components
        comp_of = {n: i for i, comp in enumerate(bfs_components(g)) for n in comp}
        for members in a.communities():
            assert len({comp_of[n] for n in members.tolist()}) == 1


def test_labelprop_iteration_cap():
    g = mono([(0, 1), (1, 2), (2, 3)])
    lp = LabelPropagation(max_iter=1).fit(g)
    assert lp.n_iter_ == 1
    with pytest.raises(ValueError):
        LabelPropagation(max_iter=0).fit(g)


def test_components_connected_graph():
    g = mono([(0, 1), (1, 2), (2, 3)])
    assert connected_components(g).n_communities == 1


def test_components_disjoint_edges():
    g = mono([(0, 1), (2, 3), (4, 5), (6, 7)])
    assert connected_components(g).n_communities == 4


def test_components_match_bfs(rng):
    for _ in range(40):
        g = random_mono(rng, n=35, p=0.05)
        assert partition(connected_components(g)) == bfs_components(g)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)).filter(lambda e: e[0] != e[1]),
                min_size=1, max_size=40))
def test_components_property(edges):
    edges = sorted({(min(u, v), max(u, v)) for u, v in edges})
    g = mono(edges)
    assert partition(connected_components(g)) == bfs_components(g)


def test_fixed_assignment_overlapping():
    g = mono([(0, 1), (1, 2)])
    a = fixed_assignment(g, {0: ["x"], 1: ["x", "y"], 2: ["y"]})
    assert a.is_overlapping
    assert a.to_mapping() == {0: frozenset({0}), 1: frozenset({0, 1}), 2: frozenset({1})}


def test_fixed_assignment_keeps_integer_labels():
    g = mono([(0, 1), (1, 2)])
    a = fixed_assignment(g, {0: [0], 1: [1], 2: [1]})
    assert a.labels.tolist() == [0, 1, 1]


def test_fixed_assignment_coverage():
    g = mono([(0, 1), (1, 2)])
    with pytest.raises(CoverageError):
        fixed_assignment(g, {0: [0], 1: [0]})


def test_fixed_assignment_per_dimension():
    g = mono([(0, 1)], dimension=2)
    a = FixedAssignment({2: {0: [5], 1: [6]}}, per_dimension=True).detect(g)
    assert partition(a) == [(0,), (1,)]


def test_assignment_requires_dense_labels():
    with pytest.raises(ValueError):
        CommunityAssignment(0, [0, 1], [0, 2])


def test_densify_first_occurrence():
    assert densify(np.array([7, 7, 3, 9, 3])).tolist() == [0, 0, 1, 2, 1]


def test_estimator_api():
    lp = LabelPropagation(seed=3, max_iter=20)
    assert lp.get_params() == {"seed": 3, "max_iter": 20}
    twin = clone(lp).set_params(seed=4)
    assert twin.seed == 4 and lp.seed == 3
    g = mono([(0, 1), (2, 3)])
    assert ConnectedComponents().fit_predict(g).tolist() == [0, 0, 1, 1]
