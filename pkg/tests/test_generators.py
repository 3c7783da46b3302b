from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import to_nx
from netperturb.generators import (PrefixSumTree, ba_edge_count, ba_edges_per_node,
                                   delaunay_edges, er_edge_count, gen_ba, gen_er, gen_geo,
                                   generate, lattice_side)
from netperturb.graph import connected_components


def test_er_paper_size():
    g = gen_er(100, 5.7, seed=1)
    assert g.num_edges == 285
    assert 2 * g.num_edges / g.n == pytest.approx(5.7, abs=1e-12)


def test_er_forced_complete():
    for seed in range(5):
        g = gen_er(4, 3, seed)
        assert g.num_edges == 6


def test_er_single_edge():
    assert gen_er(2, 1, 0).edges.tolist() == [[0, 1]]


def test_er_too_many_edges():
    with pytest.raises(ValueError):
        gen_er(4, 3.6, 0)


def test_er_edge_count_exact_for_random_configs():
    rng = np.random.default_rng(5)
    for k in range(100):
        n = int(rng.integers(2, 80))
        a = float(rng.uniform(0.1, n - 1))
        g = gen_er(n, a, seed=k)
        assert g.num_edges == er_edge_count(n, a) == round(n * a / 2)


def test_er_pairs_uniform():
    # every pair of K5 should be picked with probability 3/10
    counts = np.zeros((5, 5))
    trials = 4000
    for s in range(trials):
        for u, v in gen_er(5, 1.2, s).edges.tolist():
            counts[u, v] += 1
    freq = counts[np.triu_indices(5, 1)] / trials
    assert np.all(np.abs(freq - 0.3) < 0.035)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=40), st.data())
def test_prefix_sum_tree_against_cumsum(weights, data):
    tree = PrefixSumTree(len(weights))
    for i, w in enumerate(weights):
        tree.set(i, w)
    assert tree.total() == pytest.approx(sum(weights))
    if tree.total() <= 0:
        return
    target = data.draw(st.floats(0, tree.total(), exclude_max=True))
    i = tree.find(target)
    cum = np.cumsum(weights)
    lo = cum[i] - weights[i]
    tol = 1e-9 * tree.total()
    assert weights[i] > 0
    assert lo - tol <= target < cum[i] + tol


def test_prefix_sum_tree_sampling_is_proportional():
    tree = PrefixSumTree(4)
    for i, w in enumerate([1, 2, 3, 4]):
        tree.set(i, w)
    rng = np.random.default_rng(0)
    hits = np.bincount([tree.find(rng.random() * tree.total()) for _ in range(20000)],
                       minlength=4)
    assert np.allclose(hits / 20000, [0.1, 0.2, 0.3, 0.4], atol=0.015)


def test_ba_small_tree():
    g = gen_ba(3, 1, seed=2)
    assert g.num_edges == 2
    assert nx.is_tree(to_nx(g))


def test_ba_edge_count_formula():
    for seed in range(5):
        g = gen_ba(100, 3, seed)
        assert g.num_edges == ba_edge_count(100, 3) == 294
    assert 2 * 294 / 100 == pytest.approx(5.88)


def test_ba_complete_when_m_is_n_minus_1():
    assert gen_ba(5, 4, 0).num_edges == 10


def test_ba_rejects_large_m():
    with pytest.raises(ValueError):
        gen_ba(5, 5, 0)
    with pytest.raises(ValueError):
        gen_ba(5, 0, 0)


def test_ba_target_degree_mapping():
    assert ba_edges_per_node(5.7) == 3
    assert ba_edges_per_node(1.0) == 1


def test_ba_heavier_tail_than_er():
    ba = np.mean([gen_ba(100, 3, s).degrees().max() for s in range(100)])
    er = np.mean([gen_er(100, 5.88, s).degrees().max() for s in range(100)])
    assert ba > er


def test_ba_is_connected():
    for s in range(20):
        assert len(connected_components(gen_ba(60, 2, s))) == 1


def test_geo_two_by_two():
    for s in range(10):
        g = gen_geo(2, 0.001, s)
        assert g.n == 4 and g.num_edges == 5
        diag = {(0, 3), (1, 2)} & {tuple(e) for e in g.edges.tolist()}
        assert len(diag) == 1


def _brute_delaunay(points):
    """Edges of all triangles whose circumcircle contains no other point."""
    edges = set()
    n = len(points)
    for i, j, k in combinations(range(n), 3):
        a, b, c = points[i], points[j], points[k]
        d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-12:
            continue
        ux = ((a @ a) * (b[1] - c[1]) + (b @ b) * (c[1] - a[1]) + (c @ c) * (a[1] - b[1])) / d
        uy = ((a @ a) * (c[0] - b[0]) + (b @ b) * (a[0] - c[0]) + (c @ c) * (b[0] - a[0])) / d
        r2 = (a[0] - ux) ** 2 + (a[1] - uy) ** 2
        others = np.delete(points, [i, j, k], axis=0)
        if np.all((others[:, 0] - ux) ** 2 + (others[:, 1] - uy) ** 2 > r2):
            edges |= {(i, j), (i, k), (j, k)}
    return edges


@pytest.mark.parametrize("n", [2, 3, 4])
def test_geo_matches_empty_circumcircle_oracle(n):
    for seed in range(5):
        g = gen_geo(n, 0.05, seed)
        assert {tuple(e) for e in g.edges.tolist()} == _brute_delaunay(np.asarray(g.coords))


def test_delaunay_edges_square():
    pts = np.array([[0, 0], [1, 0], [0, 1], [1.01, 1.02]])
    assert {tuple(e) for e in delaunay_edges(pts).tolist()} == _brute_delaunay(pts)


def test_geo_connected_and_planar():
    for n in range(4, 11):
        for s in range(100 if n <= 6 else 15):
            g = gen_geo(n, 0.001, s)
            assert g.num_edges <= 3 * g.n - 6
            h = to_nx(g)
            assert nx.is_connected(h)
            if s < 5:
                assert nx.check_planarity(h)[0]


def test_geo_deterministic():
    assert gen_geo(10, 0.001, 7) == gen_geo(10, 0.001, 7)
    assert gen_geo(10, 0.001, 7) != gen_geo(10, 0.001, 8)


def test_geo_positions_are_jittered_lattice():
    g = gen_geo(5, 0.001, 3)
    c = np.asarray(g.coords)
    lattice = np.array([[i, j] for i in range(5) for j in range(5)], float)
    assert np.all(np.abs(c - lattice) <= 0.001)


def test_lattice_side():
    assert lattice_side(100) == 10
    assert lattice_side(20) is None


def test_generate_dispatch():
    assert generate("ER", 100, 5.7, 0).num_edges == 285
    assert generate("BA", 100, 5.7, 0).num_edges == 294
    assert generate("GEO", 16, 5.7, 0).n == 16
    with pytest.raises(ValueError):
        generate("GEO", 20, 5.7, 0)
    with pytest.raises(ValueError):
        generate("WS", 20, 5.7, 0)
