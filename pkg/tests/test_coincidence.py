import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from netperturb.coincidence import (CoincidenceParams, build_similarity_network, coincidence,
                                    coincidence_matrix, fig2_demo, interiority, multiset_jaccard)
from netperturb.signals import normalize_curve

R = np.array([np.sqrt(2) / 2, np.sqrt(2) / 2])
V0 = np.array([0.95, 0.0])
nonneg = st.floats(0, 1e3, allow_nan=False, allow_infinity=False)


def test_jaccard_examples():
    x = np.array([0.2, 3.0, 1.0])
    for d in (1, 2, 5):
        assert multiset_jaccard(x, x, CoincidenceParams(D=d)) == 1
    # sum min = sqrt2/2, sum max = sqrt2/2 + 0.95
    want = ((np.sqrt(2) / 2) / (np.sqrt(2) / 2 + 0.95)) ** 5
    assert multiset_jaccard(R, V0) == pytest.approx(want, abs=1e-15)
    assert multiset_jaccard(R, V0) == pytest.approx(0.01415, abs=1e-5)
    assert multiset_jaccard(R, 0.95 * R) == pytest.approx(0.95 ** 5)


def test_interiority_examples():
    assert interiority(R, 0.95 * R) == pytest.approx(1)
    assert interiority(R, V0) == pytest.approx((np.sqrt(2) / 2) / 0.95)
    assert interiority(R, V0) == pytest.approx(0.7443, abs=1e-4)
    assert interiority(R, R) == 1


def test_coincidence_examples():
    assert coincidence(R, 0.95 * R) == pytest.approx(0.95 ** 5)
    assert coincidence(R, V0) == pytest.approx(0.01415 * 0.7443, abs=2e-5)
    assert coincidence(V0, V0) == 1


def test_zero_vectors():
    z = np.zeros(3)
    assert coincidence(z, z) == 1
    assert coincidence(z, np.array([0, 1.0, 0])) == 0


@pytest.mark.parametrize("x, y", [([1, -1], [1, 1]), ([1, 2], [1, 2, 3]), ([], [])])
def test_invalid_vectors(x, y):
    with pytest.raises(ValueError):
        coincidence(x, y)


def test_params_validated():
    for bad in (dict(delta=-1), dict(D=0.5), dict(E_exp=0)):
        with pytest.raises(ValueError):
            CoincidenceParams(**bad)


@settings(max_examples=300, deadline=None)
@given(arrays(float, 6, elements=nonneg), arrays(float, 6, elements=nonneg),
       st.floats(0, 2), st.floats(1, 8), st.floats(1, 4))
def test_coincidence_properties(x, y, delta, d, e):
    p = CoincidenceParams(delta, d, e)
    c = coincidence(x, y, p)
    assert 0 <= c <= 1
    assert c == coincidence(y, x, p)
    if delta == 0:
        assert c <= multiset_jaccard(x, y, p) <= multiset_jaccard(x, y, CoincidenceParams(0, 1, 1)) + 1e-15


def test_coincidence_matrix_symmetric():
    rng = np.random.default_rng(0)
    vs = rng.uniform(0, 1, (5, 7))
    m = coincidence_matrix(vs)
    assert np.array_equal(m, m.T) and np.all(np.diag(m) == 1)


def test_fig2_demo_table():
    rows = fig2_demo()
    assert len(rows) == 91
    a, inner, cos, c = rows[45]
    assert a == pytest.approx(np.pi / 4) and cos == pytest.approx(1)
    assert c == pytest.approx(0.95 ** 5, abs=1e-12)
    assert rows[0][1] == pytest.approx(0.95 * np.sqrt(2) / 2)
    cs = np.array([r[3] for r in rows])
    assert np.allclose(cs, cs[::-1], atol=1e-12)


def test_fig2_rejects_bad_input():
    with pytest.raises(ValueError):
        fig2_demo(magnitude=0)
    with pytest.raises(ValueError):
        fig2_demo(angles=[-0.1])


def _curves(arrs, grid=None):
    grid = np.arange(len(arrs[0]), dtype=float) if grid is None else grid
    return [normalize_curve(a, grid, f"m{i}") for i, a in enumerate(arrs)]


def test_similarity_network_basic():
    curves = _curves([[1, 2, 3], [1, 2, 3], [5, 5, 5]])
    net = build_similarity_network(curves, {"m0": "A"})
    assert net.weights[0, 1] == 1
    assert net.weights[0, 2] == 0  # degenerate all-zero curve vs non-zero
    assert np.allclose(net.node_weights, [np.abs(c.values).sum() for c in curves])
    assert len(net.edges()) == 3


def test_similarity_network_fourteen_nodes():
    rng = np.random.default_rng(1)
    curves = _curves(list(rng.normal(size=(14, 9))))
    net = build_similarity_network(curves)
    assert len(net.nodes) == 14 and len(net.edges()) == 91
    assert np.array_equal(net.weights, net.weights.T)
    assert np.all((net.weights >= 0) & (net.weights <= 1))


def test_similarity_network_grid_mismatch():
    a = normalize_curve([1, 2, 3], [0, 1, 2], "a")
    b = normalize_curve([1, 2, 3], [0, 1, 3], "b")
    with pytest.raises(ValueError, match="different grid"):
        build_similarity_network([a, b])


def test_similarity_network_raw_area():
    curves = _curves([[1, 2, 3], [3, 1, 2]])
    net = build_similarity_network(curves, raw_areas=[[0, 1, 2], [0, -2, -1]])
    assert net.node_weights.tolist() == [3, 3]


def test_similarity_network_exports():
    curves = _curves([[1, 2, 3], [1, 3, 2], [3, 2, 1]])
    net = build_similarity_network(curves, {"m0": "A", "m1": "A", "m2": "B"})
    d = json.loads(net.to_json())
    assert [n["label"] for n in d["nodes"]] == ["A", "A", "B"]
    assert len(d["edges"]) == 3
    assert len(json.loads(net.to_json(threshold=1.1))["edges"]) == 0
    dot = net.to_dot()
    assert dot.startswith('graph "simnet" {') and dot.count("penwidth=") == 3
    assert dot.count("width=") - dot.count("penwidth=") == 3
