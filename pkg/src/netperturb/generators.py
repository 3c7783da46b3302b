"""Seeded generators for the three network models: ER, BA and GEO."""
from __future__ import annotations

import numpy as np
from scipy.spatial import Delaunay

from .graph import Graph

MODELS = ("ER", "BA", "GEO")

#: Lattice perturbation used for geographical networks unless overridden.
DEFAULT_EPSILON = 0.001


def _rng(seed):
    return np.random.default_rng(seed)


def er_edge_count(n: int, avg_degree: float) -> int:
    return int(round(n * avg_degree / 2))


def gen_er(n: int, avg_degree: float, seed=None) -> Graph:
    """Uniform random graph with exactly ``round(n * avg_degree / 2)`` edges."""
    m = er_edge_count(n, avg_degree)
    total = n * (n - 1) // 2
    if m < 0 or m > total:
        raise ValueError(f"{m} edges do not fit in a simple graph on {n} nodes")
    idx = np.sort(_rng(seed).choice(total, size=m, replace=False))
    pairs = np.column_stack(np.triu_indices(n, 1))
    return Graph(n, pairs[idx])


class PrefixSumTree:
    """Binary indexed tree over non-negative weights.

    Supports point updates and sampling an index with probability
    proportional to its weight, both in O(log n).
    """

    def __init__(self, size):
        self.size = size
        self.tree = np.zeros(size + 1)
        self.weights = np.zeros(size)
        self._top = 1 << (size.bit_length() - 1) if size else 0

    def add(self, i, delta):
        self.weights[i] += delta
        j = i + 1
        while j <= self.size:
            self.tree[j] += delta
            j += j & -j

    def set(self, i, value):
        self.add(i, value - self.weights[i])

    def total(self):
        s, j = 0.0, self.size
        while j > 0:
            s += self.tree[j]
            j -= j & -j
        return s

    def find(self, target):
        """Smallest index whose cumulative weight exceeds ``target``."""
        pos, step = 0, self._top
        while step:
            nxt = pos + step
            if nxt <= self.size and self.tree[nxt] <= target:
                pos = nxt
                target -= self.tree[nxt]
            step >>= 1
        # rounding can land on the total itself; step back to a drawable index
        while pos >= self.size or self.weights[pos] <= 0:
            pos -= 1
        return pos


def ba_edge_count(n: int, m: int) -> int:
    return m * (m - 1) // 2 + m * (n - m)


def ba_edges_per_node(avg_degree: float) -> int:
    """Edges attached per new node for a requested average degree (<k> ~ 2m)."""
    return max(1, int(round(avg_degree / 2)))


def gen_ba(n: int, m: int, seed=None) -> Graph:
    """Preferential-attachment growth without multi-edges.

    The process starts from a clique on ``m`` nodes. Every later node links to
    ``m`` distinct existing nodes drawn with probability proportional to
    degree; a chosen target has its weight zeroed until the node is wired so
    it cannot be drawn twice. When all candidate weights are zero the draw
    falls back to uniform.
    """
    if not 1 <= m < n:
        raise ValueError(f"BA needs 1 <= m < n, got m={m}, n={n}")
    rng = _rng(seed)
    tree = PrefixSumTree(n)
    deg = np.zeros(n, dtype=np.int64)
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    deg[:m] = m - 1
    for u in range(m):
        tree.set(u, deg[u])
    for new in range(m, n):
        targets = []
        for _ in range(m):
            total = tree.total()
            if total > 0:
                t = tree.find(rng.random() * total)
            else:
                pool = [u for u in range(new) if u not in targets]
                t = pool[rng.integers(len(pool))]
            targets.append(t)
            tree.set(t, 0.0)
        for t in targets:
            edges.append((t, new))
            deg[t] += 1
            tree.set(t, deg[t])
        deg[new] = m
        tree.set(new, m)
    return Graph(n, edges)


def delaunay_edges(points) -> np.ndarray:
    tri = Delaunay(np.asarray(points, dtype=float))
    if len(tri.coplanar):
        raise ValueError("triangulation dropped input points")
    s = np.sort(tri.simplices, axis=1)
    pairs = np.concatenate([s[:, [0, 1]], s[:, [0, 2]], s[:, [1, 2]]])
    return np.unique(pairs, axis=0)


def gen_geo(n: int, epsilon: float = DEFAULT_EPSILON, seed=None) -> Graph:
    """Delaunay triangulation of an ``n x n`` lattice with jittered positions.

    Node ``i * n + j`` sits at ``(i + u, j + v)`` with ``u, v`` uniform on
    ``[-epsilon, epsilon]``.
    """
    if n < 2:
        raise ValueError(f"lattice side must be at least 2, got {n}")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    rng = _rng(seed)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    pts = np.column_stack([i.ravel(), j.ravel()]).astype(float)
    pts += rng.uniform(-epsilon, epsilon, size=pts.shape)
    return Graph(n * n, delaunay_edges(pts), pts)


def lattice_side(n_nodes: int):
    """Integer square root of ``n_nodes`` or ``None`` if it is not a square."""
    r = int(round(np.sqrt(n_nodes)))
    return r if r * r == n_nodes else None


def generate(model: str, n_nodes: int, avg_degree: float, seed=None,
             epsilon: float = DEFAULT_EPSILON) -> Graph:
    """Build a network of ``model`` with ``n_nodes`` nodes.

    ``avg_degree`` sets the edge count for ER and ``m`` for BA; GEO ignores it
    because its degree is fixed by the triangulation.
    """
    model = model.upper()
    if model == "ER":
        return gen_er(n_nodes, avg_degree, seed)
    if model == "BA":
        return gen_ba(n_nodes, ba_edges_per_node(avg_degree), seed)
    if model == "GEO":
        side = lattice_side(n_nodes)
        if side is None:
            raise ValueError(f"GEO size {n_nodes} is not a perfect square")
        return gen_geo(side, epsilon, seed)
    raise ValueError(f"unknown model {model!r}")
