"""Undirected simple graphs and the traversal primitives built on them.

Nodes are the integers ``0..n-1``. Edges are kept as a lexicographically
sorted ``(E, 2)`` integer array with ``u < v`` in every row, so iteration
order never depends on insertion order or hashing.
"""
from __future__ import annotations

from collections import deque
from pathlib import Path

import numpy as np

#: Distance reported for node pairs in different components.
UNREACHABLE = np.inf


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : array-like of shape (E, 2)
        Unordered node pairs. Orientation is normalised to ``u < v``.
    coords : array-like of shape (n, 2), optional
        Node positions (only geographical networks carry them).
    """

    __slots__ = ("_n", "_edges", "_coords", "_adj", "_deg", "_nbrs")

    def __init__(self, n, edges=(), coords=None):
        n = int(n)
        if n < 1:
            raise ValueError(f"node count must be positive, got {n}")
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if arr.size:
            arr = np.sort(arr, axis=1)
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("self-loops are not allowed")
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError(f"edge endpoint outside 0..{n - 1}")
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
            if np.any(np.all(arr[1:] == arr[:-1], axis=1)):
                raise ValueError("multi-edges are not allowed")
        arr.setflags(write=False)
        if coords is not None:
            coords = np.array(coords, dtype=float).reshape(n, 2)
            coords.setflags(write=False)
        self._n = n
        self._edges = arr
        self._coords = coords
        self._adj = None
        self._deg = None
        self._nbrs = None

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def coords(self):
        return self._coords

    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix (float64, read-only)."""
        if self._adj is None:
            a = np.zeros((self._n, self._n))
            if self.num_edges:
                u, v = self._edges[:, 0], self._edges[:, 1]
                a[u, v] = 1.0
                a[v, u] = 1.0
            a.setflags(write=False)
            self._adj = a
        return self._adj

    def degrees(self) -> np.ndarray:
        if self._deg is None:
            d = np.bincount(self._edges.ravel(), minlength=self._n)
            d.setflags(write=False)
            self._deg = d
        return self._deg

    def neighbors(self, v: int) -> list[int]:
        """Neighbours of ``v`` in increasing id order."""
        if self._nbrs is None:
            nbrs = [[] for _ in range(self._n)]
            for u, w in self._edges.tolist():
                nbrs[u].append(w)
                nbrs[w].append(u)
            self._nbrs = [sorted(x) for x in nbrs]
        return self._nbrs[v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency()[u, v])

    def with_edges(self, edges) -> "Graph":
        """New graph on the same nodes (and coordinates) with ``edges``."""
        return Graph(self._n, edges, self._coords)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._edges, other._edges)

    def __hash__(self):
        return hash((self._n, self._edges.tobytes()))

    def __repr__(self):
        return f"Graph(n={self._n}, E={self.num_edges})"


def ring_decomposition(g: Graph, v: int, h_max: int) -> list[set[int]]:
    """Nodes at exact shortest-path distance ``0..h_max`` from ``v``.

    Rings beyond the eccentricity of ``v`` are returned as empty sets.
    """
    if not 0 <= v < g.n:
        raise ValueError(f"node {v} not in graph with {g.n} nodes")
    if h_max < 0:
        raise ValueError("h_max must be non-negative")
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if dist[u] == h_max:
            continue
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    rings = [set() for _ in range(h_max + 1)]
    for u, d in dist.items():
        rings[d].add(u)
    return rings


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by their smallest member."""
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Hop distances between every pair of nodes.

    Computed for all sources at once by frontier propagation on the adjacency
    matrix. Unreachable pairs hold :data:`UNREACHABLE`.
    """
    n = g.n
    a = g.adjacency()
    dist = np.full((n, n), UNREACHABLE)
    np.fill_diagonal(dist, 0.0)
    reached = np.eye(n, dtype=bool)
    frontier = np.eye(n)
    d = 0
    while True:
        d += 1
        nxt = (frontier @ a > 0) & ~reached
        if not nxt.any():
            break
        dist[nxt] = d
        reached |= nxt
        frontier = nxt.astype(float)
    return dist


def read_edgelist(path) -> Graph:
    """Read the ``N E`` header followed by one ``u v`` line per edge.

    Node coordinates, when present, follow the edges as lines of the form
    ``c <node> <x> <y>``.
    """
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty edge list")
    n, e = int(lines[0][0]), int(lines[0][1])
    edges, coords = [], None
    for parts in lines[1:]:
        if parts[0] == "c":
            if coords is None:
                coords = np.zeros((n, 2))
            coords[int(parts[1])] = float(parts[2]), float(parts[3])
        else:
            edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != e:
        raise ValueError(f"{path}: header announces {e} edges, found {len(edges)}")
    return Graph(n, edges, coords)


def write_edgelist(g: Graph, path) -> None:
    out = [f"{g.n} {g.num_edges}"]
    out += [f"{u} {v}" for u, v in g.edges.tolist()]
    if g.coords is not None:
        out += [f"c {i} {x!r} {y!r}" for i, (x, y) in enumerate(g.coords.tolist())]
    Path(path).write_text("\n".join(out) + "\n")
