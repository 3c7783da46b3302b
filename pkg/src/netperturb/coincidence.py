"""Multiset similarity indices and coincidence similarity networks."""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class CoincidenceParams:
    """``delta`` regularizes near 0/0; ``D`` and ``E_exp`` set strictness."""

    delta: float = 0.0
    D: float = 5.0
    E_exp: float = 1.0

    def __post_init__(self):
        if self.delta < 0 or self.D < 1 or self.E_exp < 1:
            raise ValueError("need delta >= 0, D >= 1 and E_exp >= 1")


DEFAULT_PARAMS = CoincidenceParams()


def _check(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError(f"vectors must be 1-D with equal non-zero length, got {x.shape} and {y.shape}")
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("multiset vectors must be non-negative")
    return x, y


def _ratio(num, den):
    # 0/0 only arises with delta = 0 and an empty operand; treat as a match
    return 1.0 if den == 0 else num / den


def multiset_jaccard(x, y, params: CoincidenceParams = DEFAULT_PARAMS) -> float:
    x, y = _check(x, y)
    r = _ratio(np.minimum(x, y).sum() + params.delta, np.maximum(x, y).sum() + params.delta)
    return float(r ** params.D)


def interiority(x, y, params: CoincidenceParams = DEFAULT_PARAMS) -> float:
    x, y = _check(x, y)
    r = _ratio(np.minimum(x, y).sum() + params.delta, min(x.sum(), y.sum()) + params.delta)
    return float(r ** params.E_exp)


def coincidence(x, y, params: CoincidenceParams = DEFAULT_PARAMS) -> float:
    """Jaccard index times interiority index; symmetric and within [0, 1]."""
    return multiset_jaccard(x, y, params) * interiority(x, y, params)


def coincidence_matrix(curves, params: CoincidenceParams = DEFAULT_PARAMS) -> np.ndarray:
    curves = [np.asarray(c, dtype=float) for c in curves]
    n = len(curves)
    sim = np.eye(n)
    for i, j in combinations(range(n), 2):
        sim[i, j] = sim[j, i] = coincidence(curves[i], curves[j], params)
    return sim


def fig2_demo(magnitude: float = 0.95, angles=None, params: CoincidenceParams = DEFAULT_PARAMS):
    """Compare ``r = [1, 1]/sqrt(2)`` with rotated vectors of a fixed length.

    Returns rows ``(alpha, inner product, cosine, coincidence)``.
    """
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    angles = np.linspace(0, np.pi / 2, 91) if angles is None else np.asarray(angles, float)
    if np.any(angles < 0) or np.any(angles > np.pi / 2):
        raise ValueError("angles must lie in [0, pi/2]")
    ref = np.array([np.sqrt(2) / 2, np.sqrt(2) / 2])
    rows = []
    for a in angles:
        # cos(pi/2) is 6e-17, clip keeps the vector inside the first quadrant
        v = magnitude * np.clip([np.cos(a), np.sin(a)], 0.0, None)
        inner = float(ref @ v)
        cos = inner / (np.linalg.norm(ref) * np.linalg.norm(v))
        rows.append((float(a), inner, float(cos), coincidence(ref, v, params)))
    return rows


@dataclass
class SimilarityNetwork:
    nodes: list
    node_weights: np.ndarray
    weights: np.ndarray
    labels: dict

    def edges(self, threshold: float = 0.0):
        """``(u, v, weight)`` for every pair at or above ``threshold``."""
        n = len(self.nodes)
        return [(self.nodes[i], self.nodes[j], float(self.weights[i, j]))
                for i, j in combinations(range(n), 2) if self.weights[i, j] >= threshold]

    def to_dict(self, threshold: float = 0.0) -> dict:
        return {
            "nodes": [{"id": m, "weight": float(w), "label": self.labels.get(m)}
                      for m, w in zip(self.nodes, self.node_weights)],
            "edges": [{"source": u, "target": v, "weight": w}
                      for u, v, w in self.edges(threshold)],
        }

    def to_json(self, threshold: float = 0.0) -> str:
        return json.dumps(self.to_dict(threshold), indent=1)

    def to_dot(self, name: str = "simnet", threshold: float = 0.0,
               max_penwidth: float = 8.0, max_width: float = 1.5) -> str:
        """Graphviz text: ``penwidth`` and node ``width`` scale with the weights."""
        top = float(self.node_weights.max()) if len(self.nodes) else 0.0
        lines = [f'graph "{name}" {{']
        for m, w in zip(self.nodes, self.node_weights):
            width = 0.1 + max_width * (w / top if top > 0 else 0.0)
            lab = self.labels.get(m, "")
            lines.append(f'  "{m}" [width={width:.4f}, group="{lab}"];')
        for u, v, w in self.edges(threshold):
            lines.append(f'  "{u}" -- "{v}" [weight={w:.6g}, penwidth={max_penwidth * w:.4f}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_similarity_network(curves, labels=None, params: CoincidenceParams = DEFAULT_PARAMS,
                             raw_areas=None) -> SimilarityNetwork:
    """Complete weighted graph over change curves.

    ``curves`` are :class:`~netperturb.signals.ChangeCurve` objects sharing one
    grid. Node weight is the area under ``|c|``, or under ``raw_areas`` when
    given (one absolute raw-change curve per measurement).
    """
    curves = list(curves)
    grid = curves[0].grid
    for c in curves[1:]:
        if c.grid.shape != grid.shape or not np.array_equal(c.grid, grid):
            raise ValueError(f"curve {c.measurement} has a different grid")
    sim = coincidence_matrix([c.values for c in curves], params)
    if raw_areas is None:
        node_w = np.array([np.abs(c.values).sum() for c in curves])
    else:
        node_w = np.array([np.abs(np.asarray(a, float)).sum() for a in raw_areas])
    return SimilarityNetwork([c.measurement for c in curves], node_w, sim, dict(labels or {}))
