"""The fourteen topological measurements and the walk machinery behind them.

Every routine works on the dense adjacency matrix; graphs in this package
have at most a few hundred nodes, where dense BLAS beats per-node Python
loops by a wide margin. All reductions run in node-id order so the results
are bit-stable.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .graph import UNREACHABLE, Graph, all_pairs_distances

HIER_LEVELS = (2, 3, 4, 5)

MEASUREMENTS = (
    "Degree",
    "Clust.Coeff.",
    "Betw.Centr.",
    "Assortativity",
    "Avg.Short.Paths",
    *(f"Hier.Deg_h{h}" for h in HIER_LEVELS),
    *(f"Access_h{h}" for h in HIER_LEVELS),
    "Gen.Access.",
)


@dataclass(frozen=True)
class MeasurementReport:
    """Network-wide value of one measurement, with per-node values if local.

    ``degenerate`` marks a value that is a placeholder convention (e.g. the
    assortativity of a regular graph); such cells are skipped when averaging
    over realizations. ``notes`` carries informative conditions that leave
    the value meaningful, such as a disconnected graph.
    """

    value: float
    per_node: np.ndarray | None = None
    degenerate: bool = False
    notes: tuple = field(default_factory=tuple)

    @property
    def flag(self) -> str:
        tags = (["degenerate"] if self.degenerate else []) + list(self.notes)
        return "|".join(tags)


def _report(per_node, degenerate=False, notes=()):
    return MeasurementReport(float(np.mean(per_node)), per_node, degenerate, tuple(notes))


def avg_degree(g: Graph) -> float:
    return 2.0 * g.num_edges / g.n


def clustering_coefficient(g: Graph) -> MeasurementReport:
    """Local clustering per node; nodes with degree below 2 score 0."""
    a = g.adjacency()
    k = g.degrees().astype(float)
    tri = np.einsum("ij,ji->i", a @ a, a) / 2.0
    pairs = k * (k - 1) / 2.0
    cc = np.divide(tri, pairs, out=np.zeros_like(tri), where=pairs > 0)
    return _report(cc)


def _path_counts(a, dist):
    """Number of shortest paths from every source (row) to every target."""
    n = len(a)
    sigma = np.eye(n)
    finite = dist[np.isfinite(dist)]
    for level in range(1, int(finite.max()) + 1 if finite.size else 1):
        prev = np.where(dist == level - 1, sigma, 0.0)
        sigma = np.where(dist == level, prev @ a, sigma)
    return sigma


def betweenness_centrality(g: Graph, dist=None) -> MeasurementReport:
    """Unnormalised shortest-path betweenness, each unordered pair once.

    Brandes dependency accumulation, run level by level for all sources
    simultaneously: ``delta[s, v] = sum_w sigma[s,v]/sigma[s,w] * (1 + delta[s,w])``
    over successors ``w`` of ``v`` on shortest paths from ``s``.
    """
    a = g.adjacency()
    if dist is None:
        dist = all_pairs_distances(g)
    sigma = _path_counts(a, dist)
    finite = dist[np.isfinite(dist)]
    depth = int(finite.max()) if finite.size else 0
    delta = np.zeros_like(sigma)
    for level in range(depth - 1, 0, -1):
        succ = np.divide(1.0 + delta, sigma, out=np.zeros_like(sigma), where=dist == level + 1)
        delta = np.where(dist == level, sigma * (succ @ a), delta)
    return _report(delta.sum(axis=0) / 2.0)


def assortativity(g: Graph) -> MeasurementReport:
    """Degree assortativity: Pearson correlation of endpoint degrees over edges.

    Zero endpoint-degree variance (regular graphs) gives ``0`` flagged as
    degenerate.
    """
    if g.num_edges == 0:
        raise ValueError("assortativity needs at least one edge")
    k = g.degrees().astype(float)
    u, v = g.edges[:, 0], g.edges[:, 1]
    x = np.concatenate([k[u], k[v]])
    y = np.concatenate([k[v], k[u]])
    xc, yc = x - x.mean(), y - y.mean()
    den = np.sqrt((xc @ xc) * (yc @ yc))
    if den <= 1e-12 * max(1.0, x @ x):
        return MeasurementReport(0.0, None, True, ("zero-degree-variance",))
    r = float(np.clip((xc @ yc) / den, -1.0, 1.0))
    return MeasurementReport(r)


def avg_shortest_path(g: Graph, dist=None) -> MeasurementReport:
    """Mean hop distance over the unordered pairs that are connected."""
    if dist is None:
        dist = all_pairs_distances(g)
    iu = np.triu_indices(g.n, 1)
    d = dist[iu]
    ok = np.isfinite(d)
    if not ok.any():
        raise ValueError("no connected node pair")
    notes = () if ok.all() else ("disconnected",)
    return MeasurementReport(float(d[ok].mean()), None, False, notes)


def hierarchical_degree(g: Graph, h: int, dist=None) -> MeasurementReport:
    """Edges joining ring ``h-1`` to ring ``h`` around each node."""
    if h < 1:
        raise ValueError("h must be at least 1")
    if dist is None:
        dist = all_pairs_distances(g)
    if g.num_edges == 0:
        return _report(np.zeros(g.n))
    du = dist[:, g.edges[:, 0]]
    dv = dist[:, g.edges[:, 1]]
    cross = ((du == h - 1) & (dv == h)) | ((dv == h - 1) & (du == h))
    return _report(cross.sum(axis=1).astype(float))


def transition_matrix(g: Graph, allow_isolated: bool = False) -> np.ndarray:
    """Uniform random-walk transition matrix ``T[u, v] = 1/deg(u)``.

    Isolated nodes have no defined row; they raise unless ``allow_isolated``,
    in which case their row is left at zero.
    """
    k = g.degrees().astype(float)
    if not allow_isolated and np.any(k == 0):
        raise ValueError(f"isolated node {int(np.argmin(k))}: transition row undefined")
    inv = np.divide(1.0, k, out=np.zeros_like(k), where=k > 0)
    return g.adjacency() * inv[:, None]


def row_entropy_exp(p: np.ndarray) -> np.ndarray:
    """``exp`` of the Shannon entropy of each row of a probability matrix."""
    logs = np.log(p, out=np.zeros_like(p), where=p > 0)
    return np.exp(-(p * logs).sum(axis=1))


def _isolated_notes(k):
    return ("isolated-nodes",) if np.any(k == 0) else ()


def accessibility(g: Graph, h: int, ring_only: bool = False, dist=None) -> MeasurementReport:
    """Exponential of the entropy of the ``h``-step walk distribution.

    The default uses the full row of ``T**h``. With ``ring_only`` the row is
    restricted to nodes at distance exactly ``h`` and renormalised. Isolated
    nodes (no walk) score 0, consistent with their degree.
    """
    if h < 1:
        raise ValueError("h must be at least 1")
    k = g.degrees()
    t = transition_matrix(g, allow_isolated=True)
    p = np.linalg.matrix_power(t, h)
    if ring_only:
        if dist is None:
            dist = all_pairs_distances(g)
        p = np.where(dist == h, p, 0.0)
        mass = p.sum(axis=1, keepdims=True)
        p = np.divide(p, mass, out=np.zeros_like(p), where=mass > 0)
        alive = mass[:, 0] > 0
    else:
        alive = k > 0
    acc = np.where(alive, row_entropy_exp(p), 0.0)
    return _report(acc, notes=_isolated_notes(k))


def walk_matrix_exponential(t: np.ndarray) -> np.ndarray:
    """``exp(T) / e``: walks of every length weighted by ``1/l!``.

    scipy's scaling-and-squaring Pade ``expm``.
    """
    return expm(t) / np.e


def generalized_accessibility(g: Graph) -> MeasurementReport:
    """Accessibility computed from ``exp(T)/e`` instead of a single power."""
    k = g.degrees()
    p = walk_matrix_exponential(transition_matrix(g, allow_isolated=True))
    acc = np.where(k > 0, row_entropy_exp(p), 0.0)
    return _report(acc, notes=_isolated_notes(k))


def measure_all(g: Graph, ring_only: bool = False) -> dict[str, MeasurementReport]:
    """All fourteen measurements of ``g``, keyed by their abbreviation.

    Failing individual measurements are recorded as degenerate NaN reports;
    only a graph on which every measurement fails raises.
    """
    dist = all_pairs_distances(g)
    routines = {
        "Degree": lambda: _report(g.degrees().astype(float)),
        "Clust.Coeff.": lambda: clustering_coefficient(g),
        "Betw.Centr.": lambda: betweenness_centrality(g, dist),
        "Assortativity": lambda: assortativity(g),
        "Avg.Short.Paths": lambda: avg_shortest_path(g, dist),
        "Gen.Access.": lambda: generalized_accessibility(g),
    }
    for h in HIER_LEVELS:
        routines[f"Hier.Deg_h{h}"] = lambda h=h: hierarchical_degree(g, h, dist)
        routines[f"Access_h{h}"] = lambda h=h: accessibility(g, h, ring_only, dist)
    out, errors = {}, []
    for name in MEASUREMENTS:
        try:
            out[name] = routines[name]()
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            errors.append(f"{name}: {exc}")
            out[name] = MeasurementReport(float("nan"), None, True, ("failed",))
    if len(errors) == len(MEASUREMENTS):
        raise ValueError("every measurement failed: " + "; ".join(errors))
    return out


def measurement_values(reports: dict[str, MeasurementReport]) -> dict[str, float]:
    return {name: reports[name].value for name in MEASUREMENTS}


__all__ = [
    "MEASUREMENTS", "HIER_LEVELS", "UNREACHABLE", "MeasurementReport", "avg_degree",
    "clustering_coefficient", "betweenness_centrality", "assortativity",
    "avg_shortest_path", "hierarchical_degree", "transition_matrix", "accessibility",
    "generalized_accessibility", "walk_matrix_exponential", "row_entropy_exp",
    "measure_all", "measurement_values",
]
