"""Similarity-based agglomerative clustering and dendrogram export.

Clusters are numbered like scipy's linkage: leaves are ``0..n-1`` and the
cluster created by merge ``i`` gets id ``n + i``. Heights are similarities,
so they fall as merging proceeds.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

LINKAGES = ("average", "single", "complete")


@dataclass(frozen=True)
class Dendrogram:
    leaves: tuple
    merges: tuple  # (cluster_a, cluster_b, height) with cluster_a < cluster_b

    def members(self, cluster: int) -> frozenset:
        n = len(self.leaves)
        if cluster < n:
            return frozenset([cluster])
        a, b, _ = self.merges[cluster - n]
        return self.members(a) | self.members(b)

    def cut(self, threshold: float) -> list[frozenset]:
        """Clusters obtained by applying only merges with height >= threshold."""
        n = len(self.leaves)
        active = {i: frozenset([i]) for i in range(n)}
        for k, (a, b, h) in enumerate(self.merges):
            if h < threshold:
                break
            active[n + k] = active.pop(a) | active.pop(b)
        return sorted(active.values(), key=min)

    def cut_k(self, k: int) -> list[frozenset]:
        """Partition into ``k`` clusters (undo the last ``k - 1`` merges)."""
        n = len(self.leaves)
        if not 1 <= k <= n:
            raise ValueError(f"k must be in 1..{n}")
        active = {i: frozenset([i]) for i in range(n)}
        for idx, (a, b, _) in enumerate(self.merges[: n - k]):
            active[n + idx] = active.pop(a) | active.pop(b)
        return sorted(active.values(), key=min)

    def to_dict(self) -> dict:
        return {"leaves": list(self.leaves),
                "merges": [{"a": a, "b": b, "height": h} for a, b, h in self.merges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _validate(sim):
    sim = np.asarray(sim, dtype=float)
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1] or sim.shape[0] < 1:
        raise ValueError("similarity matrix must be square")
    if not np.allclose(sim, sim.T, rtol=0, atol=1e-12):
        raise ValueError("similarity matrix must be symmetric")
    if np.any(sim < 0) or np.any(sim > 1) or np.any(~np.isfinite(sim)):
        raise ValueError("similarities must lie in [0, 1]")
    if not np.allclose(np.diag(sim), 1.0, rtol=0, atol=1e-12):
        raise ValueError("similarity matrix must have a unit diagonal")
    return sim


def agglomerate(sim, leaves=None, linkage: str = "average") -> Dendrogram:
    """Repeatedly merge the two active clusters with maximum similarity.

    Between-cluster similarity is the mean (``average``), maximum
    (``single``) or minimum (``complete``) over cross pairs of leaves. Ties go
    to the lexicographically smallest pair of cluster ids.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    sim = _validate(sim)
    n = len(sim)
    leaves = tuple(range(n)) if leaves is None else tuple(leaves)
    if len(leaves) != n:
        raise ValueError("one leaf name per matrix row is required")
    agg = {"average": np.mean, "single": np.max, "complete": np.min}[linkage]
    active = {i: [i] for i in range(n)}
    merges = []
    next_id = n
    while len(active) > 1:
        ids = sorted(active)
        best = None
        for x, a in enumerate(ids):
            for b in ids[x + 1:]:
                s = float(agg(sim[np.ix_(active[a], active[b])]))
                if best is None or s > best[0]:
                    best = (s, a, b)
        s, a, b = best
        merges.append((a, b, s))
        active[next_id] = active.pop(a) + active.pop(b)
        next_id += 1
    return Dendrogram(leaves, tuple(merges))


_PLAIN = re.compile(r"^[A-Za-z0-9.\-]+$")


def _fmt(x):
    return format(x, ".10g")


def _quote(label):
    label = str(label)
    return label if _PLAIN.match(label) else "'" + label.replace("'", "''") + "'"


def dendrogram_to_newick(d: Dendrogram) -> str:
    """Newick text; a branch spans the similarity drop from child to parent.

    Leaves sit at similarity 1, so a leaf merged at height ``h`` gets branch
    length ``1 - h``. Children are written in order of their smallest leaf.
    """
    n = len(d.leaves)
    if n == 1:
        return f"{_quote(d.leaves[0])};"
    height = {i: 1.0 for i in range(n)}
    text = {i: _quote(d.leaves[i]) for i in range(n)}
    first = {i: i for i in range(n)}
    for k, (a, b, h) in enumerate(d.merges):
        if first[b] < first[a]:
            a, b = b, a
        text[n + k] = (f"({text.pop(a)}:{_fmt(height[a] - h)},"
                       f"{text.pop(b)}:{_fmt(height[b] - h)})")
        height[n + k] = h
        first[n + k] = first[a]
    return text[n + len(d.merges) - 1] + ";"


def parse_newick(text: str):
    """Parse Newick into nested ``(children, length)`` / ``(name, length)`` tuples.

    Bracketed comments are ignored. Returns the root node.
    """
    text = re.sub(r"\[[^\]]*\]", "", text).strip()
    if not text.endswith(";"):
        raise ValueError("Newick text must end with ';'")
    pos = 0

    def label():
        nonlocal pos
        if text[pos] == "'":
            end = pos + 1
            out = []
            while True:
                if text[end] == "'" and text[end + 1: end + 2] == "'":
                    out.append("'")
                    end += 2
                elif text[end] == "'":
                    break
                else:
                    out.append(text[end])
                    end += 1
            pos = end + 1
            return "".join(out)
        m = re.compile(r"[^(),:;]*").match(text, pos)
        pos = m.end()
        return m.group().strip()

    def length():
        nonlocal pos
        if text[pos] != ":":
            return None
        m = re.compile(r":\s*([^(),;]+)").match(text, pos)
        pos = m.end()
        return float(m.group(1))

    def node():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            kids = [node()]
            while text[pos] == ",":
                pos += 1
                kids.append(node())
            if text[pos] != ")":
                raise ValueError(f"expected ')' at {pos}")
            pos += 1
            label()
            return (tuple(kids), length())
        return (label(), length())

    root = node()
    if text[pos] != ";":
        raise ValueError(f"trailing text at {pos}")
    return root


def newick_leaves(tree) -> list:
    body, _ = tree
    if isinstance(body, tuple):
        return [x for kid in body for x in newick_leaves(kid)]
    return [body]


def newick_partitions(tree) -> set:
    """Leaf sets of every internal node of a parsed tree."""
    out = set()

    def walk(t):
        body, _ = t
        if isinstance(body, tuple):
            leaves = frozenset(x for kid in body for x in walk(kid))
            out.add(leaves)
            return leaves
        return frozenset([body])

    walk(tree)
    return out


def dendrogram_partitions(d: Dendrogram) -> set:
    n = len(d.leaves)
    return {frozenset(d.leaves[i] for i in d.members(n + k)) for k in range(len(d.merges))}
