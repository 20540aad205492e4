"""Single-linkage clustering, minimal spanning trees and the threshold distance.

Ties between equal distances are broken towards the pair whose
(smaller index, larger index) is lexicographically smallest in canonical
industry order. Both the clustering and the Kruskal oracle use this rule,
so their trees coincide exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from indnet.errors import ConnectivityError, ConsistencyError, DomainError
from indnet.netbuild import DistanceMatrix


@dataclass(frozen=True)
class MergeStep:
    step: int
    distance: float
    cluster_a: frozenset[str]
    cluster_b: frozenset[str]
    pair: tuple[str, str]


@dataclass(frozen=True)
class MergeSequence:
    steps: tuple[MergeStep, ...]

    def distances(self) -> list[float]:
        return [s.distance for s in self.steps]

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class SpanningTree:
    industries: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    threshold: float

    def edge_set(self) -> set[frozenset[str]]:
        return {frozenset((a, b)) for a, b, _ in self.edges}

    def total_distance(self) -> float:
        return sum(d for _, _, d in self.edges)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def _components(d: DistanceMatrix) -> list[list[str]]:
    uf = UnionFind(d.n)
    for i, j in zip(*np.nonzero(np.isfinite(d.distances))):
        uf.union(int(i), int(j))
    groups: dict[int, list[str]] = {}
    for i, name in enumerate(d.industries):
        groups.setdefault(uf.find(i), []).append(name)
    return list(groups.values())


def _make_tree(d: DistanceMatrix, pairs: Iterable[tuple[int, int]]) -> SpanningTree:
    ids = d.industries
    edges = tuple(
        (ids[i], ids[j], float(d.distances[i, j])) for i, j in sorted(pairs)
    )
    threshold = max((e[2] for e in edges), default=0.0)
    return SpanningTree(ids, edges, threshold)


def single_linkage(d: DistanceMatrix) -> tuple[MergeSequence, SpanningTree]:
    """Agglomerate clusters by minimum inter-cluster pairwise distance.

    At each step every pair of industries lying in different clusters is a
    candidate; the smallest distance wins and its two clusters are merged.
    """
    n = d.n
    if n < 2:
        raise DomainError("need at least two industries")
    label = np.arange(n)
    # candidate distances; intra-cluster pairs and the lower triangle are masked
    live = np.triu(np.array(d.distances, dtype=float), k=1)
    live[np.tril_indices(n)] = np.inf
    ids = d.industries
    steps = []
    pairs = []
    for step in range(1, n):
        best = live.min()
        if not np.isfinite(best):
            groups: dict[int, list[str]] = {}
            for i, lab in enumerate(label):
                groups.setdefault(int(lab), []).append(ids[i])
            raise ConnectivityError(groups.values())
        # argwhere is row-major, so the first hit is the smallest (i, j)
        i, j = (int(x) for x in np.argwhere(live == best)[0])
        la, lb = label[i], label[j]
        members_a = np.flatnonzero(label == la)
        members_b = np.flatnonzero(label == lb)
        steps.append(
            MergeStep(
                step,
                float(best),
                frozenset(ids[k] for k in members_a),
                frozenset(ids[k] for k in members_b),
                (ids[i], ids[j]),
            )
        )
        pairs.append((i, j))
        label[members_b] = la
        merged = np.concatenate([members_a, members_b])
        live[np.ix_(merged, merged)] = np.inf

    merges = MergeSequence(tuple(steps))
    tree = _make_tree(d, pairs)
    if tree.threshold != max(merges.distances()):
        raise ConsistencyError("tree threshold differs from the largest merge distance")
    return merges, tree


def mst_oracle(d: DistanceMatrix) -> SpanningTree:
    """Kruskal: sort finite pairs by (distance, i, j) and keep acyclic edges."""
    n = d.n
    iu, ju = np.triu_indices(n, k=1)
    dist = d.distances[iu, ju]
    finite = np.isfinite(dist)
    iu, ju, dist = iu[finite], ju[finite], dist[finite]
    order = np.lexsort((ju, iu, dist))
    uf = UnionFind(n)
    pairs = []
    for k in order:
        i, j = int(iu[k]), int(ju[k])
        if uf.union(i, j):
            pairs.append((i, j))
            if len(pairs) == n - 1:
                break
    if len(pairs) != n - 1:
        raise ConnectivityError(_components(d))
    return _make_tree(d, pairs)


def replaced_links(a: SpanningTree, b: SpanningTree) -> int:
    if set(a.industries) != set(b.industries):
        raise DomainError("trees span different industry sets")
    return len(a.edge_set() - b.edge_set())
