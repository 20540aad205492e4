"""Per-mille output shares, inter-industry link weights and distances.

Two industries are linked by the sum over products of the products of their
per-mille output shares; the distance between them is the reciprocal of that
weight, or ``inf`` when they share no product.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from indnet.errors import DomainError
from indnet.ingest import OutputTable

PER_MILLE = 1e3
UNREACHABLE = np.inf


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class NormalizedTable:
    year: int
    industries: tuple[str, ...]
    products: tuple[str, ...]
    shares: np.ndarray


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    industries: tuple[str, ...]
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.industries)

    def weight(self, a: str, b: str) -> float:
        return float(self.weights[self.industries.index(a), self.industries.index(b)])

    def offdiag(self) -> np.ndarray:
        """Copy of the weights with the (unused) diagonal zeroed."""
        w = np.array(self.weights)
        np.fill_diagonal(w, 0.0)
        return w

    def to_csv(self) -> str:
        return _square_csv(self.industries, self.weights)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric distances; ``inf`` marks unreachable pairs and the diagonal."""

    industries: tuple[str, ...]
    distances: np.ndarray

    @property
    def n(self) -> int:
        return len(self.industries)

    def distance(self, a: str, b: str) -> float:
        return float(self.distances[self.industries.index(a), self.industries.index(b)])

    def pair_values(self) -> np.ndarray:
        """Distances of the unordered pairs i < j in row-major order."""
        return self.distances[np.triu_indices(self.n, k=1)]

    def to_csv(self) -> str:
        return _square_csv(self.industries, self.distances)

    @classmethod
    def from_array(cls, industries, distances) -> "DistanceMatrix":
        d = np.array(distances, dtype=float)
        if d.shape != (len(industries), len(industries)):
            raise DomainError("distance matrix shape does not match industry list")
        if not np.array_equal(d, d.T):
            raise DomainError("distance matrix is not symmetric")
        np.fill_diagonal(d, UNREACHABLE)
        if np.any(d <= 0):
            raise DomainError("distances must be strictly positive")
        return cls(tuple(industries), _readonly(d))


@dataclass(frozen=True)
class BipartiteGraph:
    industries: tuple[str, ...]
    products: tuple[str, ...]
    edges: frozenset[tuple[str, str]]


def _square_csv(ids, matrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["", *ids])
    for name, row in zip(ids, matrix):
        writer.writerow([name, *(repr(float(x)) for x in row)])
    return buf.getvalue()


def normalize_rows(t: OutputTable) -> NormalizedTable:
    totals = t.totals()
    zero = np.flatnonzero(totals <= 0)
    if zero.size:
        names = [t.industries[i] for i in zero]
        raise DomainError(f"industries with zero total output: {names}")
    shares = t.values / totals[:, None] * PER_MILLE
    return NormalizedTable(t.year, t.industries, t.products, _readonly(shares))


def similarity_weights(nt: NormalizedTable) -> WeightMatrix:
    w = nt.shares @ nt.shares.T
    # mirror the upper triangle so symmetry is exact, not up to BLAS rounding
    w = np.triu(w) + np.triu(w, k=1).T
    return WeightMatrix(nt.industries, _readonly(w))


def distance_matrix(w: WeightMatrix) -> DistanceMatrix:
    d = np.full(w.weights.shape, UNREACHABLE)
    positive = w.weights > 0
    d[positive] = 1.0 / w.weights[positive]
    np.fill_diagonal(d, UNREACHABLE)
    return DistanceMatrix(w.industries, _readonly(d))


def bipartite_and_projection(t: OutputTable) -> tuple[BipartiteGraph, set[tuple[str, str]]]:
    produced = t.values > 0
    edges = frozenset(
        (t.industries[i], t.products[p]) for i, p in zip(*np.nonzero(produced))
    )
    graph = BipartiteGraph(t.industries, t.products, edges)
    projection = {
        (t.industries[a], t.industries[b])
        for a, b in combinations(range(t.n_industries), 2)
        if np.any(produced[a] & produced[b])
    }
    return graph, projection


def build_network(t: OutputTable) -> tuple[WeightMatrix, DistanceMatrix]:
    w = similarity_weights(normalize_rows(t))
    return w, distance_matrix(w)
