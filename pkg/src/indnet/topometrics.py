"""Threshold graphs and the redundancy / residuality coefficients.

A pair counts as a unit arc when its distance is finite and at most the
threshold L (pairs sitting exactly at L are inside). The same rule feeds the
boolean graph, the redundancy count and both sums of the residuality ratio.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from indnet.errors import ConsistencyError, DomainError
from indnet.mstcluster import SpanningTree, replaced_links
from indnet.netbuild import DistanceMatrix


@dataclass(frozen=True, eq=False)
class BooleanAdjacency:
    industries: tuple[str, ...]
    unit_arcs: np.ndarray
    threshold: float

    @property
    def n(self) -> int:
        return len(self.industries)

    def count(self) -> int:
        """Number of unordered unit-arc pairs."""
        return int(np.triu(self.unit_arcs, k=1).sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["", *self.industries])
        for name, row in zip(self.industries, self.unit_arcs):
            writer.writerow([name, *(int(x) for x in row)])
        return buf.getvalue()

    def to_pgm(self, cell: int = 8) -> bytes:
        """Binary greyscale grid: unit arcs black, null arcs white."""
        grid = np.where(self.unit_arcs, 0, 255).astype(np.uint8)
        grid = np.kron(grid, np.ones((cell, cell), dtype=np.uint8))
        h, w = grid.shape
        return f"P5\n{w} {h}\n255\n".encode("ascii") + grid.tobytes()


@dataclass(frozen=True)
class YearMetrics:
    year: int
    L: float
    RL: int | None
    S: int
    R: float

    def as_dict(self) -> dict:
        return {"year": self.year, "L": self.L, "RL": self.RL, "S": self.S, "R": self.R}


@dataclass(frozen=True)
class TopoReport:
    rows: tuple[YearMetrics, ...]
    adjacency: dict[int, BooleanAdjacency] = field(default_factory=dict, compare=False)

    def years(self) -> list[int]:
        return [r.year for r in self.rows]

    def series(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def to_json(self) -> str:
        return json.dumps([r.as_dict() for r in self.rows], indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["year", "L", "RL", "S", "R"])
        for r in self.rows:
            writer.writerow([r.year, repr(r.L), "" if r.RL is None else r.RL, r.S, repr(r.R)])
        return buf.getvalue()

    def to_svg(self, name: str) -> str:
        """Line chart of one coefficient against year."""
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        pts = [(r.year, getattr(r, name)) for r in self.rows if getattr(r, name) is not None]
        fig, ax = plt.subplots(figsize=(6, 3.5))
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", color="black")
        ax.set_xlabel("year")
        ax.set_ylabel(name)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        buf = io.StringIO()
        with matplotlib.rc_context({"svg.hashsalt": "indnet"}):
            fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
        return buf.getvalue()


def boolean_graph(d: DistanceMatrix, L: float) -> BooleanAdjacency:
    if not L > 0:
        raise DomainError("threshold must be positive")
    arcs = np.isfinite(d.distances) & (d.distances <= L)
    np.fill_diagonal(arcs, False)
    arcs.flags.writeable = False
    return BooleanAdjacency(d.industries, arcs, float(L))


def redundancy(d: DistanceMatrix, L: float) -> int:
    pairs = d.pair_values()
    m = int(np.count_nonzero(np.isfinite(pairs) & (pairs <= L)))
    if m < d.n - 1:
        raise ConsistencyError(
            f"only {m} pairs within threshold {L}; a spanning tree needs {d.n - 1}"
        )
    return m - (d.n - 1)


def residuality(d: DistanceMatrix, L: float) -> float:
    pairs = d.pair_values()
    finite = pairs[np.isfinite(pairs)]
    inside = finite[finite <= L]
    outside = finite[finite > L]
    if inside.size == 0:
        raise ConsistencyError(f"no pair within threshold {L}")
    return math.fsum(1.0 / outside) / math.fsum(1.0 / inside)


def build_report(series: Sequence[tuple[int, DistanceMatrix, SpanningTree]]) -> TopoReport:
    if not series:
        raise DomainError("report needs at least one year")
    nodes = set(series[0][1].industries)
    rows = []
    adjacency = {}
    prev_tree = None
    for year, d, tree in series:
        if set(d.industries) != nodes or set(tree.industries) != nodes:
            raise DomainError(f"industry set of {year} differs from {series[0][0]}")
        L = tree.threshold
        rl = None if prev_tree is None else replaced_links(prev_tree, tree)
        rows.append(YearMetrics(int(year), float(L), rl, redundancy(d, L), residuality(d, L)))
        adjacency[int(year)] = boolean_graph(d, L)
        prev_tree = tree
    return TopoReport(tuple(rows), adjacency)
