"""Modularity communities on the weighted industry network.

Greedy modularity optimisation in the local-moving + aggregation style of
Blondel et al., made deterministic: nodes are visited in canonical industry
order and ties between candidate communities go to the lowest label.
Self-similarity on the weight diagonal is ignored.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from indnet.errors import DomainError
from indnet.netbuild import WeightMatrix

UNSTABLE = "unstable"
# green, red, blue, yellow first; white is reserved for unstable industries
PALETTE = ("#2ca02c", "#d62728", "#1f77b4", "#ffdd00", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#17becf", "#bcbd22")
UNSTABLE_COLOR = "#ffffff"

_GAIN_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    industries: tuple[str, ...]
    labels: tuple[int, ...]
    modularity: float
    pass_scores: tuple[float, ...] = ()

    @property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.industries, self.labels))

    @property
    def n_communities(self) -> int:
        return len(set(self.labels))

    def groups(self) -> list[set[str]]:
        out: list[set[str]] = [set() for _ in range(self.n_communities)]
        for name, lab in zip(self.industries, self.labels):
            out[lab].add(name)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["industry", "community"])
        writer.writerows(zip(self.industries, self.labels))
        return buf.getvalue()


def community_color(label) -> str:
    if label == UNSTABLE or label is None:
        return UNSTABLE_COLOR
    return PALETTE[int(label) % len(PALETTE)]


def _relabel(labels: Sequence[int]) -> np.ndarray:
    """Renumber to 0..k-1 in order of first appearance."""
    seen: dict[int, int] = {}
    return np.array([seen.setdefault(int(x), len(seen)) for x in labels], dtype=int)


def _modularity(a: np.ndarray, labels: np.ndarray, resolution: float) -> float:
    two_m = a.sum()
    if two_m <= 0:
        return 0.0
    k = a.sum(axis=1)
    q = 0.0
    for c in np.unique(labels):
        members = labels == c
        internal = a[np.ix_(members, members)].sum()
        tot = k[members].sum()
        q += internal / two_m - resolution * (tot / two_m) ** 2
    return float(q)


def modularity(w: WeightMatrix, p: Partition, resolution: float = 1.0) -> float:
    if tuple(p.industries) != tuple(w.industries):
        raise DomainError("partition does not cover the weight matrix nodes")
    return _modularity(w.offdiag(), np.asarray(p.labels), resolution)


def _local_moving(a: np.ndarray, resolution: float) -> np.ndarray:
    """One level of greedy node moves; returns community labels per node."""
    n = a.shape[0]
    k = a.sum(axis=1)
    two_m = k.sum()
    labels = np.arange(n)
    tot = k.copy()
    moved = True
    while moved:
        moved = False
        for i in range(n):
            own = labels[i]
            tot[own] -= k[i]
            links = np.bincount(labels, weights=a[i], minlength=n)
            links[own] -= a[i, i]
            # gain of joining c relative to staying isolated, up to a factor 2/2m
            gain = links - resolution * tot * k[i] / two_m
            candidates = np.flatnonzero(links > 0)
            best, best_gain = own, gain[own]
            for c in candidates:
                if gain[c] > best_gain + _GAIN_TOL * two_m:
                    best, best_gain = c, gain[c]
            tot[best] += k[i]
            if best != own:
                labels[i] = best
                moved = True
    return _relabel(labels)


def _aggregate(a: np.ndarray, labels: np.ndarray) -> np.ndarray:
    h = np.zeros((a.shape[0], labels.max() + 1))
    h[np.arange(a.shape[0]), labels] = 1.0
    return h.T @ a @ h


def detect_communities(
    w: WeightMatrix, resolution: float = 1.0, max_passes: int = 100
) -> Partition:
    if resolution <= 0:
        raise DomainError("resolution must be positive")
    a = w.offdiag()
    if np.any(a < 0) or not np.array_equal(a, a.T):
        raise DomainError("weights must be symmetric and non-negative")
    n = w.n
    membership = np.arange(n)
    if a.sum() <= 0:
        return Partition(w.industries, tuple(range(n)), 0.0, (0.0,))

    scores = [_modularity(a, membership, resolution)]
    level = a
    for _ in range(max_passes):
        labels = _local_moving(level, resolution)
        if labels.max() + 1 == level.shape[0]:
            break
        membership = _relabel(labels[membership])
        scores.append(_modularity(a, membership, resolution))
        level = _aggregate(level, labels)
    return Partition(w.industries, tuple(int(x) for x in membership), scores[-1], tuple(scores))


def _align(reference: list[set[str]], groups: list[set[str]]) -> dict[int, int]:
    """Map each community in ``groups`` to a reference label by greedy Jaccard overlap.

    Unmatched communities get fresh labels beyond the reference range.
    """
    scored = []
    for r, ref in enumerate(reference):
        for g, grp in enumerate(groups):
            inter = len(ref & grp)
            if inter:
                scored.append((-inter / len(ref | grp), r, g))
    scored.sort()
    mapping: dict[int, int] = {}
    used: set[int] = set()
    for _, r, g in scored:
        if g in mapping or r in used:
            continue
        mapping[g] = r
        used.add(r)
    fresh = len(reference)
    for g in range(len(groups)):
        if g not in mapping:
            mapping[g] = fresh
            fresh += 1
    return mapping


def stable_core(partitions: Sequence[tuple[int, Partition]]) -> dict[str, int | str]:
    """Industries whose aligned community never changes; others are ``UNSTABLE``.

    Every year is aligned against the first year's communities, so the stable
    industries share identical co-membership in all years.
    """
    if len(partitions) < 2:
        raise DomainError("stable_core needs at least two years")
    first = partitions[0][1]
    names = set(first.industries)
    if any(set(p.industries) != names for _, p in partitions):
        raise DomainError("partitions cover different industry sets")

    reference = first.groups()
    aligned: list[Mapping[str, int]] = [first.assignment]
    for _, p in partitions[1:]:
        mapping = _align(reference, p.groups())
        aligned.append({k: mapping[v] for k, v in p.assignment.items()})

    return {
        name: aligned[0][name] if all(a[name] == aligned[0][name] for a in aligned) else UNSTABLE
        for name in first.industries
    }
