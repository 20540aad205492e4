"""One-year and multi-year analysis runs shared by the CLI and the tests."""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from indnet.community import Partition, detect_communities, stable_core
from indnet.errors import DomainError, FormatError
from indnet.ingest import (
    DEFAULT_EXCLUDED,
    DEFAULT_MIN_PRODUCTS,
    OutputTable,
    apply_exclusions,
    read_output_table,
)
from indnet.mstcluster import MergeSequence, SpanningTree, single_linkage
from indnet.netbuild import DistanceMatrix, WeightMatrix, build_network
from indnet.topometrics import TopoReport, build_report

logger = logging.getLogger(__name__)

YEAR_PATTERN = r"(?<!\d)(\d{4})(?!\d)"


@dataclass(frozen=True)
class YearResult:
    table: OutputTable
    weights: WeightMatrix
    distances: DistanceMatrix
    merges: MergeSequence
    tree: SpanningTree
    partition: Partition

    @property
    def year(self) -> int:
        return self.table.year


@dataclass(frozen=True)
class SeriesResult:
    years: tuple[YearResult, ...]
    report: TopoReport
    stable: dict[str, int | str] | None


def year_from_name(path: Path, pattern: str = YEAR_PATTERN) -> int:
    m = re.search(pattern, path.name)
    if m is None:
        raise FormatError(f"no year label in file name {path.name!r}")
    return int(m.group(1) if m.groups() else m.group(0))


def discover_inputs(inputs: Iterable[str | Path], pattern: str = YEAR_PATTERN) -> list[tuple[int, Path]]:
    """Expand directories, attach year labels, sort by year."""
    files: list[Path] = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.suffix.lower() in (".csv", ".txt")))
        elif path.is_file():
            files.append(path)
        else:
            raise FormatError(f"input not found: {path}")
    labelled = sorted((year_from_name(f, pattern), f) for f in files)
    years = [y for y, _ in labelled]
    if len(set(years)) != len(years):
        raise FormatError(f"duplicate year labels among inputs: {years}")
    if not labelled:
        raise FormatError("no input tables found")
    return labelled


def load_tables(
    inputs: Iterable[str | Path],
    excluded: Iterable[str] = DEFAULT_EXCLUDED,
    min_products: int = DEFAULT_MIN_PRODUCTS,
    pattern: str = YEAR_PATTERN,
) -> list[OutputTable]:
    excluded = set(excluded)
    tables = []
    for year, path in discover_inputs(inputs, pattern):
        t = read_output_table(path, year)
        present = excluded & set(t.industries)
        if present != excluded:
            logger.info("%s: excluded ids not present: %s", path.name, sorted(excluded - present))
        tables.append(apply_exclusions(t, present, min_products))
    return tables


def analyze_table(t: OutputTable, resolution: float = 1.0) -> YearResult:
    w, d = build_network(t)
    merges, tree = single_linkage(d)
    return YearResult(t, w, d, merges, tree, detect_communities(w, resolution))


def analyze_series(
    tables: Sequence[OutputTable], resolution: float = 1.0, workers: int = 1
) -> SeriesResult:
    if not tables:
        raise DomainError("no tables to analyze")
    tables = sorted(tables, key=lambda t: t.year)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = tuple(pool.map(lambda t: analyze_table(t, resolution), tables))
    report = build_report([(r.year, r.distances, r.tree) for r in results])
    stable = stable_core([(r.year, r.partition) for r in results]) if len(results) > 1 else None
    return SeriesResult(results, report, stable)
