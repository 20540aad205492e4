"""Reading, validating and filtering industry-by-product output tables.

Tables are delimited text: a header row of product ids (its first cell is a
free label), then one row per industry whose first cell is the industry id.
Cells hold a production value in thousands of euros, or are left empty or set
to ``-`` when the statistical office reports nothing.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from indnet.errors import DegenerateInputError, DomainError, FormatError

logger = logging.getLogger(__name__)

MISSING_MARKER = "-"
DEFAULT_EXCLUDED = frozenset({"T", "U"})
DEFAULT_MIN_PRODUCTS = 2
# one million euros expressed in table units (10^3 euros)
DEFAULT_SIG_THRESHOLD = 1000.0
MIN_INDUSTRIES = 3


@dataclass(frozen=True)
class ClassificationEntry:
    code_range: str
    description: str
    industry: str
    product: str


@dataclass(frozen=True)
class Classification:
    entries: tuple[ClassificationEntry, ...]

    def __post_init__(self):
        ids = [e.industry for e in self.entries]
        if len(set(ids)) != len(ids):
            raise FormatError("classification has duplicate industry ids")
        if set(ids) != {e.product for e in self.entries}:
            raise FormatError("industry and product id lists differ")

    @property
    def industries(self) -> list[str]:
        return [e.industry for e in self.entries]

    def describe(self, industry: str) -> str:
        for e in self.entries:
            if e.industry == industry:
                return e.description
        raise KeyError(industry)


@dataclass(frozen=True, eq=False)
class OutputTable:
    """One year's production values, industries as rows and products as columns.

    ``values`` and ``missing`` are read-only arrays; missing cells hold 0.
    """

    year: int
    industries: tuple[str, ...]
    products: tuple[str, ...]
    values: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        shape = (len(self.industries), len(self.products))
        values = np.array(self.values, dtype=float)
        missing = np.array(self.missing, dtype=bool)
        if values.shape != shape or missing.shape != shape:
            raise FormatError(f"matrix shape {values.shape} does not match {shape}")
        if len(set(self.industries)) != len(self.industries):
            raise FormatError("duplicate industry id")
        if len(set(self.products)) != len(self.products):
            raise FormatError("duplicate product id")
        if not np.all(np.isfinite(values)):
            raise DomainError("non-finite production value")
        if np.any(values < 0):
            i, p = np.argwhere(values < 0)[0]
            raise DomainError(
                f"negative value {values[i, p]} at ({self.industries[i]}, {self.products[p]})"
            )
        values[missing] = 0.0
        values.flags.writeable = False
        missing.flags.writeable = False
        object.__setattr__(self, "industries", tuple(self.industries))
        object.__setattr__(self, "products", tuple(self.products))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)

    @property
    def n_industries(self) -> int:
        return len(self.industries)

    def totals(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def index(self, industry: str) -> int:
        return self.industries.index(industry)

    def __eq__(self, other):
        if not isinstance(other, OutputTable):
            return NotImplemented
        return (
            self.year == other.year
            and self.industries == other.industries
            and self.products == other.products
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.missing, other.missing)
        )

    __hash__ = None


@dataclass(frozen=True)
class ProductCount:
    industry: str
    count_all: int
    count_significant: int


@dataclass(frozen=True)
class ProductCountSummary:
    rows: tuple[ProductCount, ...]
    threshold: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["industry", "count_all", "count_significant"])
        for r in self.rows:
            writer.writerow([r.industry, r.count_all, r.count_significant])
        return buf.getvalue()


def sniff_delimiter(header: str) -> str:
    return ";" if header.count(";") > header.count(",") else ","


def _parse_cell(cell: str, delimiter: str, where: str) -> tuple[float, bool]:
    cell = cell.strip()
    if cell == "" or cell == MISSING_MARKER:
        return 0.0, True
    if delimiter == ";" and "," in cell and "." not in cell:
        cell = cell.replace(",", ".")
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"unparsable cell {cell!r} at {where}") from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite cell {cell!r} at {where}")
    if value < 0:
        raise DomainError(f"negative value {value} at {where}")
    return value, False


def _rows(raw: str) -> tuple[list[list[str]], str]:
    lines = [ln for ln in raw.lstrip("﻿").splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty table")
    delimiter = sniff_delimiter(lines[0])
    return list(csv.reader(lines, delimiter=delimiter)), delimiter


def parse_output_table(raw: str, year: int) -> OutputTable:
    rows, delimiter = _rows(raw)
    header = [c.strip() for c in rows[0]]
    products = header[1:]
    if not products:
        raise FormatError("header has no product columns")
    if len(set(products)) != len(products):
        raise FormatError("duplicate product id in header")

    industries: list[str] = []
    values = np.zeros((len(rows) - 1, len(products)))
    missing = np.zeros(values.shape, dtype=bool)
    for r, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise FormatError(
                f"row {r + 2} has {len(row)} cells, header has {len(header)}"
            )
        industry = row[0].strip()
        if industry in industries:
            raise FormatError(f"duplicate industry id {industry!r}")
        industries.append(industry)
        for p, cell in enumerate(row[1:]):
            values[r, p], missing[r, p] = _parse_cell(
                cell, delimiter, f"({industry}, {products[p]})"
            )
    if not industries:
        raise FormatError("table has no industry rows")
    return OutputTable(year, tuple(industries), tuple(products), values, missing)


def read_output_table(path: str | Path, year: int) -> OutputTable:
    return parse_output_table(Path(path).read_text(encoding="utf-8"), year)


def _format_value(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def format_output_table(t: OutputTable, delimiter: str = ",", label: str = "I/P") -> str:
    """Serialize to the delimited text accepted by :func:`parse_output_table`.

    Values round-trip exactly; missing cells are written as ``-``.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow([label, *t.products])
    for i, industry in enumerate(t.industries):
        cells = [
            MISSING_MARKER if t.missing[i, p] else _format_value(float(t.values[i, p]))
            for p in range(len(t.products))
        ]
        writer.writerow([industry, *cells])
    return buf.getvalue()


def parse_classification(raw: str) -> Classification:
    rows, _ = _rows(raw)
    if rows and any("description" in c.lower() for c in rows[0]):
        rows = rows[1:]
    entries = []
    for n, row in enumerate(rows, start=1):
        if len(row) != 4:
            raise FormatError(f"classification row {n} has {len(row)} fields, expected 4")
        entries.append(ClassificationEntry(*(c.strip() for c in row)))
    return Classification(tuple(entries))


def default_classification() -> Classification:
    """The 38-industry NACE/CPA list bundled with the package."""
    raw = resources.files("indnet.data").joinpath("classification_i38.csv").read_text("utf-8")
    return parse_classification(raw)


def select_industries(t: OutputTable, keep: Sequence[int]) -> OutputTable:
    keep = list(keep)
    return OutputTable(
        t.year,
        tuple(t.industries[i] for i in keep),
        t.products,
        t.values[keep],
        t.missing[keep],
    )


def apply_exclusions(
    t: OutputTable,
    excluded: Iterable[str] = DEFAULT_EXCLUDED,
    min_products: int = DEFAULT_MIN_PRODUCTS,
) -> OutputTable:
    """Drop the named industries and those producing fewer than ``min_products`` products.

    Rows with zero total output are always dropped. Product columns are kept.
    """
    excluded = set(excluded)
    unknown = excluded - set(t.industries)
    if unknown:
        raise DomainError(f"excluded ids not in table: {sorted(unknown)}")
    if min_products < 0:
        raise DomainError("min_products must be >= 0")

    counts = (t.values > 0).sum(axis=1)
    keep = []
    for i, industry in enumerate(t.industries):
        if industry in excluded:
            continue
        if counts[i] < max(min_products, 1):
            logger.info("dropping %s in %s: %d positive products", industry, t.year, counts[i])
            continue
        keep.append(i)
    if len(keep) < MIN_INDUSTRIES:
        raise DegenerateInputError(
            f"only {len(keep)} industries left in {t.year}; need at least {MIN_INDUSTRIES}"
        )
    if len(keep) == t.n_industries:
        return t
    return select_industries(t, keep)


def product_counts(t: OutputTable, threshold: float = DEFAULT_SIG_THRESHOLD) -> ProductCountSummary:
    if threshold < 0:
        raise DomainError("threshold must be >= 0")
    count_all = (t.values > 0).sum(axis=1)
    count_sig = (t.values > threshold).sum(axis=1)
    rows = tuple(
        ProductCount(ind, int(a), int(s))
        for ind, a, s in zip(t.industries, count_all, count_sig)
    )
    return ProductCountSummary(rows, float(threshold))
