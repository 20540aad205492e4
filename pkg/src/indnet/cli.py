"""Command-line driver: ``indnet analyze|synth|counts|export``.

Every flag can also be set through an environment variable named
``INDNET_<FLAG>`` (upper case, dashes as underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import shutil
import sys
import tempfile
from pathlib import Path

from indnet.errors import DomainError, IndnetError
from indnet.export import to_dot, to_graphml, tree_graph
from indnet.ingest import (
    DEFAULT_MIN_PRODUCTS,
    DEFAULT_SIG_THRESHOLD,
    format_output_table,
    product_counts,
)
from indnet.pipeline import YEAR_PATTERN, analyze_series, analyze_table, load_tables
from indnet.synthkit import SynthParams, generate_series

logger = logging.getLogger("indnet")

ENV_PREFIX = "INDNET_"
FORMATS = ("json", "csv", "graphml", "dot", "svg", "boolean-grid")
DEFAULT_FORMATS = "json,csv,graphml"


def _env(flag: str, default):
    return os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"), default)


def _split(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [v for item in value for v in _split(item)]
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _formats(value) -> set[str]:
    chosen = set(_split(value))
    unknown = chosen - set(FORMATS)
    if unknown:
        raise DomainError(f"unknown export formats: {sorted(unknown)}")
    if not chosen:
        raise DomainError("at least one export format is required")
    return chosen


def _read_gva(path: str | None) -> dict[int, dict[str, float]]:
    """Optional node sizes from a ``year,industry,gva`` CSV."""
    if not path:
        return {}
    out: dict[int, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["year"]), {})[row["industry"]] = float(row["gva"])
    return out


class _Staging:
    """Collects output files in a temp dir and moves them into place on commit."""

    def __init__(self, out: Path):
        self.out = out
        out.parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".indnet-", dir=out.parent))
        self.names: list[str] = []

    def write(self, name: str, data: str | bytes):
        path = self.tmp / name
        if isinstance(data, bytes):
            path.write_bytes(data)
        else:
            path.write_text(data, encoding="utf-8")
        self.names.append(name)

    def commit(self):
        self.out.mkdir(parents=True, exist_ok=True)
        for name in self.names:
            os.replace(self.tmp / name, self.out / name)
        shutil.rmtree(self.tmp, ignore_errors=True)

    def discard(self):
        shutil.rmtree(self.tmp, ignore_errors=True)


def _tree_csv(tree) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source", "target", "distance", "weight"])
    for a, b, d in tree.edges:
        writer.writerow([a, b, repr(d), repr(1.0 / d)])
    return buf.getvalue()


def _write_tree(stage: _Staging, prefix: str, result, formats, gva=None, stable=None):
    g = tree_graph(
        result.tree,
        totals=dict(zip(result.table.industries, result.table.totals())),
        gva=gva,
        communities=result.partition.assignment,
        stable=stable,
    )
    if "graphml" in formats:
        stage.write(f"{prefix}.graphml", to_graphml(g))
    if "dot" in formats:
        stage.write(f"{prefix}.dot", to_dot(g, prefix))
    if "csv" in formats:
        stage.write(f"{prefix}.csv", _tree_csv(result.tree))


def cmd_analyze(args) -> int:
    formats = _formats(args.formats)
    tables = load_tables(_split(args.input), _split(args.exclude), args.min_products, args.year_pattern)
    series = analyze_series(tables, args.resolution, args.workers)
    gva = _read_gva(args.gva)

    stage = _Staging(Path(args.out))
    try:
        for r in series.years:
            _write_tree(stage, f"tree_{r.year}", r, formats, gva.get(r.year), series.stable)
            if "csv" in formats:
                stage.write(f"partition_{r.year}.csv", r.partition.to_csv())
            if "boolean-grid" in formats:
                adj = series.report.adjacency[r.year]
                stage.write(f"boolean_{r.year}.pgm", adj.to_pgm())
                stage.write(f"boolean_{r.year}.csv", adj.to_csv())
        if "csv" in formats and series.stable is not None:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["industry", "stable_community"])
            writer.writerows(series.stable.items())
            stage.write("stable_core.csv", buf.getvalue())
        if "svg" in formats:
            for name in ("L", "RL", "S", "R"):
                stage.write(f"report_{name}.svg", series.report.to_svg(name))
        if "csv" in formats:
            stage.write("report.csv", series.report.to_csv())
        if "json" in formats:
            stage.write("report.json", series.report.to_json())
        stage.commit()
    except BaseException:
        stage.discard()
        raise
    logger.info("analyzed %d years into %s", len(series.years), args.out)
    return 0


def load_synth_params(path: str | None, seed=None) -> SynthParams:
    data = {}
    if path:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    if seed is not None:
        data["seed"] = int(seed)
    return SynthParams.from_dict(data)


def cmd_synth(args) -> int:
    params = load_synth_params(args.params, args.seed)
    tables = generate_series(params, args.years)
    stage = _Staging(Path(args.out))
    try:
        for t in tables:
            stage.write(f"table_{t.year}.csv", format_output_table(t))
        manifest = {
            "years": [t.year for t in tables],
            "break_year": params.break_year,
            "shock": params.shock,
            "params": json.loads(params.to_json()),
        }
        stage.write("manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        stage.commit()
    except BaseException:
        stage.discard()
        raise
    return 0


def cmd_counts(args) -> int:
    tables = load_tables(_split(args.input), (), 0, args.year_pattern)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["year", "industry", "count_all", "count_significant"])
    for t in tables:
        for row in product_counts(t, args.sig_threshold).rows:
            writer.writerow([t.year, row.industry, row.count_all, row.count_significant])
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_export(args) -> int:
    formats = _formats(args.formats)
    tables = load_tables(_split(args.input), _split(args.exclude), args.min_products, args.year_pattern)
    gva = _read_gva(args.gva)
    stage = _Staging(Path(args.out))
    try:
        for t in tables:
            r = analyze_table(t, args.resolution)
            if "csv" in formats:
                stage.write(f"weights_{t.year}.csv", r.weights.to_csv())
                stage.write(f"distances_{t.year}.csv", r.distances.to_csv())
            _write_tree(stage, f"tree_{t.year}", r, formats, gva.get(t.year))
        stage.commit()
    except BaseException:
        stage.discard()
        raise
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="indnet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=True):
        p.add_argument("--input", action="append", default=None,
                       help="table file or directory (repeatable, comma lists allowed)")
        p.add_argument("--out", default=_env("out", "out"))
        p.add_argument("--year-pattern", default=_env("year-pattern", YEAR_PATTERN))
        p.add_argument("--exclude", default=_env("exclude", "T,U"))
        p.add_argument("--min-products", type=int,
                       default=int(_env("min-products", DEFAULT_MIN_PRODUCTS)))
        p.add_argument("--resolution", type=float, default=float(_env("resolution", 1.0)))
        p.add_argument("--gva", default=_env("gva", None),
                       help="optional CSV with year,industry,gva columns")
        if formats:
            p.add_argument("--formats", default=_env("formats", DEFAULT_FORMATS),
                           help="comma list from: " + ", ".join(FORMATS))

    p = sub.add_parser("analyze", help="networks, trees, coefficients and communities per year")
    common(p)
    p.add_argument("--workers", type=int, default=int(_env("workers", 1)))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="weights, distances and tree files per table")
    common(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("counts", help="products per industry, all and significant")
    p.add_argument("--input", action="append", default=None)
    p.add_argument("--out", default=_env("counts-out", None))
    p.add_argument("--year-pattern", default=_env("year-pattern", YEAR_PATTERN))
    p.add_argument("--sig-threshold", type=float,
                   default=float(_env("sig-threshold", DEFAULT_SIG_THRESHOLD)))
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("synth", help="write a synthetic table series and its manifest")
    p.add_argument("--params", default=_env("params", None), help="JSON file of generator settings")
    p.add_argument("--years", type=int, default=int(_env("years", 15)))
    p.add_argument("--seed", type=int, default=_env("seed", None))
    p.add_argument("--out", default=_env("out", "synth"))
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if hasattr(args, "input"):
        if args.input is None:
            env_input = _env("input", None)
            if env_input is None:
                parser.error("--input is required")
            args.input = [env_input]
    try:
        return args.func(args)
    except (IndnetError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
