"""GraphML and DOT serialisation of spanning trees with node attributes."""

from __future__ import annotations

import io
from typing import Mapping

import networkx as nx

from indnet.community import community_color
from indnet.mstcluster import SpanningTree


def tree_graph(
    tree: SpanningTree,
    totals: Mapping[str, float] | None = None,
    gva: Mapping[str, float] | None = None,
    communities: Mapping[str, int] | None = None,
    stable: Mapping[str, int | str] | None = None,
) -> nx.Graph:
    """Tree as a networkx graph; node colour follows ``stable`` when given."""
    g = nx.Graph()
    for name in tree.industries:
        attrs = {}
        if totals is not None:
            attrs["total_output"] = float(totals[name])
        if gva is not None and name in gva:
            attrs["gva"] = float(gva[name])
        if communities is not None:
            attrs["community"] = int(communities[name])
            attrs["color"] = community_color(communities[name])
        if stable is not None:
            attrs["stable_community"] = str(stable[name])
            attrs["color"] = community_color(stable[name])
        g.add_node(name, **attrs)
    for a, b, dist in tree.edges:
        g.add_edge(a, b, distance=dist, weight=1.0 / dist)
    return g


def to_graphml(g: nx.Graph) -> str:
    buf = io.BytesIO()
    nx.write_graphml(g, buf)
    return buf.getvalue().decode("utf-8")


def _dot_attr(value) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return repr(value)
    text = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def to_dot(g: nx.Graph, name: str = "mst") -> str:
    lines = [f"graph {_dot_attr(name)} {{"]
    for node, attrs in g.nodes(data=True):
        extra = dict(attrs)
        if "color" in extra:
            extra["style"] = "filled"
            extra["fillcolor"] = extra.pop("color")
        body = ", ".join(f"{k}={_dot_attr(v)}" for k, v in extra.items())
        lines.append(f"  {_dot_attr(node)}" + (f" [{body}];" if body else ";"))
    for a, b, attrs in g.edges(data=True):
        body = ", ".join(f"{k}={_dot_attr(v)}" for k, v in attrs.items())
        lines.append(f"  {_dot_attr(a)} -- {_dot_attr(b)} [{body}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
