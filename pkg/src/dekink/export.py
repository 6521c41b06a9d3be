"""Graph exports: Graphviz DOT text and matplotlib figure rendering.

DOT has no rotation semantics, so the rotation system is emitted as
advisory comment lines (one per vertex, neighbors in clockwise order).
The figure renderer draws the graph itself (never surfaces or curves);
a walk may be highlighted as a set of emphasized edges.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from .ribbon import RibbonGraph
from .triangulation import DualGraph, LeafyDualGraph
from .walks import Walk

Graphish = object  # RibbonGraph | DualGraph | LeafyDualGraph


def _graph_of(g) -> RibbonGraph:
    return g.graph if isinstance(g, (DualGraph, LeafyDualGraph)) else g


def to_dot(g, name: str = "dekink") -> str:
    """Graphviz text for the graph; rotation order appears as comments and
    as the order of edge statements around each vertex."""
    graph = _graph_of(g)
    lines = [f'graph "{name}" {{', "  node [shape=circle, fontsize=10];"]
    for v in graph.vertices:
        neighbors = " ".join(d.edge for d in graph.darts_at(v))
        lines.append(f'  // rotation {v}: {neighbors}')
    for v in graph.vertices:
        lines.append(f'  "{v}";')
    for e in graph.edges:
        u, w = graph.edge_ends(e)
        lines.append(f'  "{u}" -- "{w}" [label="{e}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_figure(
    g,
    path: str,
    highlight: Walk | None = None,
    seed: int = 7,
    title: str | None = None,
) -> None:
    """Draw the graph to an image file; edges of ``highlight`` are
    emphasized.  Parallel edges are bowed apart so eta pairs stay visible."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import networkx as nx

    graph = _graph_of(g)
    G = nx.MultiGraph()
    G.add_nodes_from(graph.vertices)
    for e in graph.edges:
        u, w = graph.edge_ends(e)
        G.add_edge(u, w, key=e)
    pos = nx.spring_layout(G, seed=seed)

    emphasized = set(highlight.edges) if highlight is not None else set()
    fig, ax = plt.subplots(figsize=(7, 7))
    nx.draw_networkx_nodes(G, pos, ax=ax, node_size=360, node_color="#dfe8f5")
    nx.draw_networkx_labels(G, pos, ax=ax, font_size=7)

    pair_count: Counter = Counter()
    for u, w, key in G.edges(keys=True):
        slot = tuple(sorted((u, w)))
        bend = 0.18 * pair_count[slot]
        pair_count[slot] += 1
        style = dict(
            connectionstyle=f"arc3,rad={bend}",
            edge_color="#d62728" if key in emphasized else "#7f7f7f",
            width=2.4 if key in emphasized else 1.0,
        )
        nx.draw_networkx_edges(G, pos, edgelist=[(u, w)], ax=ax, **style)
        mid_x = (pos[u][0] + pos[w][0]) / 2
        mid_y = (pos[u][1] + pos[w][1]) / 2 + bend * 0.35
        ax.text(mid_x, mid_y, key, fontsize=6, color="#444444", ha="center")

    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
