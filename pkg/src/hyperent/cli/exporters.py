"""File formats: trace JSON, Graphviz DOT, incidence grids (text and PGM)."""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from ..eeh import EehTrace, Layer
from ..ehg import grid_pgm, grid_text, incidence_grid
from ..measures import PAIRS


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def trace_json(trace: EehTrace, include_rho: bool = True) -> str:
    return dumps(trace.to_dict(include_rho=include_rho))


def _weight(w: float) -> str:
    return f"{w:.4f}"


def _layer_cluster(layer: Layer, weighted: bool) -> list[str]:
    t = layer.time_index
    g = layer.hypergraph
    lines = [
        f"  subgraph cluster_t{t} {{",
        f'    label="t{t}: {layer.label}";',
        "    style=rounded;",
    ]
    if g.mixed:
        lines.append("    color=gray50; fontcolor=gray30;")
    for q in (1, 2, 3):
        lines.append(f'    t{t}_q{q} [label="{q}", shape=circle];')
    for (a, b) in PAIRS:
        if (a, b) in g.edges:
            attr = f', label="{_weight(g.edges[(a, b)])}"' if weighted else ""
            lines.append(f"    t{t}_q{a} -> t{t}_q{b} [dir=none, penwidth=2{attr}];")
    if g.has_hyperedge:
        attr = f'"{_weight(g.hyperedge)}"' if weighted else '""'
        lines.append(f"    t{t}_h [shape=triangle, style=filled, fillcolor=lightblue, label={attr}];")
        for q in (1, 2, 3):
            lines.append(f"    t{t}_h -> t{t}_q{q} [dir=none, style=dashed];")
    lines.append("  }")
    return lines


def trace_dot(trace: EehTrace, weighted: bool = False, layer: Optional[int] = None) -> str:
    """One cluster per layer; inter-layer arrows carry the channel names."""
    layers = trace.layers if layer is None else [trace.layers[layer]]
    lines = ["digraph eeh {", "  rankdir=LR;", "  compound=true;", "  node [fontname=Helvetica];"]
    for ly in layers:
        lines.extend(_layer_cluster(ly, weighted))
    if layer is None:
        for t, name in enumerate(trace.transitions):
            lines.append(
                f'  t{t}_q2 -> t{t + 1}_q2 [ltail=cluster_t{t}, lhead=cluster_t{t + 1}, label="{name}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def trace_grid(trace: EehTrace, weighted: bool = False, layer: Optional[int] = None) -> str:
    if layer is not None:
        return grid_text(incidence_grid(trace.layers[layer].hypergraph, weighted), weighted)
    chunks = []
    for ly in trace.layers:
        chunks.append(f"# t={ly.time_index} {ly.label}\n")
        chunks.append(grid_text(incidence_grid(ly.hypergraph, weighted), weighted))
    return "".join(chunks)


def trace_pgm(trace: EehTrace, weighted: bool = False, layer: Optional[int] = None) -> str:
    """Single layer grid, or all layers stacked top to bottom (3 rows each)."""
    layers = trace.layers if layer is None else [trace.layers[layer]]
    grid = np.vstack([incidence_grid(ly.hypergraph, weighted) for ly in layers])
    return grid_pgm(grid)
