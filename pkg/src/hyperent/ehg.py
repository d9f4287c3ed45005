"""Entangled hypergraphs over three qubits and their class labels."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .measures import PAIRS, PURITY_EPS, ZERO_EPS, MeasureReport, measure_report
from .qstate import DensityMatrix, StateVector

Pair = tuple[int, int]

CLASS_NAMES = ("Separable", "Biseparable", "WType", "GhzFamily", "Forbidden")
GRID_COLUMNS = ("C12", "C13", "C23", "tau")


class UnphysicalClassification(ValueError):
    """A pure state produced the forbidden two-edge, no-hyperedge pattern."""


class ForbiddenMixedWarning(UserWarning):
    pass


def _pair(p) -> Pair:
    a, b = sorted(int(x) for x in p)
    if (a, b) not in PAIRS:
        raise ValueError(f"invalid qubit pair {p!r}")
    return (a, b)


@dataclass(frozen=True)
class EntangledHypergraph:
    """Edges carry concurrences, the 3-hyperedge carries the tangle.

    Only weights above ``epsilon`` are stored, so presence and storage agree.
    """

    edges: dict = field(default_factory=dict)
    hyperedge: Optional[float] = None
    mixed: bool = False
    epsilon: float = ZERO_EPS

    def __post_init__(self):
        edges = {_pair(p): float(w) for p, w in self.edges.items()}
        for p, w in edges.items():
            if not w > self.epsilon:
                raise ValueError(f"edge {p} weight {w} not above epsilon {self.epsilon}")
        if self.hyperedge is not None and not self.hyperedge > self.epsilon:
            raise ValueError("hyperedge weight must exceed epsilon")
        object.__setattr__(self, "edges", dict(sorted(edges.items())))

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @property
    def has_hyperedge(self) -> bool:
        return self.hyperedge is not None

    def shape(self) -> tuple:
        return (tuple(sorted(self.edges)), self.has_hyperedge)

    def permuted(self, perm) -> "EntangledHypergraph":
        """Relabel vertex q as perm[q-1]."""
        edges = {_pair((perm[a - 1], perm[b - 1])): w for (a, b), w in self.edges.items()}
        return EntangledHypergraph(edges, self.hyperedge, self.mixed, self.epsilon)

    def to_dict(self) -> dict:
        return {
            "edges": [{"pair": list(p), "w": w} for p, w in self.edges.items()],
            "hyperedge": None if self.hyperedge is None else {"w": self.hyperedge},
            "mixed": self.mixed,
            "class": str(class_label(self)),
        }

    @classmethod
    def from_dict(cls, d: dict, epsilon: float = ZERO_EPS) -> "EntangledHypergraph":
        edges = {_pair(e["pair"]): float(e["w"]) for e in d.get("edges", [])}
        h = d.get("hyperedge")
        return cls(edges, None if h is None else float(h["w"]), bool(d.get("mixed", False)), epsilon)


@dataclass(frozen=True)
class ClassLabel:
    kind: str
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in CLASS_NAMES:
            raise ValueError(f"unknown class {self.kind!r}")
        object.__setattr__(self, "edges", frozenset(_pair(p) for p in self.edges))

    def __str__(self) -> str:
        if self.edges:
            inner = ",".join("{%d,%d}" % p for p in sorted(self.edges))
            return f"{self.kind}({inner})"
        return self.kind

    def to_dict(self) -> dict:
        return {"name": self.kind, "edges": [list(p) for p in sorted(self.edges)]}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassLabel":
        return cls(d["name"], frozenset(tuple(p) for p in d.get("edges", [])))


def build_hypergraph(
    report: MeasureReport, epsilon: float = ZERO_EPS, purity_eps: float = PURITY_EPS
) -> EntangledHypergraph:
    edges = {p: w for p, w in report.pairwise().items() if w > epsilon}
    mixed = report.purity < 1.0 - purity_eps
    hyper = None
    if not mixed and report.tau is not None and report.tau > epsilon:
        hyper = report.tau
    return EntangledHypergraph(edges, hyper, mixed, epsilon)


def class_label(g: EntangledHypergraph) -> ClassLabel:
    n = len(g.edges)
    if g.has_hyperedge:
        return ClassLabel("GhzFamily", g.edge_set)
    if n == 0:
        return ClassLabel("Separable")
    if n == 1:
        return ClassLabel("Biseparable", g.edge_set)
    if n == 3:
        return ClassLabel("WType")
    return ClassLabel("Forbidden", g.edge_set)


def _check_forbidden(report: MeasureReport, g: EntangledHypergraph) -> None:
    eps = g.epsilon
    if g.mixed:
        warnings.warn(
            f"forbidden hypergraph {sorted(g.edges)} on a mixed state", ForbiddenMixedWarning, stacklevel=3
        )
        return
    (missing,) = set(PAIRS) - g.edge_set
    clear = (
        all(w > 10 * eps for w in g.edges.values())
        and report.pairwise()[missing] < eps / 10
        and (report.tau or 0.0) < eps / 10
    )
    if clear:
        raise UnphysicalClassification(
            f"pure state classified Forbidden with edges {sorted(g.edges)}: "
            "two edges without hyperedge cannot occur for a valid pure state"
        )
    warnings.warn(
        f"borderline forbidden pattern {sorted(g.edges)} near epsilon {eps}",
        ForbiddenMixedWarning,
        stacklevel=3,
    )


def classify_report(
    report: MeasureReport, epsilon: float = ZERO_EPS, purity_eps: float = PURITY_EPS
) -> tuple[EntangledHypergraph, ClassLabel]:
    g = build_hypergraph(report, epsilon, purity_eps)
    label = class_label(g)
    if label.kind == "Forbidden":
        _check_forbidden(report, g)
    return g, label


def classify(
    state: StateVector | DensityMatrix, epsilon: float = ZERO_EPS, purity_eps: float = PURITY_EPS
) -> tuple[EntangledHypergraph, ClassLabel]:
    """Measures, then hypergraph, then class label.

    Raises ``UnphysicalClassification`` if a pure state lands in the forbidden
    class with clear margins; on mixed states that case only warns.
    """
    return classify_report(measure_report(state, purity_eps), epsilon, purity_eps)


def incidence_grid(g: EntangledHypergraph, weighted: bool = False) -> np.ndarray:
    """3x4 matrix: rows are qubits, columns (C12, C13, C23, tau)."""
    grid = np.zeros((3, 4))
    for col, pair in enumerate(PAIRS):
        if pair in g.edges:
            for q in pair:
                grid[q - 1, col] = g.edges[pair] if weighted else 1.0
    if g.has_hyperedge:
        grid[:, 3] = g.hyperedge if weighted else 1.0
    return grid


def grid_text(grid: np.ndarray, weighted: bool = False) -> str:
    rows = []
    for row in grid:
        if weighted:
            rows.append(" ".join(f"{x:.6f}" for x in row))
        else:
            rows.append(" ".join(str(int(x != 0)) for x in row))
    return "\n".join(rows) + "\n"


def grid_pgm(grid: np.ndarray) -> str:
    """Plain PGM (P2), one pixel per cell, weight in [0, 1] scaled to 0..255."""
    h, w = grid.shape
    pix = np.clip(np.rint(np.clip(grid, 0.0, 1.0) * 255), 0, 255).astype(int)
    lines = ["P2", f"{w} {h}", "255"] + [" ".join(str(v) for v in row) for row in pix]
    return "\n".join(lines) + "\n"
