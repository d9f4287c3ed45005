"""Evolving entangled hypergraphs: a classified layer per time step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .channels import CPTP_TOL, Channel, apply_channel, validate_cptp
from .ehg import ClassLabel, EntangledHypergraph, class_label, classify_report
from .measures import MeasureReport, measure_report
from .qstate import DensityMatrix, StateVector, as_density, matrix_from_json, matrix_to_json

CHANNEL_EPS = 1e-7
SCHEMA = 1


@dataclass(frozen=True, eq=False)
class Layer:
    time_index: int
    rho: Optional[DensityMatrix]
    report: MeasureReport
    hypergraph: EntangledHypergraph
    label: ClassLabel

    def structure(self) -> tuple:
        return (self.hypergraph.shape(), str(self.label))


@dataclass(frozen=True, eq=False)
class EehTrace:
    layers: tuple
    transitions: tuple
    epsilon: float

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a trace needs at least one layer")
        if len(self.transitions) != len(self.layers) - 1:
            raise ValueError("need exactly one transition between consecutive layers")

    def labels(self) -> list[str]:
        return [str(layer.label) for layer in self.layers]

    def to_dict(self, include_rho: bool = False) -> dict:
        layers = []
        for layer in self.layers:
            d = {
                "t": layer.time_index,
                "class": str(layer.label),
                "hypergraph": layer.hypergraph.to_dict(),
                "report": layer.report.to_dict(),
            }
            if include_rho and layer.rho is not None:
                d["rho"] = matrix_to_json(layer.rho.entries)
            layers.append(d)
        return {
            "schema": SCHEMA,
            "epsilon": self.epsilon,
            "layers": layers,
            "transitions": list(self.transitions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EehTrace":
        if d.get("schema", SCHEMA) != SCHEMA:
            raise ValueError(f"unsupported trace schema {d.get('schema')!r}")
        eps = float(d["epsilon"])
        layers = []
        for i, ld in enumerate(d["layers"]):
            if int(ld["t"]) != i:
                raise ValueError(f"layer {i} has time index {ld['t']}")
            g = EntangledHypergraph.from_dict(ld["hypergraph"], eps)
            label = class_label(g)
            if "class" in ld and ld["class"] != str(label):
                raise ValueError(f"layer {i}: class {ld['class']!r} inconsistent with hypergraph ({label})")
            rho = None
            if "rho" in ld:
                m = matrix_from_json(ld["rho"])
                DensityMatrix(m)  # validate only; keep the stored bits
                rho = DensityMatrix(m, check=False)
            layers.append(Layer(i, rho, MeasureReport.from_dict(ld["report"]), g, label))
        return cls(tuple(layers), tuple(str(t) for t in d["transitions"]), eps)


def _layer(t: int, rho: DensityMatrix, epsilon: float) -> Layer:
    report = measure_report(rho)
    g, label = classify_report(report, epsilon)
    return Layer(t, rho, report, g, label)


def run_trace(
    initial: StateVector | DensityMatrix, pipeline: Sequence[Channel], epsilon: float = CHANNEL_EPS
) -> EehTrace:
    """Apply ``pipeline`` channel by channel, classifying every intermediate state."""
    for ch in pipeline:
        res = validate_cptp(ch)
        if res > CPTP_TOL:
            raise ValueError(f"channel {ch.name} fails CPTP validation (residual {res:.3e})")
    rho = as_density(initial)
    layers = [_layer(0, rho, epsilon)]
    for t, ch in enumerate(pipeline, start=1):
        rho = apply_channel(ch, rho)
        layers.append(_layer(t, rho, epsilon))
    return EehTrace(tuple(layers), tuple(ch.name for ch in pipeline), epsilon)


def diff_traces(a: EehTrace, b: EehTrace) -> list[int]:
    """Time indices where edge set, hyperedge presence or class differ."""
    if len(a.layers) != len(b.layers):
        raise ValueError(f"traces have {len(a.layers)} and {len(b.layers)} layers")
    return [
        i for i, (la, lb) in enumerate(zip(a.layers, b.layers)) if la.structure() != lb.structure()
    ]
