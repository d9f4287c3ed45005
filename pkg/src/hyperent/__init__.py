"""Entangled-hypergraph classification and evolving-hypergraph traces for three qubits."""

from .ehg import ClassLabel, EntangledHypergraph, classify
from .eeh import EehTrace, diff_traces, run_trace
from .gsd import GsdForm, decompose, reconstruct
from .measures import MeasureReport, concurrence, measure_report, tangle
from .protocols import ProtocolSpec, preset
from .qstate import DensityMatrix, StateVector, density_from_pure, preset_state

__all__ = [
    "ClassLabel",
    "DensityMatrix",
    "EehTrace",
    "EntangledHypergraph",
    "GsdForm",
    "MeasureReport",
    "ProtocolSpec",
    "StateVector",
    "classify",
    "concurrence",
    "decompose",
    "density_from_pure",
    "diff_traces",
    "measure_report",
    "preset",
    "preset_state",
    "reconstruct",
    "run_trace",
    "tangle",
]
