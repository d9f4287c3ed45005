"""Preset protocol pipelines: teleportation and W-state key distribution."""

from __future__ import annotations

import copy
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .channels import Channel, channel_from_spec, compose
from .eeh import CHANNEL_EPS, SCHEMA, EehTrace, run_trace
from .qstate import StateVector, state_from_json

DEFAULT_TELEPORT_NOISE = {"channel": "phase_flip", "p": 0.5, "targets": [2]}

QKD_NOTES = (
    "Only the entanglement-distribution phase is simulated.",
    "Not simulated: random x/z basis choice per party, basis announcement,",
    "optional outcome disclosure for eavesdrop detection, restart unless the",
    "bases are a permutation of (z,x,x), success when the z-party reads |0>.",
)


@dataclass(frozen=True)
class NoiseSpec:
    channel: dict
    insert_after: int = 0
    fold: bool = True

    def to_dict(self) -> dict:
        return {"channel": self.channel, "insert_after": self.insert_after, "fold": self.fold}


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    initial: dict
    steps: tuple
    noise: Optional[NoiseSpec] = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.noise is not None:
            n = len(self.steps)
            if not 0 <= self.noise.insert_after < n:
                raise ValueError(f"noise insert_after={self.noise.insert_after} outside 0..{n - 1}")
            if self.noise.fold and self.noise.insert_after == n - 1:
                raise ValueError("folded noise needs a following step to fold into")

    def initial_state(self) -> StateVector:
        return state_from_json(self.initial)

    def channels(self) -> list[Channel]:
        """Step channels with the noise inserted (or folded into the next step)."""
        chans = [channel_from_spec(s) for s in self.steps]
        if self.noise is None:
            return chans
        k = self.noise.insert_after
        noise = channel_from_spec(self.noise.channel)
        if self.noise.fold:
            chans[k + 1] = compose(noise, chans[k + 1])
        else:
            chans.insert(k + 1, noise)
        return chans

    def run(self, epsilon: float = CHANNEL_EPS) -> EehTrace:
        return run_trace(self.initial_state(), self.channels(), epsilon)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "name": self.name,
            "initial": self.initial,
            "steps": list(self.steps),
            "noise": None if self.noise is None else self.noise.to_dict(),
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolSpec":
        if d.get("schema", SCHEMA) != SCHEMA:
            raise ValueError(f"unsupported protocol schema {d.get('schema')!r}")
        noise = d.get("noise")
        spec = cls(
            name=str(d.get("name", "custom")),
            initial=d["initial"],
            steps=tuple(d["steps"]),
            noise=None if noise is None else NoiseSpec(
                noise["channel"], int(noise.get("insert_after", 0)), bool(noise.get("fold", True))
            ),
            notes=tuple(d.get("notes", ())),
        )
        # fail early on malformed channel specs or states
        spec.initial_state()
        spec.channels()
        return spec


def teleportation_pipeline(noise=None, initial: str = "plus_q1") -> ProtocolSpec:
    """EPR on (2,3), CNOT 1->2, H on 1.

    ``noise`` may be ``True`` (phase flip p=0.5 on qubit 2 after the EPR step,
    folded into the CNOT arrow), a channel spec dict using the same placement,
    or a full ``NoiseSpec``.
    """
    if initial.startswith("basis"):
        warnings.warn(
            "teleporting a computational-basis qubit: the CNOT layer stays biseparable",
            stacklevel=2,
        )
    steps = (
        {"channel": "unitary", "gate": "EPR", "targets": [2, 3]},
        {"channel": "unitary", "gate": "CNOT", "targets": [1, 2]},
        {"channel": "unitary", "gate": "H", "targets": [1]},
    )
    if noise is True:
        noise = NoiseSpec(copy.deepcopy(DEFAULT_TELEPORT_NOISE))
    elif isinstance(noise, dict):
        noise = NoiseSpec(noise)
    elif noise is not None and not isinstance(noise, NoiseSpec):
        raise TypeError(f"unsupported noise argument {noise!r}")
    name = "teleport" if noise is None else "teleport-noisy"
    return ProtocolSpec(name, {"preset": initial}, steps, noise)


def qkd_w_pipeline(per_qubit_channels=None, name: str = "qkd-w") -> ProtocolSpec:
    """Transmission of each W-state qubit through its own channel, in qubit order."""
    if per_qubit_channels is None:
        per_qubit_channels = [{"channel": "identity", "targets": [q]} for q in (1, 2, 3)]
    specs = list(per_qubit_channels)
    if len(specs) != 3:
        raise ValueError("need exactly one channel spec per qubit")
    for q, spec in enumerate(specs, start=1):
        ch = channel_from_spec(spec)
        if ch.targets != (q,):
            raise ValueError(f"channel {ch.name} for qubit {q} targets {list(ch.targets)}")
    return ProtocolSpec(name, {"preset": "w"}, tuple(specs), notes=QKD_NOTES)


def _qkd_eve() -> ProtocolSpec:
    return qkd_w_pipeline(
        [
            {"channel": "identity", "targets": [1]},
            {"channel": "identity", "targets": [2]},
            {"channel": "measure_dephase", "targets": [3]},
        ],
        name="qkd-w-eve",
    )


PRESETS = {
    "teleport": lambda: teleportation_pipeline(),
    "teleport-noisy": lambda: teleportation_pipeline(noise=True),
    "qkd-w": lambda: qkd_w_pipeline(),
    "qkd-w-eve": _qkd_eve,
}


def preset(name: str) -> ProtocolSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown protocol preset {name!r}; choose from {sorted(PRESETS)}") from None
