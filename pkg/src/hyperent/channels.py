"""CPTP maps in Kraus form acting on the three-qubit register."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qstate import DIM, GATES, DensityMatrix, Gate, embed_matrix

CPTP_TOL = 1e-10
FULL = (1, 2, 3)


def _targets(targets: Sequence[int]) -> tuple[int, ...]:
    t = tuple(int(q) for q in targets)
    if not 1 <= len(t) <= 3 or len(set(t)) != len(t) or any(q not in FULL for q in t):
        raise ValueError(f"targets must be 1-3 distinct qubits from {{1,2,3}}, got {list(targets)}")
    return t


def completeness_residual(kraus: Sequence[np.ndarray]) -> float:
    d = kraus[0].shape[0]
    acc = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(acc - np.eye(d))))


@dataclass(frozen=True, eq=False)
class Channel:
    """Kraus operators stored on their own targets; lifted to 8x8 when applied."""

    name: str
    kraus: tuple
    targets: tuple

    def __post_init__(self):
        targets = _targets(self.targets)
        d = 2 ** len(targets)
        ops = []
        for k in self.kraus:
            k = np.array(k, dtype=np.complex128)
            if k.shape != (d, d):
                raise ValueError(f"Kraus operator shape {k.shape} does not match targets {targets}")
            k.flags.writeable = False
            ops.append(k)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        res = completeness_residual(ops)
        if res > CPTP_TOL:
            raise ValueError(f"channel {self.name!r} is not trace preserving (residual {res:.3e})")
        object.__setattr__(self, "kraus", tuple(ops))
        object.__setattr__(self, "targets", targets)

    def lifted(self) -> list[np.ndarray]:
        if self.targets == FULL:
            return list(self.kraus)
        return [embed_matrix(k, self.targets) for k in self.kraus]

    def __repr__(self) -> str:
        return f"Channel({self.name!r}, {len(self.kraus)} Kraus op(s) on {list(self.targets)})"


def validate_cptp(ch: Channel) -> float:
    """Completeness residual max|sum E^dag E - I|; above 1e-10 means invalid."""
    return completeness_residual(ch.kraus)


def unitary_channel(gate: Gate, targets: Sequence[int]) -> Channel:
    if gate.nqubits != len(targets):
        raise ValueError(f"gate {gate.name} acts on {gate.nqubits} qubit(s), got targets {list(targets)}")
    return Channel(f"E_{gate.name}", (gate.matrix,), targets)


def phase_flip(p: float, targets: Sequence[int] = (1,)) -> Channel:
    """Kraus pair {sqrt(p) Z^(x)k, sqrt(1-p) I} on the target subset.

    Coherences between states of opposite target parity scale by (1 - 2p), so
    p = 0.5 fully dephases.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    targets = _targets(targets)
    zk = np.array([[1.0]])
    for _ in targets:
        zk = np.kron(zk, GATES["Z"].matrix)
    eye = np.eye(2 ** len(targets))
    return Channel("E_PhaseFlip", (np.sqrt(p) * zk, np.sqrt(1.0 - p) * eye), targets)


def measure_dephase(target: int) -> Channel:
    """Computational-basis measurement with the outcome discarded."""
    return Channel("E_EVE", (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), (target,))


def identity_channel(targets: Sequence[int] = FULL) -> Channel:
    return Channel("E_I", (np.eye(2 ** len(targets)),), targets)


def apply_channel(ch: Channel, rho: DensityMatrix) -> DensityMatrix:
    if rho.dim != DIM:
        raise ValueError("apply_channel expects an 8x8 density matrix")
    m = rho.entries
    out = np.zeros_like(m)
    for k in ch.lifted():
        out += k @ m @ k.conj().T
    return DensityMatrix(out)


def compose(first: Channel, then: Channel) -> Channel:
    """Channel applying ``first`` and then ``then``; Kraus set {F_j E_i}."""
    fs, es = then.lifted(), first.lifted()
    ops = [f @ e for f in fs for e in es]
    return Channel(f"{then.name}∘{first.name}", tuple(ops), FULL)


def channel_from_spec(spec: dict) -> Channel:
    """Build a channel from its protocol-file JSON form."""
    if not isinstance(spec, dict) or "channel" not in spec:
        raise ValueError(f'channel spec must be an object with a "channel" key: {spec!r}')
    kind = spec["channel"]
    if kind == "unitary":
        gate = spec.get("gate")
        if gate not in GATES:
            raise ValueError(f"unknown gate {gate!r}; expected one of {sorted(GATES)}")
        return unitary_channel(GATES[gate], spec.get("targets", []))
    if kind == "phase_flip":
        return phase_flip(float(spec.get("p", 0.5)), spec.get("targets", [1]))
    if kind == "measure_dephase":
        targets = spec.get("targets", [])
        if len(targets) != 1:
            raise ValueError("measure_dephase takes exactly one target")
        return measure_dephase(targets[0])
    if kind == "identity":
        return identity_channel(spec.get("targets", FULL))
    if kind == "compose":
        parts = spec.get("of", [])
        if not parts:
            raise ValueError('compose needs a nonempty "of" list')
        ch = channel_from_spec(parts[0])
        for part in parts[1:]:
            ch = compose(ch, channel_from_spec(part))
        return ch
    raise ValueError(f"unknown channel kind {kind!r}")
