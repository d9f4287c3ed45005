"""Entanglement measures: Schmidt coefficients, Wootters concurrence, CKW tangle."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .qstate import (
    PSD_TOL,
    DensityMatrix,
    StateVector,
    as_density,
    hermitian_eig,
    partial_trace,
    purity,
)

# Single threshold for "nonzero" concurrence/tangle, shared by the classifier.
ZERO_EPS = 1e-9
# Default purity slack below which a state counts as mixed.
PURITY_EPS = 1e-6
# Eigenvalues of a reduced state below this are numerical zeros.
_RANK_TOL = 1e-14

_SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=np.complex128
)

PAIRS = ((1, 2), (1, 3), (2, 3))


def _other(*qubits: int) -> list[int]:
    return [q for q in (1, 2, 3) if q not in qubits]


def _check_pivot(pivot: int) -> None:
    if pivot not in (1, 2, 3):
        raise ValueError(f"pivot must be 1, 2 or 3, got {pivot!r}")


def _split_matrix(psi: StateVector, pivot: int) -> np.ndarray:
    """2x4 amplitude matrix: rows indexed by ``pivot``, columns by the other two."""
    t = np.moveaxis(psi.tensor(), pivot - 1, 0)
    return t.reshape(2, 4)


def _pair_factor(psi: StateVector, pair: tuple[int, int]) -> np.ndarray:
    """4x2 matrix F with rho_pair = F F^dagger."""
    (k,) = _other(*pair)
    t = psi.tensor().transpose([pair[0] - 1, pair[1] - 1, k - 1])
    return t.reshape(4, 2)


def schmidt_coefficients(psi: StateVector, pivot: int = 1) -> tuple[float, float]:
    """Schmidt coefficients (not their squares), descending, for ``pivot`` vs the rest."""
    _check_pivot(pivot)
    s = np.linalg.svd(_split_matrix(psi, pivot), compute_uv=False)
    s = s / np.linalg.norm(s)
    return float(s[0]), float(s[1])


def spin_flip(rho: DensityMatrix) -> np.ndarray:
    """Wootters' spin flip (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    if rho.dim != 4:
        raise ValueError("spin_flip expects a 4x4 two-qubit density matrix")
    return _SIGMA_YY @ rho.entries.conj() @ _SIGMA_YY


def _concurrence_from_factor(w: np.ndarray) -> float:
    # For rho = W W^dagger the square roots of the eigenvalues of rho*rho_tilde
    # (equivalently of sqrt(rho) rho_tilde sqrt(rho)) are the singular values
    # of W^T (sigma_y x sigma_y) W. SVD keeps tiny roots at round-off level
    # instead of sqrt(round-off).
    if w.shape[1] == 0:
        return 0.0
    roots = np.linalg.svd(w.T @ _SIGMA_YY @ w, compute_uv=False)
    roots = np.concatenate([np.sort(roots)[::-1], np.zeros(4)])[:4]
    c = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(1.0, max(0.0, c)))


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit state, in [0, 1]."""
    if rho.dim != 4:
        raise ValueError("concurrence expects a 4x4 two-qubit density matrix")
    w, v = hermitian_eig(rho.entries)
    if w[-1] < -PSD_TOL:
        raise ValueError(f"density matrix not PSD (min eigenvalue {w[-1]:.3e})")
    keep = w > _RANK_TOL
    return _concurrence_from_factor(v[:, keep] * np.sqrt(w[keep]))


def bipartite_concurrence(state: StateVector | DensityMatrix, pivot: int = 1) -> float:
    """C_{pivot(rest)} = sqrt(2 (1 - Tr rho_pivot^2)) for a pure state."""
    _check_pivot(pivot)
    rho_p = partial_trace(as_density(state), _other(pivot))
    return float(np.sqrt(2.0 * (1.0 - purity(rho_p))))


def pairwise_concurrences(state: StateVector | DensityMatrix) -> tuple[float, float, float]:
    """(C12, C13, C23), each from the two-qubit reduction."""
    if isinstance(state, StateVector):
        return tuple(_concurrence_from_factor(_pair_factor(state, p)) for p in PAIRS)
    return tuple(concurrence(partial_trace(state, _other(*p))) for p in PAIRS)


def _raw_tangle(c_split_sq: float, ca: float, cb: float) -> float:
    return c_split_sq - ca * ca - cb * cb


def tangle(state: StateVector | DensityMatrix, pivot: int = 1) -> float:
    """CKW residual tangle evaluated around ``pivot``, clamped at zero.

    Only meaningful for pure states.
    """
    _check_pivot(pivot)
    rho = as_density(state)
    split_sq = 2.0 * (1.0 - purity(partial_trace(rho, _other(pivot))))
    a, b = _other(pivot)
    ca = concurrence(partial_trace(rho, _other(pivot, a)))
    cb = concurrence(partial_trace(rho, _other(pivot, b)))
    return max(0.0, _raw_tangle(split_sq, ca, cb))


@dataclass(frozen=True)
class MeasureReport:
    c12: float
    c13: float
    c23: float
    c1_23: float
    c2_13: float
    c3_12: float
    tau: Optional[float]
    purity: float

    def pairwise(self) -> dict[tuple[int, int], float]:
        return {(1, 2): self.c12, (1, 3): self.c13, (2, 3): self.c23}

    def split(self, pivot: int) -> float:
        return (self.c1_23, self.c2_13, self.c3_12)[pivot - 1]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureReport":
        tau = d.get("tau")
        return cls(
            c12=float(d["c12"]), c13=float(d["c13"]), c23=float(d["c23"]),
            c1_23=float(d["c1_23"]), c2_13=float(d["c2_13"]), c3_12=float(d["c3_12"]),
            tau=None if tau is None else float(tau),
            purity=float(d["purity"]),
        )


def _single_purities_pure(psi: StateVector) -> list[float]:
    out = []
    for q in (1, 2, 3):
        m = _split_matrix(psi, q)
        r = m @ m.conj().T
        out.append(min(1.0, max(0.5, float(np.sum(np.abs(r) ** 2)))))
    return out


def measure_report(state: StateVector | DensityMatrix, purity_eps: float = PURITY_EPS) -> MeasureReport:
    """All pairwise and one-vs-rest concurrences plus the tangle.

    The tangle is reported only when the global purity is at least
    ``1 - purity_eps``; for mixed states it is ``None``.
    """
    if isinstance(state, StateVector):
        c12, c13, c23 = pairwise_concurrences(state)
        singles = _single_purities_pure(state)
        total = 1.0
    else:
        if state.dim != 8:
            raise ValueError("measure_report expects a three-qubit state")
        c12, c13, c23 = pairwise_concurrences(state)
        singles = [purity(partial_trace(state, _other(q))) for q in (1, 2, 3)]
        total = purity(state)
    splits_sq = [2.0 * (1.0 - p) for p in singles]
    tau = None
    if total >= 1.0 - purity_eps:
        tau = max(0.0, _raw_tangle(splits_sq[0], c12, c13))
    s1, s2, s3 = (float(np.sqrt(max(0.0, x))) for x in splits_sq)
    return MeasureReport(c12, c13, c23, s1, s2, s3, tau, total)
