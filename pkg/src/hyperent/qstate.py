"""Three-qubit states, gates and the small linear-algebra kernel they need.

Qubit 1 is the most significant bit of the basis index, so the amplitude of
``|q1 q2 q3>`` lives at index ``4*q1 + 2*q2 + q3``.
"""

from __future__ import annotations

import warnings
from typing import Iterable, Sequence

import numpy as np

NQUBITS = 3
DIM = 2**NQUBITS

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
# eigenvalues this close to zero are eigensolver rounding, not a defect to repair
CLAMP_FLOOR = 1e-13
UNITARY_TOL = 1e-10
FILE_NORM_TOL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} contains NaN or Inf")


class StateVector:
    """Pure three-qubit state, normalized on construction."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: Iterable[complex], normalize: bool = True):
        if not isinstance(amplitudes, np.ndarray):
            amplitudes = list(amplitudes)
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape != (DIM,):
            raise ValueError(f"expected {DIM} amplitudes, got {amps.size}")
        _check_finite(amps, "state vector")
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("zero vector is not a state")
        if normalize:
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm {norm!r})")
        self.amplitudes = _frozen(amps)

    def tensor(self) -> np.ndarray:
        """Amplitudes as a (2, 2, 2) array indexed by (q1, q2, q3)."""
        return self.amplitudes.reshape(2, 2, 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return bool(np.array_equal(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"StateVector({np.round(self.amplitudes, 6).tolist()})"


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix of size 2, 4 or 8.

    Construction validates the invariants and then repairs sub-tolerance
    noise: the matrix is symmetrized and eigenvalues in ``[-PSD_TOL, -1e-13)``
    are clamped to zero. Anything outside tolerance raises ``ValueError``.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray, check: bool = True):
        m = np.asarray(entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4, 8):
            raise ValueError(f"density matrix must be 2x2, 4x4 or 8x8, got {m.shape}")
        _check_finite(m, "density matrix")
        if check:
            herm_err = np.max(np.abs(m - m.conj().T))
            if herm_err > HERMITIAN_TOL:
                raise ValueError(f"density matrix not Hermitian (residual {herm_err:.3e})")
            m = 0.5 * (m + m.conj().T)
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr!r} != 1")
            w, v = np.linalg.eigh(m)
            if w[0] < -PSD_TOL:
                raise ValueError(f"density matrix not PSD (min eigenvalue {w[0]:.3e})")
            if w[0] < -CLAMP_FLOOR:
                w = np.clip(w, 0.0, None)
                m = (v * w) @ v.conj().T
        self.entries = _frozen(m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def nqubits(self) -> int:
        return int(self.dim).bit_length() - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class Gate:
    """Named unitary on 1, 2 or 3 qubits."""

    __slots__ = ("matrix", "name")

    def __init__(self, matrix: np.ndarray, name: str):
        u = np.asarray(matrix, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] not in (2, 4, 8):
            raise ValueError(f"gate matrix must be 2x2, 4x4 or 8x8, got {u.shape}")
        _check_finite(u, "gate")
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if err > UNITARY_TOL:
            raise ValueError(f"gate {name!r} is not unitary (residual {err:.3e})")
        self.matrix = _frozen(u)
        self.name = name

    @property
    def nqubits(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    def __repr__(self) -> str:
        return f"Gate({self.name!r}, {self.nqubits} qubit(s))"


_SQ2 = 1.0 / np.sqrt(2.0)

I2 = Gate(np.eye(2), "I")
X = Gate([[0, 1], [1, 0]], "X")
Y = Gate([[0, -1j], [1j, 0]], "Y")
Z = Gate([[1, 0], [0, -1]], "Z")
H = Gate(np.array([[1, 1], [1, -1]]) * _SQ2, "H")
CNOT = Gate([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], "CNOT")
# Bell-pair preparation: H on the first target, then CNOT first -> second.
EPR = Gate(CNOT.matrix @ np.kron(H.matrix, np.eye(2)), "EPR")

GATES = {g.name: g for g in (I2, X, Y, Z, H, CNOT, EPR)}


def basis_state(bits: str) -> StateVector:
    if len(bits) != NQUBITS or set(bits) - {"0", "1"}:
        raise ValueError(f"basis label must be {NQUBITS} binary digits, got {bits!r}")
    amps = np.zeros(DIM, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps)


PRESETS = ("ghz", "w", "bell0_23", "plus_q1")


def preset_state(name: str) -> StateVector:
    """Named preset: ``ghz``, ``w``, ``bell0_23``, ``plus_q1`` or ``basis:bbb``.

    ``basis(bbb)`` is accepted as an alias for ``basis:bbb``.
    """
    key = name.strip().lower()
    if key.startswith("basis:"):
        return basis_state(key[len("basis:"):])
    if key.startswith("basis(") and key.endswith(")"):
        return basis_state(key[len("basis("):-1])
    amps = np.zeros(DIM, dtype=np.complex128)
    if key == "ghz":
        amps[0b000] = amps[0b111] = _SQ2
    elif key == "w":
        amps[0b001] = amps[0b010] = amps[0b100] = 1.0 / np.sqrt(3.0)
    elif key == "bell0_23":
        amps[0b000] = amps[0b011] = _SQ2
    elif key == "plus_q1":
        amps[0b000] = amps[0b100] = _SQ2
    else:
        raise ValueError(f"unknown preset {name!r}")
    return StateVector(amps)


def density_from_pure(psi: StateVector) -> DensityMatrix:
    a = psi.amplitudes
    m = np.outer(a, a.conj())
    # exact Hermitian symmetry, so later re-validation leaves the bits alone
    return DensityMatrix(0.5 * (m + m.conj().T), check=False)


def as_density(state: StateVector | DensityMatrix) -> DensityMatrix:
    if isinstance(state, StateVector):
        return density_from_pure(state)
    return state


def partial_trace(rho: DensityMatrix, discard: Iterable[int]) -> DensityMatrix:
    """Trace out the qubits in ``discard`` (1-based) from a three-qubit state."""
    if rho.dim != DIM:
        raise ValueError("partial_trace expects an 8x8 density matrix")
    drop = sorted(set(discard))
    if not drop or len(drop) >= NQUBITS or any(q not in (1, 2, 3) for q in drop):
        raise ValueError(f"discard must be a nonempty proper subset of {{1,2,3}}, got {drop}")
    keep = [q for q in (1, 2, 3) if q not in drop]
    t = rho.entries.reshape([2] * (2 * NQUBITS))
    # Axes 0..2 are row qubits 1..3, axes 3..5 the column qubits.
    letters = "abcdef"
    row = [letters[i] for i in range(3)]
    col = [letters[3 + i] for i in range(3)]
    for q in drop:
        col[q - 1] = row[q - 1]
    out = "".join(row[q - 1] for q in keep) + "".join(col[q - 1] for q in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = 2 ** len(keep)
    return DensityMatrix(red.reshape(d, d), check=False)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), clamped to [1/d, 1]."""
    m = rho.entries
    p = float(np.sum(np.abs(m) ** 2))  # Tr(rho rho^dagger) = Tr(rho^2) for Hermitian rho
    return min(1.0, max(1.0 / rho.dim, p))


def embed_matrix(m: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Lift a 2^k x 2^k operator on ``targets`` to the 8x8 space."""
    targets = list(targets)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate targets {targets}")
    if any(q not in (1, 2, 3) for q in targets):
        raise ValueError(f"targets must be drawn from {{1,2,3}}, got {targets}")
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2**k, 2**k):
        raise ValueError(f"operator of shape {m.shape} does not match {k} target(s)")
    rest = [q for q in (1, 2, 3) if q not in targets]
    full = np.kron(m, np.eye(2 ** len(rest))).reshape([2] * 6)
    order = targets + rest  # qubit carried by each tensor axis of `full`
    perm = [order.index(q) for q in (1, 2, 3)]
    full = full.transpose(perm + [3 + p for p in perm])
    return full.reshape(DIM, DIM)


def embed_gate(gate: Gate, targets: Sequence[int]) -> Gate:
    return Gate(embed_matrix(gate.matrix, targets), f"{gate.name}{tuple(targets)}")


def apply_unitary(psi: StateVector, gate: Gate, targets: Sequence[int] | None = None) -> StateVector:
    u = gate.matrix if targets is None else embed_matrix(gate.matrix, targets)
    return StateVector(u @ psi.amplitudes)


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and unitary eigenvectors (columns) of Hermitian ``m``."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] > DIM:
        raise ValueError(f"expected a square matrix of size <= {DIM}, got {m.shape}")
    err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if err > 1e-8:
        raise ValueError(f"matrix is not Hermitian (residual {err:.3e})")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def matrix_sqrt_psd(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-1e-9, 0) are clamped to 0."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    w, v = hermitian_eig(m)
    if w[-1] < -PSD_TOL:
        raise ValueError(f"matrix not PSD (min eigenvalue {w[-1]:.3e})")
    s = np.sqrt(np.clip(w, 0.0, None))
    return (v * s) @ v.conj().T


def random_pure_states(count: int, seed: int) -> list[StateVector]:
    """Haar-random states from normalized complex Gaussians.

    Uses numpy's ``default_rng`` (PCG64) and draws a ``(count, 8, 2)``
    standard-normal block; the last axis holds (re, im). Each state consumes
    16 consecutive draws, so ``random_pure_states(n, s)`` is a prefix of
    ``random_pure_states(m, s)`` for n <= m.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, DIM, 2))
    return [StateVector(z[i, :, 0] + 1j * z[i, :, 1]) for i in range(count)]


def random_pure_state(seed: int) -> StateVector:
    return random_pure_states(1, seed)[0]


def random_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def permute_qubits(rho: DensityMatrix, perm: Sequence[int]) -> DensityMatrix:
    """Relabel qubits: the qubit at position ``q`` moves to position ``perm[q-1]``."""
    perm = list(perm)
    if sorted(perm) != [1, 2, 3]:
        raise ValueError(f"not a permutation of (1,2,3): {perm}")
    t = rho.entries.reshape([2] * 6)
    # new axis perm[q-1]-1 takes old axis q-1
    src = [0] * 3
    for q in (1, 2, 3):
        src[perm[q - 1] - 1] = q - 1
    t = t.transpose(src + [3 + s for s in src])
    return DensityMatrix(t.reshape(DIM, DIM), check=False)


def state_from_json(obj: dict) -> StateVector:
    """Parse ``{"preset": name}`` or ``{"amplitudes": [[re, im], ...]}``.

    Amplitude lists whose norm is off by more than 1e-6 are rejected; smaller
    deviations are renormalized with a warning.
    """
    if not isinstance(obj, dict):
        raise ValueError("state JSON must be an object")
    if "preset" in obj:
        return preset_state(str(obj["preset"]))
    if "amplitudes" not in obj:
        raise ValueError('state JSON needs "preset" or "amplitudes"')
    raw = obj["amplitudes"]
    if not isinstance(raw, list) or len(raw) != DIM:
        raise ValueError(f'"amplitudes" must list {DIM} [re, im] pairs')
    try:
        amps = np.array([complex(float(p[0]), float(p[1])) for p in raw], dtype=np.complex128)
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed amplitude entry: {exc}") from None
    _check_finite(amps, "state vector")
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > FILE_NORM_TOL:
        raise ValueError(f"amplitudes have norm {norm!r}, off by more than {FILE_NORM_TOL}")
    if abs(norm - 1.0) > NORM_TOL:
        warnings.warn(f"renormalizing state with norm {norm!r}", stacklevel=2)
    return StateVector(amps)


def state_to_json(psi: StateVector) -> dict:
    return {"amplitudes": [[float(a.real), float(a.imag)] for a in psi.amplitudes]}


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[complex(p[0], p[1]) for p in row] for row in rows], dtype=np.complex128)
