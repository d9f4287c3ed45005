"""Generalized Schmidt decomposition of three-qubit pure states.

Every pure state is local-unitary equivalent to

    l0|000> + l1 e^{i theta}|100> + l2|101> + l3|110> + l4|111>

with real ``l_i >= 0`` and ``0 <= theta <= pi``. The construction follows
Acin et al.: rotate qubit 1 so that its |0> slice becomes singular, diagonalize
that slice with unitaries on qubits 2 and 3, then push the remaining phases
into diagonal local unitaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import ZERO_EPS, measure_report
from .qstate import DIM, StateVector

CERTIFY_TOL = 1e-7

# Amplitude index of each canonical term, in lambda order.
_TERMS = (0b000, 0b100, 0b101, 0b110, 0b111)


class GsdError(RuntimeError):
    """The computed canonical form is not LU-equivalent to its input."""


@dataclass(frozen=True)
class GsdForm:
    lam: tuple[float, float, float, float, float]
    theta: float = 0.0

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if len(lam) != 5:
            raise ValueError("GsdForm needs exactly five coefficients")
        if any(not math.isfinite(x) or x < 0.0 for x in lam):
            raise ValueError(f"coefficients must be finite and nonnegative: {lam}")
        if abs(sum(x * x for x in lam) - 1.0) > 1e-9:
            raise ValueError("squared coefficients must sum to 1")
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "theta", float(self.theta))

    def to_dict(self) -> dict:
        return {"lambda": list(self.lam), "theta": self.theta}

    @classmethod
    def from_dict(cls, d: dict) -> "GsdForm":
        return cls(tuple(d["lambda"]), d.get("theta", 0.0))


@dataclass(frozen=True)
class SupportPrediction:
    c12_possible: bool
    c13_possible: bool
    c23_possible: bool
    tau_possible: bool

    def to_dict(self) -> dict:
        return {
            "c12_possible": self.c12_possible,
            "c13_possible": self.c13_possible,
            "c23_possible": self.c23_possible,
            "tau_possible": self.tau_possible,
        }


def reconstruct(form: GsdForm) -> StateVector:
    amps = np.zeros(DIM, dtype=np.complex128)
    for idx, lam in zip(_TERMS, form.lam):
        amps[idx] = lam
    amps[0b100] *= np.exp(1j * form.theta)
    return StateVector(amps)


def predicted_supports(form: GsdForm, epsilon: float = ZERO_EPS) -> SupportPrediction:
    """Which measures may be nonzero given the coefficient pattern."""
    l0, l1, l2, l3, l4 = form.lam
    return SupportPrediction(
        c12_possible=l0 * l3 > epsilon,
        c13_possible=l0 * l2 > epsilon,
        c23_possible=l1 * l4 > epsilon or l2 * l3 > epsilon,
        tau_possible=l0 * l4 > epsilon,
    )


def _det2(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def _singular_roots(t0: np.ndarray, t1: np.ndarray, tol: float) -> list:
    """Values z with det(t0 + z t1) = 0; ``None`` stands for z = infinity."""
    a2 = _det2(t1)
    a0 = _det2(t0)
    a1 = t0[0, 0] * t1[1, 1] + t1[0, 0] * t0[1, 1] - t0[0, 1] * t1[1, 0] - t1[0, 1] * t0[1, 0]
    if abs(a2) <= tol:
        if abs(a1) <= tol:
            return [0j, None] if abs(a0) <= tol else [None]
        return [-a0 / a1, None]
    disc = np.sqrt(a1 * a1 - 4.0 * a2 * a0 + 0j)
    qp, qm = -(a1 + disc) / 2.0, -(a1 - disc) / 2.0
    q = qp if abs(qp) >= abs(qm) else qm
    if q == 0:
        return [0j]
    return [q / a2, a0 / q]


def _phase_theta(a: complex, b: complex, c: complex, d: complex, tol: float) -> float:
    # Diagonal phase unitaries on the three qubits plus a global phase can make
    # b, c, d real and positive; the leftover phase on a is this combination.
    # If any of a..d vanishes the system is underdetermined and theta can be 0.
    if min(abs(a), abs(b), abs(c), abs(d)) <= tol:
        return 0.0
    th = np.angle(a) - np.angle(b) - np.angle(c) + np.angle(d)
    th = math.remainder(float(th), 2.0 * math.pi)
    # psi and its complex conjugate share every measure used here.
    return abs(th)


def _form_from_root(t0: np.ndarray, t1: np.ndarray, z, tol: float) -> GsdForm:
    if z is None:
        s0, s1 = t1, -t0
    else:
        n = math.sqrt(1.0 + abs(z) ** 2)
        s0 = (t0 + z * t1) / n
        s1 = (-np.conj(z) * t0 + t1) / n
    u, sv, vh = np.linalg.svd(s0)
    rot = u.conj().T @ s1 @ vh.conj().T
    a, b, c, d = rot[0, 0], rot[0, 1], rot[1, 0], rot[1, 1]
    lam = np.array([sv[0], abs(a), abs(b), abs(c), abs(d)])
    lam = lam / np.linalg.norm(lam)
    return GsdForm(tuple(lam), _phase_theta(a, b, c, d, tol))


def _key(form: GsdForm) -> tuple:
    return form.lam[1:] + (form.theta,)


def _decompose_unchecked(psi: StateVector, epsilon: float) -> GsdForm:
    t = psi.tensor()
    split = np.linalg.svd(t.reshape(2, 4), compute_uv=False)
    if split[1] <= epsilon:
        # Qubit 1 factors out: rotate it to |0> if qubits 2,3 are a product,
        # otherwise to |1> and write the pair in anti-diagonal Schmidt form
        # (keeps l1 = 0).
        _, _, vh = np.linalg.svd(t.reshape(2, 4))
        sigma = np.linalg.svd(vh[0].reshape(2, 2), compute_uv=False)
        sigma = sigma / np.linalg.norm(sigma)
        if sigma[1] <= epsilon:
            return GsdForm((1.0, 0.0, 0.0, 0.0, 0.0))
        return GsdForm((0.0, 0.0, float(sigma[1]), float(sigma[0]), 0.0))
    t0, t1 = t[0], t[1]
    forms = [_form_from_root(t0, t1, z, epsilon) for z in _singular_roots(t0, t1, epsilon)]
    return min(forms, key=_key)


_CHECKED = ("c12", "c13", "c23", "c1_23", "c2_13", "c3_12", "tau")


def lu_mismatch(a: StateVector, b: StateVector) -> float:
    """Largest difference over the six concurrences and the tangle."""
    ra, rb = measure_report(a), measure_report(b)
    return max(abs(getattr(ra, f) - getattr(rb, f)) for f in _CHECKED)


def decompose(psi: StateVector, epsilon: float = 1e-12) -> GsdForm:
    """Canonical five-term form of ``psi``.

    The result is certified against the input by comparing all LU-invariant
    measures; a mismatch above 1e-7 raises ``GsdError``. ``epsilon`` is the
    threshold below which determinants, singular values and coefficients are
    treated as zero when picking the degenerate branches.
    """
    if abs(np.linalg.norm(psi.amplitudes) - 1.0) > 1e-10:
        raise ValueError("decompose expects a normalized state")
    form = _decompose_unchecked(psi, epsilon)
    err = lu_mismatch(psi, reconstruct(form))
    if err > CERTIFY_TOL:
        raise GsdError(f"canonical form failed LU certification (mismatch {err:.3e})")
    return form
