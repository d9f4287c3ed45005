import warnings

import numpy as np
import pytest

from conftest import brute_partial_trace
from hyperent.qstate import (
    CNOT,
    EPR,
    H,
    X,
    Z,
    DensityMatrix,
    Gate,
    StateVector,
    basis_state,
    density_from_pure,
    embed_gate,
    hermitian_eig,
    matrix_sqrt_psd,
    partial_trace,
    permute_qubits,
    preset_state,
    purity,
    random_pure_state,
    random_pure_states,
    random_unitary,
    state_from_json,
)

S2 = 1 / np.sqrt(2)


def test_preset_ghz_w_basis():
    ghz = preset_state("ghz").amplitudes
    expected = np.zeros(8)
    expected[[0, 7]] = S2
    assert np.allclose(ghz, expected, atol=1e-15)

    w = preset_state("w").amplitudes
    expected = np.zeros(8)
    expected[[1, 2, 4]] = 1 / np.sqrt(3)
    assert np.allclose(w, expected, atol=1e-15)

    b = preset_state("basis:000").amplitudes
    assert b[0] == 1 and np.count_nonzero(b) == 1
    assert preset_state("basis(101)") == basis_state("101")


def test_preset_bell_and_plus():
    assert np.allclose(preset_state("bell0_23").amplitudes[[0, 3]], S2)
    assert np.allclose(preset_state("plus_q1").amplitudes[[0, 4]], S2)


@pytest.mark.parametrize("bad", ["ghz3", "basis:02", "basis:0000", ""])
def test_unknown_preset(bad):
    with pytest.raises(ValueError):
        preset_state(bad)


def test_statevector_rejects_nonfinite_and_wrong_length():
    with pytest.raises(ValueError):
        StateVector([1, 0, 0])
    with pytest.raises(ValueError):
        StateVector([np.nan] + [0] * 7)
    with pytest.raises(ValueError):
        StateVector([0] * 8)


def test_density_from_pure():
    rho = density_from_pure(basis_state("000")).entries
    assert rho[0, 0] == 1 and np.count_nonzero(rho) == 1
    rho = density_from_pure(preset_state("ghz")).entries
    for i, j in [(0, 0), (0, 7), (7, 0), (7, 7)]:
        assert rho[i, j] == pytest.approx(0.5)
    assert np.count_nonzero(np.abs(rho) > 1e-15) == 4
    for seed in range(5):
        assert purity(density_from_pure(random_pure_state(seed))) == pytest.approx(1, abs=1e-12)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1, 1], [0, 0]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.1, -0.1]))  # negative eigenvalue
    m = DensityMatrix(np.diag([1 + 5e-10, -5e-10]))
    assert np.linalg.eigvalsh(m.entries).min() >= 0
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(3) / 3)


def test_partial_trace_examples():
    ghz = density_from_pure(preset_state("ghz"))
    red = partial_trace(ghz, {3}).entries
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    assert np.allclose(red, expected, atol=1e-15)
    assert np.allclose(red, brute_partial_trace(ghz.entries, [1, 2]))

    assert np.allclose(partial_trace(density_from_pure(basis_state("000")), {1, 2}).entries, [[1, 0], [0, 0]])

    w = density_from_pure(preset_state("w"))
    assert np.allclose(partial_trace(w, {2, 3}).entries, np.diag([2 / 3, 1 / 3]), atol=1e-15)


@pytest.mark.parametrize("keep", [[1], [2], [3], [1, 2], [1, 3], [2, 3]])
def test_partial_trace_matches_brute_force(keep):
    rho = density_from_pure(random_pure_state(11))
    drop = {1, 2, 3} - set(keep)
    assert np.allclose(partial_trace(rho, drop).entries, brute_partial_trace(rho.entries, keep), atol=1e-14)


@pytest.mark.parametrize("bad", [set(), {1, 2, 3}, {4}])
def test_partial_trace_errors(bad):
    with pytest.raises(ValueError):
        partial_trace(density_from_pure(preset_state("ghz")), bad)


def test_partial_trace_of_product_recovers_factor():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    rho_a = np.outer(a, a.conj())
    rho_b = 0.7 * np.outer(b, b.conj()) + 0.3 * np.eye(4) / 4
    rho = DensityMatrix(np.kron(rho_a, rho_b))
    assert np.max(np.abs(partial_trace(rho, {2, 3}).entries - rho_a)) <= 1e-10
    assert np.max(np.abs(partial_trace(rho, {1}).entries - rho_b)) <= 1e-10
    # pure product state: every single-qubit reduction is pure
    psi = StateVector(np.kron(a, np.kron([1, 0], [0.6, 0.8])))
    for q in (1, 2, 3):
        red = partial_trace(density_from_pure(psi), {1, 2, 3} - {q})
        assert purity(red) == pytest.approx(1, abs=1e-10)


def test_purity_examples():
    assert purity(DensityMatrix(np.eye(2) / 2)) == 0.5
    mix = np.zeros((4, 4))
    mix[0, 0] = mix[3, 3] = 0.5
    assert purity(DensityMatrix(mix)) == pytest.approx(0.5)


def test_embed_gate_examples():
    plus = embed_gate(H, [1]).matrix @ basis_state("000").amplitudes
    assert np.allclose(plus, preset_state("plus_q1").amplitudes)

    out = embed_gate(CNOT, [1, 2]).matrix @ basis_state("110").amplitudes
    assert np.allclose(out, basis_state("100").amplitudes)

    z2 = embed_gate(Z, [2]).matrix
    kron = np.kron(np.eye(2), np.kron(Z.matrix, np.eye(2)))
    assert np.array_equal(z2, kron)
    signs = [(-1) ** ((i >> 1) & 1) for i in range(8)]
    assert np.array_equal(np.diag(z2).real, signs)


def test_embed_gate_respects_target_order():
    # control 3, target 1: |001> -> |101>
    out = embed_gate(CNOT, [3, 1]).matrix @ basis_state("001").amplitudes
    assert np.allclose(out, basis_state("101").amplitudes)
    out = embed_gate(CNOT, [3, 1]).matrix @ basis_state("100").amplitudes
    assert np.allclose(out, basis_state("100").amplitudes)


def test_embed_gate_errors():
    with pytest.raises(ValueError):
        embed_gate(CNOT, [1])
    with pytest.raises(ValueError):
        embed_gate(CNOT, [2, 2])
    with pytest.raises(ValueError):
        embed_gate(H, [4])


def test_embedding_disjoint_targets_commutes():
    rng = np.random.default_rng(0)
    for _ in range(20):
        u = Gate(random_unitary(rng), "U")
        v = Gate(random_unitary(rng, 4), "V")
        a = embed_gate(u, [2]).matrix @ embed_gate(v, [3, 1]).matrix
        b = embed_gate(v, [3, 1]).matrix @ embed_gate(u, [2]).matrix
        assert np.max(np.abs(a - b)) <= 1e-12


def test_gate_rejects_nonunitary():
    with pytest.raises(ValueError):
        Gate([[1, 1], [0, 1]], "bad")


def test_epr_gate_makes_bell_pair():
    bell = EPR.matrix @ np.array([1, 0, 0, 0])
    assert np.allclose(bell, [S2, 0, 0, S2])


def test_hermitian_eig_examples():
    w, _ = hermitian_eig(np.diag([1.0, 3.0]))
    assert np.allclose(w, [3, 1])
    w, v = hermitian_eig(X.matrix)
    assert np.allclose(w, [1, -1])
    assert abs(abs(v[:, 0] @ np.array([S2, S2])) - 1) < 1e-12
    assert abs(abs(v[:, 1] @ np.array([S2, -S2])) - 1) < 1e-12
    rng = np.random.default_rng(5)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = a + a.conj().T
    w, v = hermitian_eig(m)
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) <= 1e-8
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_matrix_sqrt_psd():
    s = matrix_sqrt_psd(DensityMatrix(np.diag([4, 1]) / 5))
    assert np.allclose(s, np.diag([2, 1]) / np.sqrt(5))
    proj = density_from_pure(preset_state("w")).entries
    assert np.allclose(matrix_sqrt_psd(proj), proj, atol=1e-8)
    rng = np.random.default_rng(9)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    s = matrix_sqrt_psd(DensityMatrix(rho))
    assert np.max(np.abs(s - s.conj().T)) <= 1e-12
    assert np.max(np.abs(s @ s - rho)) <= 1e-8
    with pytest.raises(ValueError):
        matrix_sqrt_psd(np.diag([1.0, -0.01]))


def test_random_pure_state_deterministic_and_normalized():
    assert random_pure_state(42) == random_pure_state(42)
    assert random_pure_state(42) != random_pure_state(43)
    for s in random_pure_states(50, 1):
        assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-12
    assert random_pure_states(3, 7)[0] == random_pure_state(7)


def test_random_states_match_haar_purity_moment():
    # E[Tr rho_A^2] for Haar states on C^2 x C^4 is (2 + 4) / (2*4 + 1) = 2/3
    states = random_pure_states(10_000, 2024)
    ps = [purity(partial_trace(density_from_pure(s), {2, 3})) for s in states]
    assert np.mean(ps) == pytest.approx(2 / 3, abs=0.01)


def test_permute_qubits_moves_bits():
    rho = density_from_pure(basis_state("100"))
    moved = permute_qubits(rho, [3, 1, 2])  # qubit 1 -> position 3
    assert np.allclose(moved.entries, density_from_pure(basis_state("001")).entries)


def test_state_json():
    assert state_from_json({"preset": "ghz"}) == preset_state("ghz")
    amps = [[0, 0]] * 8
    amps[0] = [1, 0]
    assert state_from_json({"amplitudes": amps}) == basis_state("000")
    amps[0] = [1 + 1e-7, 0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        psi = state_from_json({"amplitudes": amps})
    assert caught and abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12
    amps[0] = [1.01, 0]
    with pytest.raises(ValueError):
        state_from_json({"amplitudes": amps})
    with pytest.raises(ValueError):
        state_from_json({"amplitudes": [[1, 0]]})
