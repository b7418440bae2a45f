import numpy as np
import pytest

from qklab.exceptions import (InvariantViolation, ShapeError, UnsupportedSizeError,
                              ValidationError)
from qklab.noise_bounds import decay_factor, kernel_noise_bound
from qklab.numerics import PAULIS
from qklab.quantum_sim import (CircuitConfig, DensityMatrix, KernelMatrix, NoiseSpec,
                               QuantumKernel, apply_global_depolarizing,
                               apply_local_depolarizing, conjugation_sign, cross_kernel,
                               encode_with_noise, equivalent_global_p,
                               exact_noisy_kernel_element, global_layers_circuit, iqp_encode,
                               kernel_element, kernel_matrix, pauli_coefficients,
                               pauli_product, pauli_string, per_layer_global_p, purity,
                               survival_probability, validate_density_matrix)
from qklab.test.conftest import random_pure_state

P_GRID = [round(0.05 * i, 2) for i in range(16)]


def _features(rng, m, n):
    return rng.uniform(0.0, np.pi, size=(m, n))


def test_iqp_zero_angles_gives_plus_state():
    rho = iqp_encode(np.zeros(2), CircuitConfig(2, 1))
    np.testing.assert_allclose(rho.matrix, np.full((4, 4), 0.25), atol=1e-12)


@pytest.mark.parametrize("n_qubits,n_layers", [(1, 1), (2, 2), (3, 1)])
def test_iqp_states_are_pure(rng, n_qubits, n_layers):
    config = CircuitConfig(n_qubits, n_layers)
    for x in _features(rng, 5, n_qubits):
        rho = iqp_encode(x, config)
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-10)
        assert rho.purity() == pytest.approx(1.0, abs=1e-10)
        assert kernel_element(rho, rho) == pytest.approx(1.0, abs=1e-10)
        rho.validate()


def test_iqp_rejects_wrong_feature_length():
    with pytest.raises(ValidationError, match="n_qubits"):
        iqp_encode(np.zeros(3), CircuitConfig(2, 1))
    with pytest.raises(ValidationError, match="finite"):
        iqp_encode(np.array([0.1, np.nan]), CircuitConfig(2, 1))


def test_entanglement_topology():
    assert CircuitConfig(3).entangling_pairs() == [(0, 1), (1, 2)]
    assert CircuitConfig(3, entanglement="circular").entangling_pairs() == [(0, 1), (0, 2), (1, 2)]
    assert CircuitConfig(1).entangling_pairs() == []
    with pytest.raises(ValidationError):
        CircuitConfig(2, entanglement="circular")
    with pytest.raises(ValidationError):
        CircuitConfig(0)


def test_entangler_changes_the_state():
    x = np.array([1.0, 2.0])
    product = np.kron(iqp_encode(x[:1], CircuitConfig(1)).matrix,
                      iqp_encode(x[1:], CircuitConfig(1)).matrix)
    assert not np.allclose(iqp_encode(x, CircuitConfig(2)).matrix, product)


def test_local_channel_on_ground_state():
    p = 0.3
    rho = DensityMatrix(np.diag([1.0, 0.0]))
    out = apply_local_depolarizing(rho, p, 0)
    np.testing.assert_allclose(out.matrix, np.diag([1 - 2 * p / 3, 2 * p / 3]), atol=1e-12)


def test_local_channel_identity_and_full_depolarisation(rng):
    for _ in range(100):
        rho = random_pure_state(rng, 2)
        np.testing.assert_allclose(apply_local_depolarizing(rho, 0.0, 1).matrix, rho, atol=1e-12)
        out = apply_local_depolarizing(apply_local_depolarizing(rho, 0.75, 0), 0.75, 1)
        np.testing.assert_allclose(out.matrix, np.eye(4) / 4, atol=1e-12)


def test_channels_are_cptp(rng):
    for _ in range(100):
        rho = random_pure_state(rng, 2)
        p = rng.choice(P_GRID)
        for out in (apply_local_depolarizing(rho, p, 0), apply_global_depolarizing(rho, p)):
            m = out.matrix
            assert abs(np.trace(m) - 1.0) <= 1e-12
            assert np.max(np.abs(m - m.conj().T)) <= 1e-12
            assert np.linalg.eigvalsh(m).min() >= -1e-9
            assert purity(out) <= purity(rho) + 1e-12


def test_channel_parameter_ranges():
    rho = DensityMatrix.maximally_mixed(1)
    with pytest.raises(ValidationError):
        apply_local_depolarizing(rho, 0.8, 0)
    with pytest.raises(ValidationError):
        apply_local_depolarizing(rho, 0.1, 1)
    with pytest.raises(ValidationError):
        apply_global_depolarizing(rho, 1.5)


def test_global_channel_examples():
    rho = DensityMatrix(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(apply_global_depolarizing(rho, 0.0).matrix, rho.matrix)
    np.testing.assert_allclose(apply_global_depolarizing(rho, 1.0).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(apply_global_depolarizing(rho, 0.5).matrix,
                               0.5 * rho.matrix + 0.25 * np.eye(2))


def test_encode_with_noise_models(rng):
    config = CircuitConfig(2, 1)
    x = _features(rng, 1, 2)[0]
    none = NoiseSpec.noiseless(2, 1)
    np.testing.assert_allclose(encode_with_noise(x, config, none).matrix,
                               iqp_encode(x, config).matrix)
    full = NoiseSpec("local", 0.75, 2, 1)
    np.testing.assert_allclose(encode_with_noise(x, config, full).matrix, np.eye(4) / 4,
                               atol=1e-12)
    with pytest.raises(ValidationError):
        encode_with_noise(x, config, NoiseSpec("local", 0.1, 2, 2))


def test_per_layer_global_noise_equals_end_of_circuit(rng):
    config = CircuitConfig(2, 2)
    for x in _features(rng, 5, 2):
        for p in (0.1, 0.35, 0.8):
            layered = global_layers_circuit(x, config, p)
            single = encode_with_noise(x, config, NoiseSpec("global", p, 2, 2))
            np.testing.assert_allclose(layered.matrix, single.matrix, atol=1e-12)


def test_noise_spec_validation():
    with pytest.raises(ValidationError):
        NoiseSpec("local", 0.8, 2, 1)
    with pytest.raises(ValidationError):
        NoiseSpec("none", 0.1, 2, 1)
    with pytest.raises(ValidationError, match="Unknown noise model"):
        NoiseSpec("dephasing", 0.1, 2, 1)
    assert NoiseSpec("global", 0.5, 2, 2).end_of_circuit_p == pytest.approx(0.75)


def test_kernel_element_examples():
    zero = DensityMatrix(np.diag([1.0, 0.0]))
    one = DensityMatrix(np.diag([0.0, 1.0]))
    assert kernel_element(zero, one) == pytest.approx(0.0)
    assert kernel_element(zero, zero) == pytest.approx(1.0)
    mixed = DensityMatrix.maximally_mixed(1)
    assert kernel_element(mixed, mixed) == pytest.approx(0.5)
    with pytest.raises(ShapeError):
        kernel_element(zero, DensityMatrix.maximally_mixed(2))


def test_kernel_matrix_noiseless_unit_diagonal(rng):
    config = CircuitConfig(2, 2)
    k = kernel_matrix(_features(rng, 8, 2), config)
    np.testing.assert_allclose(np.diag(k.entries), 1.0, atol=1e-10)
    np.testing.assert_array_equal(k.entries, k.entries.T)


def test_kernel_matrix_fully_depolarised(rng):
    config = CircuitConfig(2, 1)
    k = kernel_matrix(_features(rng, 6, 2), config, NoiseSpec("local", 0.75, 2, 1))
    np.testing.assert_allclose(k.entries, 0.25, atol=1e-12)


def test_noisy_kernel_diagonal_is_purity(rng):
    config = CircuitConfig(2, 1)
    noise = NoiseSpec("local", 0.2, 2, 1)
    samples = _features(rng, 4, 2)
    k = kernel_matrix(samples, config, noise)
    for i, x in enumerate(samples):
        assert k.entries[i, i] == pytest.approx(purity(encode_with_noise(x, config, noise)),
                                                abs=1e-12)


@pytest.mark.parametrize("n_qubits", [1, 2, 3])
@pytest.mark.parametrize("n_layers", [1, 2])
def test_noisy_kernel_bound_holds_entrywise(rng, n_qubits, n_layers):
    config = CircuitConfig(n_qubits, n_layers)
    samples = _features(rng, 5, n_qubits)
    clean = kernel_matrix(samples, config).entries
    for p in P_GRID:
        noisy = kernel_matrix(samples, config, NoiseSpec("local", p, n_qubits, n_layers)).entries
        s = decay_factor(p, n_qubits, n_layers)
        assert np.all(noisy <= s * clean + (1 - s) + 1e-9)
        assert kernel_noise_bound(clean[0, 1], p, n_qubits, n_layers) >= noisy[0, 1] - 1e-9


def test_cross_kernel_matches_kernel_matrix_block(rng):
    config = CircuitConfig(2, 1)
    noise = NoiseSpec("local", 0.1, 2, 1)
    samples = _features(rng, 7, 2)
    full = kernel_matrix(samples, config, noise).entries
    cross = cross_kernel(samples[5:], samples[:5], config, noise)
    assert cross.shape == (2, 5)
    np.testing.assert_allclose(cross, full[5:, :5], atol=1e-14)


def test_quantum_kernel_dispatch_and_parallel(rng):
    qk = QuantumKernel(CircuitConfig(2, 1))
    samples = _features(rng, 9, 2)
    sequential = qk.kernel_matrix(samples, "local", 0.1).entries
    parallel = QuantumKernel(CircuitConfig(2, 1), parallel=True, n_processes=2)
    np.testing.assert_allclose(parallel.kernel_matrix(samples, "local", 0.1).entries,
                               sequential, rtol=0, atol=1e-14)
    with pytest.raises(ValidationError, match="Unknown noise model"):
        qk.kernel_matrix(samples, "amplitude", 0.1)


def test_kernel_matrix_validation_and_csv(tmp_path):
    with pytest.raises(InvariantViolation):
        KernelMatrix(np.array([[1.0, 0.2], [0.3, 1.0]])).validate()
    with pytest.raises(ShapeError):
        KernelMatrix(np.ones((2, 3)))
    k = KernelMatrix(np.array([[1.0, 0.1], [0.1, 1.0]]))
    path = k.to_csv(tmp_path / "kernel.csv")
    assert path.read_text().splitlines()[0] == "m=2"
    np.testing.assert_array_equal(KernelMatrix.from_csv(path).entries, k.entries)


def test_density_matrix_validation():
    with pytest.raises(InvariantViolation, match="trace"):
        validate_density_matrix(np.diag([1.0, 1.0]))
    with pytest.raises(InvariantViolation, match="Hermitian"):
        validate_density_matrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(InvariantViolation, match="positive"):
        validate_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(ShapeError):
        DensityMatrix(np.eye(3) / 3)


def test_pauli_algebra():
    for i in range(4):
        for j in range(4):
            phase, k = pauli_product(i, j)
            np.testing.assert_allclose(PAULIS[i] @ PAULIS[j], phase * PAULIS[k])
            eta = conjugation_sign(i, j)
            np.testing.assert_allclose(PAULIS[i] @ PAULIS[j] @ PAULIS[i], eta * PAULIS[j])
    assert pauli_product(1, 2) == (1j, 3)
    assert pauli_product(2, 1) == (-1j, 3)


def test_pauli_coefficients_reconstruct_state(rng):
    rho = random_pure_state(rng, 2)
    r = pauli_coefficients(rho)
    assert r[0] == pytest.approx(1.0)
    rebuilt = sum(r[4 * a + b] * pauli_string((a, b)) for a in range(4) for b in range(4)) / 4
    np.testing.assert_allclose(rebuilt, rho, atol=1e-12)


@pytest.mark.parametrize("n_qubits", [1, 2])
def test_exact_noisy_kernel_matches_kraus_simulation(rng, n_qubits):
    for _ in range(50):
        rho_i = random_pure_state(rng, n_qubits)
        rho_j = random_pure_state(rng, n_qubits)
        for p in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7):
            noisy_i, noisy_j = DensityMatrix(rho_i), DensityMatrix(rho_j)
            for q in range(n_qubits):
                noisy_i = apply_local_depolarizing(noisy_i, p, q)
                noisy_j = apply_local_depolarizing(noisy_j, p, q)
            expected = kernel_element(noisy_i, noisy_j)
            assert exact_noisy_kernel_element(rho_i, rho_j, p) == pytest.approx(expected, abs=1e-10)


def test_exact_noisy_kernel_limits(rng):
    config = CircuitConfig(3, 1)
    a, b = (iqp_encode(x, config) for x in _features(rng, 2, 3))
    assert exact_noisy_kernel_element(a, b, 0.0) == pytest.approx(kernel_element(a, b), abs=1e-12)
    assert exact_noisy_kernel_element(a, b, 0.75) == pytest.approx(1 / 8, abs=1e-12)
    big = DensityMatrix.maximally_mixed(4)
    with pytest.raises(UnsupportedSizeError):
        exact_noisy_kernel_element(big, big, 0.1)


def test_survival_probabilities():
    assert survival_probability(NoiseSpec("local", 0.0, 2, 1)) == 1.0
    assert survival_probability(NoiseSpec("global", 0.0, 2, 1)) == 1.0
    assert survival_probability(NoiseSpec("local", 0.1, 2, 1)) == pytest.approx(0.81)
    assert survival_probability(NoiseSpec("local", 0.1, 2, 2)) == pytest.approx(0.6561)
    assert survival_probability(NoiseSpec.noiseless(2, 1)) == 1.0


def test_equivalent_global_p_matches_survival():
    assert equivalent_global_p(0.0, 2, 1) == 0.0
    assert equivalent_global_p(0.1, 2, 1) == pytest.approx(0.19)
    for p_local in (0.05, 0.3, 0.75):
        p_end = equivalent_global_p(p_local, 2, 2)
        p_layer = per_layer_global_p(p_end, 2)
        local = survival_probability(NoiseSpec("local", p_local, 2, 2))
        glob = survival_probability(NoiseSpec("global", p_layer, 2, 2))
        assert glob == pytest.approx(local, abs=1e-12)
