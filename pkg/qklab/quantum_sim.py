# qklab/quantum_sim.py

"""
Density-Matrix Simulation of Noisy IQP Feature Maps

This module prepares IQP-encoded quantum states as density matrices, applies
local (per-qubit) and global depolarising channels, and computes quantum
kernel matrices as Hilbert-Schmidt overlaps K(x_i, x_j) = Tr(rho_i rho_j).

@references
1. V. Havlicek et al., "Supervised learning with quantum-enhanced feature spaces", Nature 567, 209-212 (2019)
2. M. A. Nielsen and I. L. Chuang, "Quantum Computation and Quantum Information", Section 8.3.4 (depolarizing channel)
3. M. Schuld and N. Killoran, "Quantum machine learning in feature Hilbert spaces", PRL 122, 040504 (2019)

Functions:
    - iqp_encode: noiseless IQP state for one feature vector
    - apply_local_depolarizing / apply_global_depolarizing: single channel applications
    - encode_with_noise: L encoding layers with the selected noise model
    - kernel_element / kernel_matrix / cross_kernel: Hilbert-Schmidt kernels
    - exact_noisy_kernel_element: Pauli-expansion expression for one layer of local noise
    - survival_probability / equivalent_global_p / per_layer_global_p: noise-model matching
    - QuantumKernel: configured kernel builder with noise-model dispatch
"""

import itertools
import logging
import multiprocessing
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import networkx as nx
import numpy as np

from .exceptions import (InvariantViolation, ShapeError, UnsupportedSizeError,
                         ValidationError)
from .numerics import I2, PAULIS, X, Y, Z, kron_all

logger = logging.getLogger(__name__)

LOCAL_P_MAX = 0.75
NOISE_MODELS = ("none", "local", "global")
ENTANGLEMENTS = ("linear", "circular")
EXACT_KERNEL_MAX_QUBITS = 3


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A 2^N x 2^N Hermitian, unit-trace, positive semidefinite matrix."""
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"Density matrix must be square, got {m.shape}")
        n = m.shape[0].bit_length() - 1
        if m.shape[0] != 2 ** n or n < 1:
            raise ShapeError(f"Density matrix dimension must be 2^N with N >= 1, got {m.shape[0]}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self):
        return self.matrix.shape[0].bit_length() - 1

    @property
    def dim(self):
        return self.matrix.shape[0]

    def purity(self):
        return purity(self)

    def validate(self, tol=1e-10, psd_tol=1e-9):
        """Raise InvariantViolation unless the matrix is a valid state."""
        validate_density_matrix(self, tol=tol, psd_tol=psd_tol)
        return self

    @classmethod
    def maximally_mixed(cls, n_qubits):
        d = 2 ** n_qubits
        return cls(np.eye(d, dtype=complex) / d)

    @classmethod
    def from_statevector(cls, psi):
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class CircuitConfig:
    """
    IQP circuit shape.

    Parameters:
    n_qubits (int): Number of qubits N; also the required feature dimension.
    n_layers (int): Number of repeated encoding layers L.
    encoding (str): Encoding tag, only "IQP" is supported.
    entanglement (str): ZZ coupling topology, "linear" (nearest neighbour) or "circular".
    """
    n_qubits: int
    n_layers: int = 1
    encoding: str = "IQP"
    entanglement: str = "linear"

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.n_layers < 1:
            raise ValidationError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.encoding.upper() != "IQP":
            raise ValidationError(f"Unknown encoding: {self.encoding}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ValidationError(f"Unknown entanglement: {self.entanglement}")
        if self.entanglement == "circular" and self.n_qubits < 3:
            raise ValidationError("circular entanglement needs n_qubits >= 3")

    @property
    def dim(self):
        return 2 ** self.n_qubits

    def coupling_graph(self):
        """Qubit graph whose edges carry the ZZ entangling gates."""
        if self.entanglement == "circular":
            return nx.cycle_graph(self.n_qubits)
        return nx.path_graph(self.n_qubits)

    def entangling_pairs(self):
        return sorted(tuple(sorted(e)) for e in self.coupling_graph().edges())


@dataclass(frozen=True)
class NoiseSpec:
    """
    Depolarising noise model.

    ``p`` is the per-qubit probability p_L in [0, 3/4] for the local model and
    the per-layer probability p_G in [0, 1] for the global model. The global
    model is simulated as one end-of-circuit channel with
    p_GE = 1 - (1 - p_G)^L.
    """
    model: str
    p: float
    n_qubits: int
    n_layers: int = 1

    def __post_init__(self):
        model = str(self.model).lower()
        object.__setattr__(self, "model", model)
        if model == "none":
            if self.p != 0.0:
                raise ValidationError(f"Noise model 'none' takes p = 0, got {self.p}")
        elif model == "local":
            _check_probability(self.p, LOCAL_P_MAX, "local p")
        elif model == "global":
            _check_probability(self.p, 1.0, "global p")
        else:
            raise ValidationError(f"Unknown noise model: {self.model}")
        if self.n_qubits < 1 or self.n_layers < 1:
            raise ValidationError("NoiseSpec needs n_qubits >= 1 and n_layers >= 1")

    @classmethod
    def noiseless(cls, n_qubits, n_layers=1):
        return cls("none", 0.0, n_qubits, n_layers)

    @classmethod
    def for_circuit(cls, config, model, p=0.0):
        return cls(model, float(p), config.n_qubits, config.n_layers)

    @property
    def end_of_circuit_p(self):
        """p_GE of the global model (0 for the other models)."""
        if self.model != "global":
            return 0.0
        return 1.0 - (1.0 - self.p) ** self.n_layers


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Real symmetric Gram matrix of Hilbert-Schmidt overlaps."""
    entries: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.entries, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ShapeError(f"Kernel matrix must be square, got {k.shape}")
        object.__setattr__(self, "entries", k)

    @property
    def size(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def validate(self, tol=1e-10, range_tol=1e-9):
        k = self.entries
        asym = np.max(np.abs(k - k.T), initial=0.0)
        if asym > tol:
            raise InvariantViolation(f"Kernel matrix not symmetric (max asymmetry {asym:.3e})")
        if k.size and (k.min() < -range_tol or k.max() > 1.0 + range_tol):
            raise InvariantViolation(
                f"Kernel entries outside [0, 1]: min {k.min():.3e}, max {k.max():.3e}")
        return self

    def to_csv(self, path):
        """Write ``m=<size>`` followed by row-major entries with 17 significant digits."""
        path = Path(path)
        lines = [f"m={self.size}"]
        lines += [",".join(f"{v:.17g}" for v in row) for row in self.entries]
        path.write_text("\n".join(lines) + "\n")
        return path

    @classmethod
    def from_csv(cls, path):
        text = Path(path).read_text().strip().splitlines()
        if not text or not text[0].startswith("m="):
            raise ValidationError(f"{path}: missing 'm=<size>' header")
        m = int(text[0][2:])
        rows = [[float(v) for v in line.split(",")] for line in text[1:]]
        k = np.array(rows, dtype=float)
        if k.shape != (m, m):
            raise ShapeError(f"{path}: header says m={m} but found shape {k.shape}")
        return cls(k)


def _check_probability(p, upper, name):
    if not (0.0 <= p <= upper):
        raise ValidationError(f"{name} must lie in [0, {upper}], got {p}")


def _as_state_array(rho):
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return DensityMatrix(rho).matrix


def purity(rho):
    m = _as_state_array(rho)
    return float(np.real(np.trace(m @ m)))


def validate_density_matrix(rho, tol=1e-10, psd_tol=1e-9):
    """
    Check Hermiticity, unit trace, positivity and the purity range
    1/2^N <= Tr(rho^2) <= 1.

    Raises:
    InvariantViolation: naming the first property that fails.
    """
    m = _as_state_array(rho)
    d = m.shape[0]
    herm = np.max(np.abs(m - m.conj().T))
    if herm > tol:
        raise InvariantViolation(f"State not Hermitian (max |rho - rho^dag| = {herm:.3e})")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol:
        raise InvariantViolation(f"State trace is {tr}, expected 1")
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())
    if min_eig < -psd_tol:
        raise InvariantViolation(f"State not positive semidefinite (min eigenvalue {min_eig:.3e})")
    pur = float(np.real(np.trace(m @ m)))
    if pur < 1.0 / d - psd_tol or pur > 1.0 + psd_tol:
        raise InvariantViolation(f"Purity {pur} outside [1/{d}, 1]")


# Pauli algebra

def pauli_string(indices):
    """sigma_{mu_1} (x) ... (x) sigma_{mu_N} for indices in {0, 1, 2, 3}."""
    return kron_all(PAULIS[i] for i in indices)


def pauli_product(i, j):
    """
    sigma_i sigma_j = phase * sigma_k.

    Returns:
    tuple[complex, int]: (phase, k). For i, j in {1, 2, 3}:
    delta_ij I + i epsilon_ijk sigma_k.
    """
    if i == 0:
        return 1.0 + 0j, j
    if j == 0:
        return 1.0 + 0j, i
    if i == j:
        return 1.0 + 0j, 0
    k = 6 - i - j
    # (1,2,3) and its cyclic shifts are even permutations
    epsilon = 1 if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1
    return 1j * epsilon, k


def conjugation_sign(i, j):
    """eta_{i,j} such that sigma_i sigma_j sigma_i = eta_{i,j} sigma_j."""
    return 1 if (i == 0 or j == 0 or i == j) else -1


def pauli_coefficients(rho):
    """
    r_mu = Tr(rho sigma_mu) over all 4^N Pauli strings in lexicographic order
    (mu_1 most significant), so rho = 2^-N sum_mu r_mu sigma_mu.
    """
    m = _as_state_array(rho)
    n = m.shape[0].bit_length() - 1
    coeffs = np.empty(4 ** n, dtype=float)
    for idx, mu in enumerate(itertools.product(range(4), repeat=n)):
        coeffs[idx] = float(np.real(np.trace(m @ pauli_string(mu))))
    return coeffs


# Channels

def embed_single_qubit(op, qubit, n_qubits):
    """Lift a 2x2 operator to act on ``qubit`` of an N-qubit register (qubit 0 most significant)."""
    if not 0 <= qubit < n_qubits:
        raise ValidationError(f"qubit index {qubit} out of range for {n_qubits} qubits")
    factors = [I2] * n_qubits
    factors[qubit] = op
    return kron_all(factors)


def local_kraus_operators(p):
    """K_0 = sqrt(1-p) I, K_{1,2,3} = sqrt(p/3) {X, Y, Z}."""
    _check_probability(p, LOCAL_P_MAX, "local p")
    return (np.sqrt(1.0 - p) * I2, np.sqrt(p / 3.0) * X,
            np.sqrt(p / 3.0) * Y, np.sqrt(p / 3.0) * Z)


def _local_channel(rhos, p, qubit, n_qubits):
    # rhos: (..., d, d)
    out = np.zeros_like(rhos)
    for k in local_kraus_operators(p):
        op = embed_single_qubit(k, qubit, n_qubits)
        out = out + op @ rhos @ op.conj().T
    return out


def _local_layer(rhos, p, n_qubits):
    for q in range(n_qubits):
        rhos = _local_channel(rhos, p, q, n_qubits)
    return rhos


def _global_channel(rhos, p):
    d = rhos.shape[-1]
    return (1.0 - p) * rhos + p * np.eye(d, dtype=complex) / d


def apply_local_depolarizing(rho, p, qubit):
    """
    Single-qubit depolarising channel on ``qubit`` in Kraus form,
    (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on that qubit.
    """
    m = _as_state_array(rho)
    n = m.shape[0].bit_length() - 1
    return DensityMatrix(_local_channel(m, p, qubit, n))


def apply_global_depolarizing(rho, p):
    """(1-p) rho + p I / 2^N."""
    _check_probability(p, 1.0, "global p")
    return DensityMatrix(_global_channel(_as_state_array(rho), p))


# IQP encoding

def _z_signs(n_qubits):
    # (d, N): eigenvalue of Z_k on computational basis state b
    d = 2 ** n_qubits
    bits = (np.arange(d)[:, None] >> (n_qubits - 1 - np.arange(n_qubits))[None, :]) & 1
    return 1.0 - 2.0 * bits


def _hadamard_all(n_qubits):
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
    return kron_all([h] * n_qubits)


def _check_samples(samples, config):
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[None, :]
    if samples.ndim != 2 or samples.shape[1] != config.n_qubits:
        raise ValidationError(
            f"Feature vectors must have length n_qubits={config.n_qubits}, got shape {samples.shape}")
    if not np.all(np.isfinite(samples)):
        raise ValidationError("Feature vectors must be finite")
    return samples


def layer_unitaries(samples, config):
    """
    One IQP layer per sample: Hadamard on every qubit, R_z(x_k) on qubit k,
    then ZZ(x_a x_b) on every coupling edge (a, b). R_z and ZZ are diagonal,
    so the layer is diag(phases) @ H^(x)N.

    Returns:
    np.ndarray: (m, 2^N, 2^N) unitaries.
    """
    samples = _check_samples(samples, config)
    z = _z_signs(config.n_qubits)
    angles = samples @ z.T
    pairs = config.entangling_pairs()
    if pairs:
        a, b = np.array(pairs).T
        angles = angles + (samples[:, a] * samples[:, b]) @ (z[:, a] * z[:, b]).T
    diag = np.exp(-0.5j * angles)
    return diag[:, :, None] * _hadamard_all(config.n_qubits)[None, :, :]


def encode_batch(samples, config, noise=None):
    """
    Density matrices for a batch of feature vectors.

    Local noise: after each of the L layers the single-qubit channel acts on
    every qubit. Global noise: one end-of-circuit channel at p_GE.

    Returns:
    np.ndarray: (m, 2^N, 2^N) complex array.
    """
    if noise is None:
        noise = NoiseSpec.noiseless(config.n_qubits, config.n_layers)
    if noise.n_qubits != config.n_qubits or noise.n_layers != config.n_layers:
        raise ValidationError(
            f"NoiseSpec (N={noise.n_qubits}, L={noise.n_layers}) does not match "
            f"circuit (N={config.n_qubits}, L={config.n_layers})")
    units = layer_unitaries(samples, config)
    m, d = units.shape[0], config.dim
    rhos = np.zeros((m, d, d), dtype=complex)
    rhos[:, 0, 0] = 1.0
    units_dag = np.conj(np.swapaxes(units, -1, -2))
    for _ in range(config.n_layers):
        rhos = units @ rhos @ units_dag
        if noise.model == "local" and noise.p > 0.0:
            rhos = _local_layer(rhos, noise.p, config.n_qubits)
    if noise.model == "global" and noise.p > 0.0:
        rhos = _global_channel(rhos, noise.end_of_circuit_p)
    return rhos


def iqp_encode(x, config):
    """Noiseless IQP state of a single feature vector of length N."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValidationError(f"Expected a single feature vector, got shape {x.shape}")
    return DensityMatrix(encode_batch(x, config)[0])


def encode_with_noise(x, config, noise):
    """IQP state of one feature vector with the noise model of ``noise``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValidationError(f"Expected a single feature vector, got shape {x.shape}")
    return DensityMatrix(encode_batch(x, config, noise)[0])


def global_layers_circuit(x, config, p_per_layer):
    """Global channel with ``p_per_layer`` after every encoding layer."""
    _check_probability(p_per_layer, 1.0, "global p")
    units = layer_unitaries(x, config)
    u, u_dag = units[0], units[0].conj().T
    rho = np.zeros((config.dim, config.dim), dtype=complex)
    rho[0, 0] = 1.0
    for _ in range(config.n_layers):
        rho = _global_channel(u @ rho @ u_dag, p_per_layer)
    return DensityMatrix(rho)


# Kernels

def kernel_element(rho_i, rho_j):
    """K = Re Tr(rho_i rho_j); the imaginary part must vanish."""
    a, b = _as_state_array(rho_i), _as_state_array(rho_j)
    if a.shape != b.shape:
        raise ShapeError(f"States have different dimensions: {a.shape} vs {b.shape}")
    value = np.trace(a @ b)
    if abs(value.imag) > 1e-10:
        raise InvariantViolation(f"Tr(rho_i rho_j) has imaginary part {value.imag:.3e}")
    return float(value.real)


def _overlaps(rhos_a, rhos_b):
    # Tr(A B) = sum_ij A_ij conj(B_ij) for Hermitian B
    va = rhos_a.reshape(rhos_a.shape[0], -1)
    vb = rhos_b.reshape(rhos_b.shape[0], -1)
    k = va @ vb.conj().T
    imag = np.max(np.abs(k.imag), initial=0.0)
    if imag > 1e-10:
        raise InvariantViolation(f"Kernel has imaginary part {imag:.3e}")
    return k.real


def _encode_chunk(config, noise, chunk):
    """
    Encode one chunk of samples.
    Helper function for parallel execution in encode_states.
    """
    return encode_batch(chunk, config, noise)


def encode_states(samples, config, noise=None, parallel=False, n_processes=None):
    """
    Encode all samples, optionally splitting the batch over a process pool.

    Parameters:
    -----------
    samples : array-like, shape (m, N)
    config : CircuitConfig
    noise : NoiseSpec, optional (default: noiseless)
    parallel : bool, optional
        Whether to use a multiprocessing pool (default: False; for N <= 3 the
        process start-up cost usually dominates below a few thousand samples)
    n_processes : int, optional
        Pool size (default: None, which uses all available cores)

    Returns:
    --------
    np.ndarray
        (m, 2^N, 2^N) density matrices, identical for either execution mode
    """
    samples = _check_samples(samples, config)
    if not parallel or samples.shape[0] < 2:
        return encode_batch(samples, config, noise)

    if n_processes is None:
        n_processes = multiprocessing.cpu_count()
    chunks = [c for c in np.array_split(samples, min(n_processes, samples.shape[0])) if len(c)]
    with multiprocessing.Pool(processes=n_processes) as pool:
        results = pool.map(partial(_encode_chunk, config, noise), chunks)
    return np.concatenate(results, axis=0)


def kernel_matrix(samples, config, noise=None, parallel=False, n_processes=None):
    """
    Gram matrix K_ij = Tr(rho(x_i) rho(x_j)) of the (noisy) encoded samples.

    The upper triangle is computed and mirrored, so the result is exactly
    symmetric.

    Returns:
    KernelMatrix
    """
    rhos = encode_states(samples, config, noise, parallel=parallel, n_processes=n_processes)
    k = _overlaps(rhos, rhos)
    upper = np.triu(k)
    k = upper + np.triu(k, 1).T
    return KernelMatrix(k).validate()


def cross_kernel(test_samples, train_samples, config, noise=None, parallel=False, n_processes=None):
    """Rectangular kernel, rows = test samples, columns = training samples."""
    test = encode_states(test_samples, config, noise, parallel=parallel, n_processes=n_processes)
    train = encode_states(train_samples, config, noise, parallel=parallel, n_processes=n_processes)
    return _overlaps(test, train)


def exact_noisy_kernel_element(rho_i, rho_j, p):
    """
    Kernel of two states after one layer of local depolarising noise, from
    their Pauli expansions.

    With r_mu = Tr(rho sigma_mu), c = (1-p, p/3, p/3, p/3) and the conjugation
    signs eta, each Kraus pair (m, n) scales the Pauli component mu by
    prod_k c_{m_k} c_{n_k} eta_{m_k,mu_k} eta_{n_k,mu_k}. Separating the
    m = n = 0 term gives

        K~ = (1-p)^{2N} K + 2^-N sum_{(m,n) != (0,0)} sum_mu r_mu^(i) r_mu^(j) prod_k (...)

    The sum over Kraus multi-indices is evaluated exactly through its
    per-qubit factorisation. ``rho_i`` and ``rho_j`` are the noiseless states.
    """
    a, b = _as_state_array(rho_i), _as_state_array(rho_j)
    if a.shape != b.shape:
        raise ShapeError(f"States have different dimensions: {a.shape} vs {b.shape}")
    n = a.shape[0].bit_length() - 1
    if n > EXACT_KERNEL_MAX_QUBITS:
        raise UnsupportedSizeError(
            f"Pauli expansion limited to N <= {EXACT_KERNEL_MAX_QUBITS}, got N = {n}")
    _check_probability(p, LOCAL_P_MAX, "local p")

    c = np.array([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
    eta = np.array([[conjugation_sign(i, j) for j in range(4)] for i in range(4)], dtype=float)
    # factors[m, mu] = prod_k c_{m_k} eta_{m_k, mu_k}
    factors = kron_all([c[:, None] * eta] * n).real
    column_sums = factors.sum(axis=0)
    identity_term = factors[0, :]
    noisy_weight = column_sums ** 2 - identity_term ** 2

    r_i = pauli_coefficients(a)
    r_j = pauli_coefficients(b)
    clean = float(np.dot(r_i, r_j)) / 2 ** n
    correction = float(np.dot(r_i * r_j, noisy_weight)) / 2 ** n
    return (1.0 - p) ** (2 * n) * clean + correction


# Survival probabilities

def survival_probability(noise):
    """Probability the whole register passes every channel untouched."""
    if noise.model == "global":
        return (1.0 - noise.p) ** noise.n_layers
    if noise.model == "local":
        return (1.0 - noise.p) ** (noise.n_qubits * noise.n_layers)
    return 1.0


def equivalent_global_p(p_local, n_qubits, n_layers=1):
    """
    End-of-circuit global probability with the same survival probability as
    local noise p_local on N qubits over L layers: 1 - (1 - p_local)^(N L).
    """
    _check_probability(p_local, LOCAL_P_MAX, "local p")
    return 1.0 - (1.0 - p_local) ** (n_qubits * n_layers)


def per_layer_global_p(p_end, n_layers):
    """Per-layer p_G whose L-fold composition equals one channel at ``p_end``."""
    _check_probability(p_end, 1.0, "global p")
    return 1.0 - (1.0 - p_end) ** (1.0 / n_layers)


class QuantumKernel:
    def __init__(self, config, parallel=False, n_processes=None):
        """
        Kernel builder for a fixed circuit.
        :param config: CircuitConfig
        :param parallel: encode states in a multiprocessing pool
        :param n_processes: pool size (None uses all cores)
        """
        self.config = config
        self.parallel = parallel
        self.n_processes = n_processes

    def noise(self, model='none', p=0.0):
        """
        Build the NoiseSpec for this circuit.

        Parameters:
        -----------
        model : str
            Noise model code ('none', 'local', 'global')
        p : float
            Local per-qubit probability or global per-layer probability
        """
        model = model.lower()
        if model == 'none':
            return NoiseSpec.noiseless(self.config.n_qubits, self.config.n_layers)
        elif model == 'local':
            return NoiseSpec.for_circuit(self.config, 'local', p)
        elif model == 'global':
            return NoiseSpec.for_circuit(self.config, 'global', p)
        else:
            raise ValidationError(f"Unknown noise model: {model}")

    def states(self, samples, model='none', p=0.0):
        return encode_states(samples, self.config, self.noise(model, p),
                             parallel=self.parallel, n_processes=self.n_processes)

    def kernel_matrix(self, samples, model='none', p=0.0):
        return kernel_matrix(samples, self.config, self.noise(model, p),
                             parallel=self.parallel, n_processes=self.n_processes)

    def cross_kernel(self, test_samples, train_samples, model='none', p=0.0):
        return cross_kernel(test_samples, train_samples, self.config, self.noise(model, p),
                            parallel=self.parallel, n_processes=self.n_processes)
