import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(n, qubits, matrix):
    """Dense oracle: permute basis indices by hand, no tensordot."""
    dim = 2**n
    k = len(qubits)
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = sum(bits[q] << (k - 1 - j) for j, q in enumerate(qubits))
        for sub_out in range(2**k):
            amp = matrix[sub_out, sub_in]
            if amp == 0:
                continue
            out_bits = list(bits)
            for j, q in enumerate(qubits):
                out_bits[q] = (sub_out >> (k - 1 - j)) & 1
            row = sum(b << (n - 1 - q) for q, b in enumerate(out_bits))
            u[row, col] += amp
    return u


def equal_up_to_phase(a, b, tol=1e-9):
    a, b = np.asarray(a), np.asarray(b)
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < tol:
        return np.max(np.abs(a)) < tol
    phase = a[idx] / b[idx]
    return abs(abs(phase) - 1) < tol and np.max(np.abs(a - phase * b)) < tol


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


PAULI_1Q = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]
PAULI_2Q = [np.kron(a, b) for a in PAULI_1Q for b in PAULI_1Q]
TOFFOLI_CNOT_PAIRS = [(1, 2), (0, 2), (1, 2), (0, 2), (0, 1), (0, 1)]


def exact_zero_probability(circuit, noise, qubit_map):
    """Density-matrix propagation of the gate-failure and readout channels.

    Each CNOT slot fails with its rate and then applies one of the 16 two-qubit
    Paulis uniformly; readout flips act independently per qubit.
    """
    n = circuit.n_qubits
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    for g in circuit.gates:
        u = embed(n, g.qubits, g.matrix())
        rho = u @ rho @ u.conj().T
        pairs = {"CNOT": [(0, 1)], "SWAP": [(0, 1)] * 3, "Toffoli": TOFFOLI_CNOT_PAIRS}.get(g.kind, [])
        for a, b in pairs:
            qa, qb = g.qubits[a], g.qubits[b]
            p = noise.gate_error(qubit_map[qa], qubit_map[qb])
            twirl = sum(embed(n, (qa, qb), P) @ rho @ embed(n, (qa, qb), P).conj().T for P in PAULI_2Q) / 16
            rho = (1 - p) * rho + p * twirl
    probs = np.real(np.diag(rho)).copy()
    for q in range(n):
        e = noise.readout_error(qubit_map[q])
        flipped = np.array([probs[i ^ (1 << (n - 1 - q))] for i in range(2**n)])
        probs = (1 - e) * probs + e * flipped
    return float(probs[0])


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(module.RESULTS, key=lambda c: int(c[1:])):
        terminalreporter.write_line(module.RESULTS[cid][1])
