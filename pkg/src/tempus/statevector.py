"""Dense state-vector simulation over a small qubit register.

Basis convention: qubit 0 is the most significant bit, so basis index
``i = sum_k b_k 2**(n-1-k)`` and bit strings read ``b_0 b_1 ... b_{n-1}``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-10
MAX_UNITARY_QUBITS = 12

# kind -> (arity, number of angle parameters)
GATE_SIGNATURES = {
    "X": (1, 0),
    "T": (1, 1),
    "R": (1, 1),
    "U3": (1, 3),
    "TXTX": (1, 2),
    "CNOT": (2, 0),
    "SWAP": (2, 0),
    "Toffoli": (3, 0),
}


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for every stochastic routine in the package."""
    return np.random.Generator(np.random.Philox(int(seed)))


def t_matrix(alpha: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * alpha)]], dtype=complex)


def r_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def u3_matrix(theta: float, alpha: float, beta: float) -> np.ndarray:
    """T(alpha) . R(theta) . T(beta)."""
    return t_matrix(alpha) @ r_matrix(theta) @ t_matrix(beta)


X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)


def txtx_matrix(phi: float, phi_bar: float) -> np.ndarray:
    """T(phi) X T(phi_bar) X, i.e. diag(e^{i phi_bar}, e^{i phi})."""
    return t_matrix(phi) @ X_MATRIX @ t_matrix(phi_bar) @ X_MATRIX


def _permutation_matrix(n: int, fn) -> np.ndarray:
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        m[fn(i), i] = 1
    return m


CNOT_MATRIX = _permutation_matrix(2, lambda i: i ^ 1 if i & 2 else i)
SWAP_MATRIX = _permutation_matrix(2, lambda i: ((i & 1) << 1) | (i >> 1))
TOFFOLI_MATRIX = _permutation_matrix(3, lambda i: i ^ 1 if (i & 6) == 6 else i)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_SIGNATURES:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity, nparams = GATE_SIGNATURES[self.kind]
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if len(self.params) != nparams:
            raise ValueError(f"{self.kind} takes {nparams} angle(s), got {self.params}")
        if len(set(self.qubits)) != arity:
            raise ValueError(f"repeated qubit index in {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError(f"non-finite angle in {self.kind}{self.params}")

    def matrix(self) -> np.ndarray:
        """Local unitary; the first listed qubit is the most significant."""
        p = self.params
        if self.kind == "X":
            return X_MATRIX
        if self.kind == "T":
            return t_matrix(*p)
        if self.kind == "R":
            return r_matrix(*p)
        if self.kind == "U3":
            return u3_matrix(*p)
        if self.kind == "TXTX":
            return txtx_matrix(*p)
        if self.kind == "CNOT":
            return CNOT_MATRIX
        if self.kind == "SWAP":
            return SWAP_MATRIX
        return TOFFOLI_MATRIX

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) >= 2

    def remap(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.params)


# Short constructors, qubits first.
def X(q):
    return Gate("X", (q,))


def T(q, alpha):
    return Gate("T", (q,), (alpha,))


def R(q, theta):
    return Gate("R", (q,), (theta,))


def U3(q, theta, alpha, beta):
    return Gate("U3", (q,), (theta, alpha, beta))


def TXTX(q, phi, phi_bar):
    return Gate("TXTX", (q,), (phi, phi_bar))


def CNOT(control, target):
    return Gate("CNOT", (control, target))


def SWAP(a, b):
    return Gate("SWAP", (a, b))


def Toffoli(c1, c2, target):
    return Gate("Toffoli", (c1, c2, target))


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate):
        if max(gate.qubits) >= self.n_qubits:
            raise IndexError(f"{gate} out of range for {self.n_qubits} qubits")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different width")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def remap(self, mapping, n_qubits: int | None = None) -> "Circuit":
        return Circuit(n_qubits or self.n_qubits, [g.remap(mapping) for g in self.gates])

    def widen(self, n_qubits: int, offset: int = 0) -> "Circuit":
        """Embed into a larger register, shifting qubit indices by ``offset``."""
        return Circuit(n_qubits, [g.remap({q: q + offset for q in g.qubits}) for g in self.gates])


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n_qubits:
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got {amps.shape[0]}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        if not 0 <= index < 2**n_qubits:
            raise IndexError(f"basis index {index} out of range")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1
        return cls(n_qubits, amps)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        return cls.basis(len(bits), int(bits, 2))

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(len(amps))))
        if 2**n != len(amps):
            raise ValueError("amplitude count is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
        return cls(n_qubits, v / np.linalg.norm(v))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def conj(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.conj())

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2, insensitive to global phase."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass
class Histogram:
    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("histogram counts do not sum to shots")

    def probability(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots

    def to_csv(self) -> str:
        lines = ["state,count,probability"]
        for bits in sorted(self.counts):
            c = self.counts[bits]
            lines.append(f"{bits},{c},{c / self.shots:.6f}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_outcomes(cls, outcomes, n_qubits: int) -> "Histogram":
        tally = Counter(int(i) for i in outcomes)
        counts = {format(i, f"0{n_qubits}b"): c for i, c in sorted(tally.items())}
        return cls(counts, int(sum(tally.values())))


def apply_matrix(amplitudes: np.ndarray, n_qubits: int, matrix: np.ndarray, qubits) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the listed qubits of a raw amplitude array."""
    k = len(qubits)
    psi = amplitudes.reshape((2,) * n_qubits)
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    out = np.moveaxis(out, list(range(k)), list(qubits))
    return out.reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    if max(gate.qubits) >= state.n_qubits:
        raise IndexError(f"{gate} out of range for {state.n_qubits} qubits")
    amps = apply_matrix(state.amplitudes, state.n_qubits, gate.matrix(), gate.qubits)
    return StateVector(state.n_qubits, amps)


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    amps = state.amplitudes
    for gate in circuit.gates:
        amps = apply_matrix(amps, state.n_qubits, gate.matrix(), gate.qubits)
    return StateVector(state.n_qubits, amps)


def circuit_to_unitary(circuit: Circuit) -> np.ndarray:
    """Column i is the circuit applied to basis state |i>."""
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise ValueError(f"refusing to build a unitary on {n} > {MAX_UNITARY_QUBITS} qubits")
    dim = 2**n
    # Columns are propagated together by treating them as an extra trailing axis.
    u = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for gate in circuit.gates:
        k = len(gate.qubits)
        op = gate.matrix().reshape((2,) * (2 * k))
        u = np.tensordot(op, u, axes=(list(range(k, 2 * k)), list(gate.qubits)))
        u = np.moveaxis(u, list(range(k)), list(gate.qubits))
    return u.reshape(dim, dim)


def sample(state: StateVector, shots: int, seed: int = 0) -> Histogram:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = make_rng(seed)
    p = state.probabilities
    counts = rng.multinomial(shots, p / p.sum())
    return Histogram(
        {format(i, f"0{state.n_qubits}b"): int(c) for i, c in enumerate(counts) if c},
        shots,
    )
