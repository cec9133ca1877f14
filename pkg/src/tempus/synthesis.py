"""Synthesis of state-specific conjugation circuits.

Given a known state ``|psi> = sum_i |psi_i| e^{i phi_i} |i>`` every scheme here
emits a circuit ``U_psi`` with ``U_psi |psi> = |psi*>`` (up to a global phase):

* ``sparse``        one-hot register, one T(-2 phi_i) per component, no CNOTs;
* ``dense_ancilla`` n register qubits plus n-1 ancillas, nested Toffoli blocks;
* ``boolean``       n qubits, no ancillas, phases expanded in parity terms and
                    realised on CNOT ladders.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .statevector import CNOT, TXTX, Circuit, StateVector, T, Toffoli, X, run_circuit

SCHEMES = ("sparse", "dense_naive", "dense_ancilla", "boolean")
COST_SCHEMES = ("sparse", "dense_naive", "dense_nested", "boolean", "boolean_unoptimized")
TOFFOLI_CNOTS = 6
ZERO_AMPLITUDE = 1e-12


def wrap_phase(phi):
    """Map angles onto (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)


@dataclass(frozen=True)
class PhaseSpec:
    n_qubits: int
    phases: np.ndarray
    magnitudes: np.ndarray

    def __post_init__(self):
        phases = wrap_phase(self.phases).reshape(-1)
        mags = np.asarray(self.magnitudes, dtype=float).reshape(-1)
        dim = 2**self.n_qubits
        if phases.shape != (dim,) or mags.shape != (dim,):
            raise ValueError(f"phases and magnitudes must have length {dim}")
        if np.any(mags < 0):
            raise ValueError("magnitudes must be non-negative")
        if abs(float(np.sum(mags**2)) - 1) > 1e-10:
            raise ValueError("magnitudes are not normalized")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "magnitudes", mags)

    def state(self) -> StateVector:
        return StateVector(self.n_qubits, self.magnitudes * np.exp(1j * self.phases))


def extract_phases(state: StateVector) -> PhaseSpec:
    amps = state.amplitudes
    mags = np.abs(amps)
    phases = np.where(mags > ZERO_AMPLITUDE, np.angle(amps), 0.0)
    return PhaseSpec(state.n_qubits, phases, mags)


# -- parity expansion ---------------------------------------------------------

def walsh_hadamard(values) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform, ``out[s] = sum_i (-1)^{|s&i|} v[i]``."""
    a = np.array(values, dtype=float)
    n = a.shape[0]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1).reshape(-1)
        h *= 2
    return a


def subset_mask(qubits, n: int) -> int:
    """Bit mask of a qubit subset in the basis-index convention (qubit 0 = MSB)."""
    return sum(1 << (n - 1 - q) for q in qubits)


def mask_qubits(mask: int, n: int) -> tuple[int, ...]:
    return tuple(q for q in range(n) if mask >> (n - 1 - q) & 1)


def parity(mask: int, index) -> np.ndarray:
    """XOR of the bits of ``index`` selected by ``mask`` (vectorised over index)."""
    x = np.bitwise_and(np.asarray(index), mask)
    out = np.zeros_like(x)
    while np.any(x):
        out ^= x & 1
        x = x >> 1
    return out


@dataclass(frozen=True)
class ParityCoefficients:
    """``f(b) = coeffs[0] + sum_{s != 0} coeffs[s] * parity_s(b)``; ``s`` is a subset mask."""

    n_qubits: int
    coeffs: np.ndarray

    @property
    def constant(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, qubits) -> float:
        return float(self.coeffs[subset_mask(qubits, self.n_qubits)])

    def evaluate(self) -> np.ndarray:
        idx = np.arange(2**self.n_qubits)
        total = np.full(idx.shape, self.coeffs[0], dtype=float)
        for mask in range(1, 2**self.n_qubits):
            total += self.coeffs[mask] * parity(mask, idx)
        return total


def phase_to_parity(phases, n: int) -> ParityCoefficients:
    """Parity-basis expansion of the conjugating phase function ``-2 phi_b``.

    With ``(-1)^{s.b} = 1 - 2 parity_s(b)`` the Walsh spectrum ``F_s`` of the
    target gives ``coeff_s = -2 F_s`` for ``s != 0`` and constant ``sum_s F_s``.
    """
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.shape[0] != 2**n:
        raise ValueError(f"expected {2**n} phases, got {phases.shape[0]}")
    target = -2.0 * phases
    spectrum = walsh_hadamard(target) / 2**n
    coeffs = -2.0 * spectrum
    coeffs[0] = spectrum.sum()
    return ParityCoefficients(n, coeffs)


def and_parity_expansion(bits) -> float:
    """Right-hand side of ``b_0 & ... & b_{n-1} = 2^{1-n} sum_s (-1)^{|s|-1} XOR_s(b)``."""
    bits = [int(b) for b in bits]
    n = len(bits)
    total = 0
    for k in range(1, n + 1):
        for s in combinations(range(n), k):
            total += (-1) ** (k - 1) * (sum(bits[i] for i in s) % 2)
    return total / 2 ** (n - 1)


# -- synthesis ----------------------------------------------------------------

@dataclass
class SynthesisReport:
    circuit: Circuit
    n_cnot: int
    n_toffoli: int
    n_ancilla: int
    scheme: str

    @property
    def cnot_equivalent(self) -> int:
        return self.n_cnot + TOFFOLI_CNOTS * self.n_toffoli

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "n_cnot": self.n_cnot,
            "n_toffoli": self.n_toffoli,
            "n_ancilla": self.n_ancilla,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _report(circuit: Circuit, n_ancilla: int, scheme: str) -> SynthesisReport:
    return SynthesisReport(circuit, circuit.count("CNOT"), circuit.count("Toffoli"), n_ancilla, scheme)


def sparse_encode(state: StateVector) -> StateVector:
    """One-hot encoding: component i lives on |0..1_i..0> of a 2^n-qubit register."""
    n_sparse = 2**state.n_qubits
    amps = np.zeros(2**n_sparse, dtype=complex)
    for i, a in enumerate(state.amplitudes):
        amps[1 << (n_sparse - 1 - i)] = a
    return StateVector(n_sparse, amps)


def synth_sparse(spec: PhaseSpec) -> SynthesisReport:
    n_sparse = 2**spec.n_qubits
    circuit = Circuit(n_sparse, [T(i, -2 * phi) for i, phi in enumerate(spec.phases)])
    return _report(circuit, 0, "sparse")


def _cancel_adjacent_x(gates):
    out = []
    for g in gates:
        if out and g.kind == "X" and out[-1].kind == "X" and out[-1].qubits == g.qubits:
            out.pop()
        else:
            out.append(g)
    return out


def synth_dense_ancilla(spec: PhaseSpec) -> SynthesisReport:
    """Nested Toffoli blocks: ancilla c_m flags that bits b_0..b_m match a prefix.

    Register qubits are 0..n-1, ancilla c_m (m = 1..n-1) is qubit n+m-1. Each
    block that has matched m+1 bits checks the next bit with a Toffoli pair
    per value, so the whole circuit uses 4(2^n - 2) Toffolis.
    """
    n = spec.n_qubits
    if n < 2:
        raise ValueError("dense ancilla scheme needs n >= 2")
    anc = lambda m: n + m - 1  # noqa: E731
    gates = []

    def flipped(q, value, body):
        # X-conjugate q so that a control fires on the requested bit value
        pre = [X(q)] if value == 0 else []
        return pre + body + pre

    def block(m, prefix):
        # c_m holds [b_0..b_m == prefix]
        if m == n - 1:
            j = int("".join(map(str, prefix)), 2)
            gates.append(T(anc(m), -2 * spec.phases[j]))
            return
        k = m + 1
        for v in (0, 1):
            gates.extend(flipped(k, v, [Toffoli(anc(m), k, anc(m + 1))]))
            block(m + 1, prefix + [v])
            gates.extend(flipped(k, v, [Toffoli(anc(m), k, anc(m + 1))]))

    for v0 in (0, 1):
        for v1 in (0, 1):
            check = flipped(0, v0, flipped(1, v1, [Toffoli(0, 1, anc(1))]))
            gates.extend(check)
            block(1, [v0, v1])
            gates.extend(check)

    circuit = Circuit(2 * n - 1, _cancel_adjacent_x(gates))
    return _report(circuit, n - 1, "dense_ancilla")


def synth_dense_naive(spec: PhaseSpec) -> SynthesisReport:
    """One selective phase shift per component, each with its own Toffoli chain.

    Costs 2(n-1) Toffolis per component; same register layout as the nested scheme.
    """
    n = spec.n_qubits
    if n < 2:
        raise ValueError("dense schemes need n >= 2")
    gates = []
    for j, phi in enumerate(spec.phases):
        bits = format(j, f"0{n}b")
        flips = [X(q) for q, b in enumerate(bits) if b == "0"]
        chain = [Toffoli(0, 1, n)] + [Toffoli(n + m - 2, m, n + m - 1) for m in range(2, n)]
        gates += flips + chain + [T(2 * n - 2, -2 * phi)] + chain[::-1] + flips
    return _report(Circuit(2 * n - 1, _cancel_adjacent_x(gates)), n - 1, "dense_naive")


def parity_ladders(n: int):
    """Nested-string grouping of all parity terms with two or more qubits.

    Yields ``(string, new_prefixes)``: every string runs from a first qubit
    ``f`` to the last qubit ``n-1``; its ladder also serves every prefix of it
    not already served by an earlier ladder. Strings with the same first qubit
    are visited in lexicographic order.
    """
    done = set()
    for first in range(n - 1):
        middle = range(first + 1, n - 1)
        strings = sorted(
            (first, *mid, n - 1) for k in range(len(middle) + 1) for mid in combinations(middle, k)
        )
        for s in strings:
            fresh = [s[: j + 1] for j in range(1, len(s)) if s[: j + 1] not in done]
            done.update(fresh)
            yield s, fresh


def synth_boolean(spec: PhaseSpec) -> SynthesisReport:
    n = spec.n_qubits
    coeffs = phase_to_parity(spec.phases, n)
    gates = []
    for q in range(n):
        const = coeffs.constant if q == 0 else 0.0
        gates.append(TXTX(q, coeffs.coefficient((q,)) + const, const))
    for s, fresh in parity_ladders(n):
        fresh = set(fresh)
        ladder = [CNOT(s[j - 1], s[j]) for j in range(1, len(s))]
        for j, cx in enumerate(ladder, start=1):
            gates.append(cx)
            if s[: j + 1] in fresh:
                gates.append(TXTX(s[j], coeffs.coefficient(s[: j + 1]), 0.0))
        gates.extend(reversed(ladder))
    return _report(Circuit(n, gates), 0, "boolean")


SYNTHESIZERS = {
    "sparse": synth_sparse,
    "dense_naive": synth_dense_naive,
    "dense_ancilla": synth_dense_ancilla,
    "boolean": synth_boolean,
}


def synthesize(spec: PhaseSpec, scheme: str) -> SynthesisReport:
    try:
        return SYNTHESIZERS[scheme](spec)
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}") from None


def cnot_cost(scheme: str, n: int) -> int:
    """Closed-form CNOT(-equivalent) cost of conjugating an n-qubit state."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if scheme == "sparse":
        return 0
    if scheme == "dense_naive":
        return 12 * (n - 1) * 2**n
    if scheme in ("dense_nested", "dense_ancilla"):
        return TOFFOLI_CNOTS * 4 * (2**n - 2)
    if scheme == "boolean":
        return (n - 1) * 2 ** (n - 1)
    if scheme == "boolean_unoptimized":
        return 2**n * (n - 2) + 2
    raise ValueError(f"unknown scheme {scheme!r}; choose from {COST_SCHEMES}")


def conjugation_fidelity(report: SynthesisReport, state: StateVector) -> float:
    """|<psi*| U_psi |psi>|^2 evaluated on the register the scheme acts on."""
    if report.scheme == "sparse":
        start = sparse_encode(state)
        target = sparse_encode(state.conj())
    elif report.scheme in ("dense_naive", "dense_ancilla"):
        n_anc = report.n_ancilla
        amps = np.kron(state.amplitudes, np.eye(2**n_anc)[0])
        start = StateVector(state.n_qubits + n_anc, amps)
        target = StateVector(state.n_qubits + n_anc, amps.conj())
    else:
        start, target = state, state.conj()
    return target.fidelity(run_circuit(start, report.circuit))

