"""Particle scattering on a two-level impurity (TLI) and its time reversal.

Register layout: qubit 0 is the impurity, qubits 1 (and 2) are the particles,
whose basis states |0>, |1> stand for the left and right channels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .statevector import (
    CNOT,
    U3,
    Circuit,
    Histogram,
    StateVector,
    T,
    run_circuit,
    sample,
    u3_matrix,
)
from .synthesis import SynthesisReport, extract_phases, synth_boolean, wrap_phase

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

S0_DEFAULT = np.array([[1 / 2, math.sqrt(3) / 2], [math.sqrt(3) / 2, -1 / 2]], dtype=complex)
S1_DEFAULT = np.array(
    [
        [math.sqrt(3) / 2, np.exp(1j * math.pi / 3) / 2],
        [np.exp(1j * math.pi / 3) / 2, -math.sqrt(3) / 2 * np.exp(2j * math.pi / 3)],
    ]
)

OMEGA_TAU_DEFAULT = math.pi / 6
ALPHA_GRID = (math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2)

# impurity on hardware line q2, particles on q1 (and q0)
HARDWARE_LINES = {"2bit": {0: 2, 1: 1}, "3bit": {0: 2, 1: 1, 2: 0}}
MODELS = ("2bit", "3bit")


def _check_symmetric_unitary(name, m, tol=1e-10):
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2")
    if np.max(np.abs(m - m.T)) >= tol:
        raise ValueError(f"{name} is not symmetric")
    if np.max(np.abs(m.conj().T @ m - np.eye(2))) >= tol:
        raise ValueError(f"{name} is not unitary")
    return m


@dataclass(frozen=True)
class TliParams:
    omega_tau: float = OMEGA_TAU_DEFAULT
    alpha: float = math.pi / 6
    s0: np.ndarray = field(default_factory=lambda: S0_DEFAULT.copy())
    s1: np.ndarray = field(default_factory=lambda: S1_DEFAULT.copy())

    def __post_init__(self):
        if not (math.isfinite(self.omega_tau) and math.isfinite(self.alpha)):
            raise ValueError("omega_tau and alpha must be finite")
        object.__setattr__(self, "s0", _check_symmetric_unitary("s0", self.s0))
        object.__setattr__(self, "s1", _check_symmetric_unitary("s1", self.s1))

    @classmethod
    def from_dict(cls, data: dict) -> "TliParams":
        """``{omega_tau, alpha, s0: {re, im}, s1: {re, im}}``; omitted keys take defaults."""
        unknown = set(data) - {"omega_tau", "alpha", "s0", "s1"}
        if unknown:
            raise ValueError(f"unknown TliParams keys: {sorted(unknown)}")
        kw = {}
        for key in ("omega_tau", "alpha"):
            if key in data:
                kw[key] = float(data[key])
        for key in ("s0", "s1"):
            if key in data:
                m = data[key]
                kw[key] = np.asarray(m["re"], dtype=float) + 1j * np.asarray(m.get("im", np.zeros((2, 2))), dtype=float)
        return cls(**kw)

    def to_dict(self) -> dict:
        mat = lambda m: {"re": m.real.tolist(), "im": m.imag.tolist()}  # noqa: E731
        return {"omega_tau": self.omega_tau, "alpha": self.alpha, "s0": mat(self.s0), "s1": mat(self.s1)}


@dataclass(frozen=True)
class SymmetricU3Decomposition:
    """``e^{i delta} U3(xi, eta, eta + pi)``."""

    delta: float
    xi: float
    eta: float

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.delta) * u3_matrix(self.xi, self.eta, self.eta + math.pi)


def tli_evolution(params: TliParams) -> np.ndarray:
    """exp(-i wt (cos a sz + sin a sx)); the generator squares to identity."""
    wt, a = params.omega_tau, params.alpha
    n_dot_sigma = math.cos(a) * SIGMA_Z + math.sin(a) * SIGMA_X
    return math.cos(wt) * np.eye(2) - 1j * math.sin(wt) * n_dot_sigma


def decompose_u3(u, tol=1e-12) -> tuple[float, float, float, float]:
    """Return ``(delta, theta, alpha, beta)`` with ``u = e^{i delta} U3(theta, alpha, beta)``."""
    u = np.asarray(u, dtype=complex)
    c, s = abs(u[0, 0]), abs(u[1, 0])
    theta = 2 * math.atan2(s, c)
    if c > tol:
        delta = np.angle(u[0, 0])
        if s > tol:
            alpha = np.angle(u[1, 0]) - delta
            beta = np.angle(-u[0, 1]) - delta
        else:
            alpha, beta = 0.0, np.angle(u[1, 1]) - delta
    else:
        beta = 0.0
        delta = np.angle(-u[0, 1])
        alpha = np.angle(u[1, 0]) - delta
    return float(delta), float(theta), float(wrap_phase(alpha)), float(wrap_phase(beta))


def decompose_symmetric(u, tol=1e-12) -> SymmetricU3Decomposition:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or np.max(np.abs(u - u.T)) > 1e-9:
        raise ValueError("matrix is not a symmetric 2x2")
    c, s = abs(u[0, 0]), abs(u[1, 0])
    xi = 2 * math.acos(min(1.0, c))
    if c > tol:
        delta = float(np.angle(u[0, 0]))
        if s > tol:
            eta = np.angle(u[1, 0]) - delta
        else:
            # diagonal: u11/u00 = -e^{2 i eta}
            eta = np.angle(-u[1, 1] / u[0, 0]) / 2
    else:
        eta = 0.0
        delta = float(np.angle(u[1, 0]))
    return SymmetricU3Decomposition(delta, xi, float(wrap_phase(eta)))


def _symmetric_gate(q, m) -> "U3":
    d = decompose_symmetric(m)
    return U3(q, d.xi, d.eta, d.eta + math.pi)


def controlled_w_gates(w, control, target):
    """Controlled-W from two CNOTs; W = e^{i d} U3(t, a, b) and the global phase
    e^{i(d + (a+b)/2)} left over by the sigma_x-free branch goes onto the control."""
    d, t, a, b = decompose_u3(w)
    return [
        T(target, (b - a) / 2),
        CNOT(control, target),
        U3(target, -t / 2, 0.0, -(a + b) / 2),
        CNOT(control, target),
        U3(target, t / 2, a, 0.0),
        T(control, d + (a + b) / 2),
    ]


def s_psi_circuit(params: TliParams, control: int = 0, target: int = 1, n_qubits: int | None = None) -> Circuit:
    """|0><0| x S0 + |1><1| x S1 as (1 x S0) followed by controlled-(S1 S0^dag)."""
    if control == target:
        raise ValueError("control and target must differ")
    n = n_qubits or max(control, target) + 1
    w = params.s1 @ params.s0.conj().T
    gates = [_symmetric_gate(target, params.s0)] + controlled_w_gates(w, control, target)
    return Circuit(n, gates)


def s_psi_matrix(params: TliParams) -> np.ndarray:
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    return np.kron(p0, params.s0) + np.kron(p1, params.s1)


def u2bit_circuit(params: TliParams) -> Circuit:
    ui = _symmetric_gate(0, tli_evolution(params))
    return Circuit(2, [ui]) + s_psi_circuit(params, 0, 1) + Circuit(2, [ui])


def u2bit_matrix(params: TliParams) -> np.ndarray:
    ui = np.kron(tli_evolution(params), np.eye(2))
    return ui @ s_psi_matrix(params) @ ui


def u3bit_circuit(params: TliParams, swap_particles: bool = False) -> Circuit:
    """Impurity evolution interleaved with scattering of particle 1 then particle 2.

    ``swap_particles`` interchanges the two particle lines, which equals
    SWAP_12 . U . SWAP_12 without spending CNOTs on the swap.
    """
    first, second = (2, 1) if swap_particles else (1, 2)
    ui = Circuit(3, [_symmetric_gate(0, tli_evolution(params))])
    return (
        ui
        + s_psi_circuit(params, 0, first, n_qubits=3)
        + ui
        + s_psi_circuit(params, 0, second, n_qubits=3)
        + ui
    )


def u3bit_matrix(params: TliParams) -> np.ndarray:
    eye = np.eye(2)
    ui = np.kron(np.kron(tli_evolution(params), eye), eye)
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    s_first = np.kron(np.kron(p0, params.s0), eye) + np.kron(np.kron(p1, params.s1), eye)
    s_second = np.kron(np.kron(p0, eye), params.s0) + np.kron(np.kron(p1, eye), params.s1)
    return ui @ s_second @ ui @ s_first @ ui


@dataclass
class Experiment:
    """The three stages of the reversal run plus the state they pass along."""

    model: str
    forward: Circuit
    conjugation: SynthesisReport
    backward: Circuit
    reached: StateVector

    @property
    def circuit(self) -> Circuit:
        return self.forward + self.conjugation.circuit + self.backward

    @property
    def qubit_map(self) -> dict[int, int]:
        return HARDWARE_LINES[self.model]

    def final_state(self) -> StateVector:
        return run_circuit(StateVector.basis(self.forward.n_qubits), self.circuit)


def build_experiment(model: str, params: TliParams) -> Experiment:
    """Forward evolution, state-specific conjugation, forward evolution again.

    The conjugation phases come from a noiseless simulation of the forward
    stage. In the 3-bit model the reversal also needs U_R = SWAP_12, absorbed
    by relabelling the particles in the second evolution.
    """
    if model == "2bit":
        forward = u2bit_circuit(params)
        backward = forward
    elif model == "3bit":
        forward = u3bit_circuit(params)
        backward = u3bit_circuit(params, swap_particles=True)
    else:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    reached = run_circuit(StateVector.basis(forward.n_qubits), forward)
    conjugation = synth_boolean(extract_phases(reached))
    return Experiment(model, forward, conjugation, backward, reached)


def run_experiment(model: str, params: TliParams, shots: int = 8192, noise=None, seed: int = 0) -> Histogram:
    exp = build_experiment(model, params)
    if noise is None:
        return sample(exp.final_state(), shots, seed)
    from .noise import noisy_run

    return noisy_run(exp.circuit, noise, shots, seed, qubit_map=exp.qubit_map)
