"""Anti-unitary time reversal R = U_R K built from a Hamiltonian's eigenbasis."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .statevector import StateVector

HERMITIAN_TOL = 1e-10
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class Hamiltonian:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=complex)
        dim = 2**self.n_qubits
        if h.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {h.shape}")
        residual = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
        if residual >= HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian (max |H - H^dag| = {residual:.3g})")
        h = (h + h.conj().T) / 2
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)

    @classmethod
    def from_json(cls, source) -> "Hamiltonian":
        """Load ``{n_qubits, real: [[...]], imag: [[...]]}``; ``imag`` may be omitted."""
        if isinstance(source, (str, Path)) and Path(source).exists():
            source = Path(source).read_text()
        data = json.loads(source) if isinstance(source, str) else dict(source)
        real = np.asarray(data["real"], dtype=float)
        imag = np.asarray(data.get("imag", np.zeros_like(real)), dtype=float)
        return cls(int(data["n_qubits"]), real + 1j * imag)

    def to_json(self) -> str:
        return json.dumps(
            {"n_qubits": self.n_qubits, "real": self.matrix.real.tolist(), "imag": self.matrix.imag.tolist()}
        )


@dataclass(frozen=True)
class ReversalPlan:
    u_r: np.ndarray
    u_h: np.ndarray
    energies: np.ndarray

    def residual(self, h: Hamiltonian) -> float:
        """max |H - (U_R^dag H U_R)^*|, the defining relation of U_R."""
        u = self.u_r
        return float(np.max(np.abs(h.matrix - (u.conj().T @ h.matrix @ u).conj())))

    def apply(self, state: StateVector) -> StateVector:
        """R|psi> = U_R K |psi>."""
        return StateVector(state.n_qubits, self.u_r @ state.amplitudes.conj())

    def apply_inverse(self, state: StateVector) -> StateVector:
        """R^{-1}|psi> = K U_R^dag |psi>."""
        return StateVector(state.n_qubits, (self.u_r.conj().T @ state.amplitudes).conj())


def _fix_gauge(vecs: np.ndarray) -> np.ndarray:
    # first largest-magnitude component of each eigenvector made real positive
    idx = np.argmax(np.abs(vecs) > np.abs(vecs).max(axis=0) * (1 - 1e-12), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)


def degenerate_blocks(energies: np.ndarray) -> list[list[int]]:
    scale = max(1.0, float(np.max(np.abs(energies)))) if energies.size else 1.0
    blocks = [[0]]
    for i in range(1, len(energies)):
        if abs(energies[i] - energies[i - 1]) <= DEGENERACY_RTOL * scale:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return blocks


def compute_reversal(h: Hamiltonian) -> ReversalPlan:
    """U_R = U_H^dag U_H^* with H = U_H^dag E U_H.

    ``eigh`` returns H = V E V^dag, so U_H = V^dag and U_R = V V^T. The
    result satisfies the defining relation for any orthonormal eigenbasis,
    which is why degenerate blocks need no special treatment.
    """
    energies, vecs = np.linalg.eigh(h.matrix)
    vecs = _fix_gauge(vecs)
    u_h = vecs.conj().T
    u_r = vecs @ vecs.T
    return ReversalPlan(u_r=u_r, u_h=u_h, energies=energies)


def conjugate_state(state: StateVector) -> StateVector:
    """Complex conjugation K in the computational basis."""
    return state.conj()


def matrix_exponential(h: Hamiltonian, tau: float) -> np.ndarray:
    """exp(-i H tau) with hbar = 1."""
    energies, vecs = np.linalg.eigh(h.matrix)
    return (vecs * np.exp(-1j * energies * tau)) @ vecs.conj().T


def reverse_protocol(u_forward: np.ndarray, plan: ReversalPlan, psi_tau: StateVector) -> StateVector:
    """R^{-1} U(tau) R |psi(tau)>, which recovers |psi(0)>."""
    u_forward = np.asarray(u_forward, dtype=complex)
    dim = psi_tau.amplitudes.shape[0]
    if u_forward.shape != (dim, dim) or plan.u_r.shape != (dim, dim):
        raise ValueError("dimension mismatch between evolution, plan and state")
    reversed_state = plan.apply(psi_tau)
    evolved = StateVector(psi_tau.n_qubits, u_forward @ reversed_state.amplitudes)
    return plan.apply_inverse(evolved)
