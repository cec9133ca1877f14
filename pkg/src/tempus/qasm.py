"""OpenQASM 2.0 export for the package's gate set.

Gate mapping (the U3 composition T(a) R(t) T(b) coincides with ``u3(t, a, b)``):

    X          -> x
    T(a)       -> u1(a)
    R(t)       -> u3(t,0,0)
    U3(t,a,b)  -> u3(t,a,b)
    TXTX(p,q)  -> x; u1(q); x; u1(p)
    CNOT       -> cx
    Toffoli    -> ccx
    SWAP       -> swap
"""
from __future__ import annotations

from .statevector import Circuit, Gate


def _fmt(x: float) -> str:
    return repr(float(x))


def gate_lines(gate: Gate, reg: str = "q") -> list[str]:
    q = [f"{reg}[{i}]" for i in gate.qubits]
    p = gate.params
    if gate.kind == "X":
        return [f"x {q[0]};"]
    if gate.kind == "T":
        return [f"u1({_fmt(p[0])}) {q[0]};"]
    if gate.kind == "R":
        return [f"u3({_fmt(p[0])},0,0) {q[0]};"]
    if gate.kind == "U3":
        return [f"u3({','.join(map(_fmt, p))}) {q[0]};"]
    if gate.kind == "TXTX":
        phi, phi_bar = p
        return [f"x {q[0]};", f"u1({_fmt(phi_bar)}) {q[0]};", f"x {q[0]};", f"u1({_fmt(phi)}) {q[0]};"]
    if gate.kind == "CNOT":
        return [f"cx {q[0]},{q[1]};"]
    if gate.kind == "Toffoli":
        return [f"ccx {q[0]},{q[1]},{q[2]};"]
    if gate.kind == "SWAP":
        return [f"swap {q[0]},{q[1]};"]
    raise ValueError(f"no QASM mapping for {gate.kind}")


def to_qasm(circuit: Circuit, measure: bool = True) -> str:
    n = circuit.n_qubits
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{n}];", f"creg c[{n}];"]
    for gate in circuit.gates:
        lines.extend(gate_lines(gate))
    if measure:
        lines.extend(f"measure q[{i}] -> c[{i}];" for i in range(n))
    return "\n".join(lines) + "\n"
