"""Gate/readout error budget: analytic fidelity products, Monte Carlo shots and
comparison against the recorded hardware histograms.

Qubit labels inside a :class:`NoiseModel` are hardware lines. Circuits use
register indices, translated through a ``qubit_map`` (identity by default).

A failed two-qubit gate is followed by a uniformly random two-qubit Pauli on
its pair (full depolarisation). T1/T2 are carried for reporting only.
"""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .io import data_dir, parse_angle
from .statevector import Circuit, Histogram, X_MATRIX, apply_matrix, make_rng

PROFILES = ("appendixF", "maintext")

_PAULIS = (
    np.eye(2, dtype=complex),
    X_MATRIX,
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
PAIR_PAULIS = [np.kron(a, b) for a in _PAULIS for b in _PAULIS]

# failure opportunities per multi-qubit gate, as (control, target) positions
# in the gate's qubit tuple; Toffoli follows the standard 6-CNOT network
_GATE_PAIRS = {
    "CNOT": [(0, 1)],
    "SWAP": [(0, 1), (1, 0), (0, 1)],
    "Toffoli": [(1, 2), (0, 2), (1, 2), (0, 2), (0, 1), (0, 1)],
}


def _rate(name, value):
    value = float(value)
    if not 0 <= value <= 1:
        raise ValueError(f"{name} = {value} outside [0, 1]")
    return value


@dataclass
class NoiseModel:
    cnot_errors: dict[tuple[int, int], float] = field(default_factory=dict)
    readout_errors: dict[int, float] = field(default_factory=dict)
    t1: dict[int, float] = field(default_factory=dict)
    t2: dict[int, float] = field(default_factory=dict)
    single_qubit_errors: dict[int, float] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        self.cnot_errors = {(int(c), int(t)): _rate(f"eps_g{c}{t}", v) for (c, t), v in self.cnot_errors.items()}
        self.readout_errors = {int(q): _rate(f"eps_r{q}", v) for q, v in self.readout_errors.items()}
        self.single_qubit_errors = {int(q): _rate(f"eps_1{q}", v) for q, v in self.single_qubit_errors.items()}
        self.t1 = {int(q): float(v) for q, v in self.t1.items()}
        self.t2 = {int(q): float(v) for q, v in self.t2.items()}

    def gate_error(self, control: int, target: int) -> float:
        """Rate for a CNOT on a hardware pair; the reversed direction is accepted."""
        for key in ((control, target), (target, control)):
            if key in self.cnot_errors:
                return self.cnot_errors[key]
        raise KeyError(f"no CNOT error rate for pair ({control}, {target})")

    def readout_error(self, qubit: int) -> float:
        try:
            return self.readout_errors[qubit]
        except KeyError:
            raise KeyError(f"no readout error rate for qubit {qubit}") from None

    @classmethod
    def ideal(cls, qubits=(0, 1, 2)) -> "NoiseModel":
        pairs = {(a, b): 0.0 for a in qubits for b in qubits if a != b}
        return cls(pairs, {q: 0.0 for q in qubits}, name="ideal")

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        return cls(
            cnot_errors={(e["control"], e["target"]): e["rate"] for e in data.get("cnot_errors", [])},
            readout_errors=data.get("readout_errors", {}),
            t1=data.get("t1_us", {}),
            t2=data.get("t2_us", {}),
            single_qubit_errors=data.get("single_qubit_errors", {}),
            name=data.get("name", "custom"),
        )

    def to_dict(self) -> dict:
        keyed = lambda d: {str(k): v for k, v in d.items()}  # noqa: E731
        return {
            "name": self.name,
            "cnot_errors": [{"control": c, "target": t, "rate": r} for (c, t), r in self.cnot_errors.items()],
            "readout_errors": keyed(self.readout_errors),
            "single_qubit_errors": keyed(self.single_qubit_errors),
            "t1_us": keyed(self.t1),
            "t2_us": keyed(self.t2),
        }

    @classmethod
    def from_json(cls, path) -> "NoiseModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def load_profile(name: str) -> NoiseModel:
    """Named calibration profile (``appendixF`` or ``maintext``) or a JSON path."""
    if name in PROFILES:
        return NoiseModel.from_json(data_dir() / f"noise_{name}.json")
    path = Path(name)
    if path.exists():
        return NoiseModel.from_json(path)
    raise ValueError(f"unknown noise profile {name!r}; choose from {PROFILES} or give a JSON file")


# -- analytic fidelity ---------------------------------------------------------

@dataclass
class FidelityLayout:
    """Hardware CNOT placements (control, target) and measured hardware qubits."""

    cnots: list[tuple[int, int]]
    measured: list[int]

    @classmethod
    def from_circuit(cls, circuit: Circuit, qubit_map=None) -> "FidelityLayout":
        qmap = qubit_map or {q: q for q in range(circuit.n_qubits)}
        cnots = []
        for gate in circuit.gates:
            for a, b in _GATE_PAIRS.get(gate.kind, []):
                cnots.append((qmap[gate.qubits[a]], qmap[gate.qubits[b]]))
        return cls(cnots, [qmap[q] for q in range(circuit.n_qubits)])


# Gate placements as stated for the hardware runs (impurity on q2).
HARDWARE_LAYOUTS = {
    "2bit": FidelityLayout([(2, 1)] * 6, [1, 2]),
    "3bit": FidelityLayout([(2, 1)] * 6 + [(2, 0)] * 6 + [(1, 0)] * 4, [0, 1, 2]),
}


def fidelity_formula(layout: FidelityLayout, noise: NoiseModel) -> float:
    """Probability that no gate fails and no readout flips."""
    f = 1.0
    for c, t in layout.cnots:
        f *= 1 - noise.gate_error(c, t)
    for q in layout.measured:
        f *= 1 - noise.readout_error(q)
    return f


# -- Monte Carlo ---------------------------------------------------------------

def _failure_events(circuit: Circuit, noise: NoiseModel, qmap, single_qubit: bool):
    """(gate index, register qubits, rate) for every failure opportunity."""
    events = []
    for i, gate in enumerate(circuit.gates):
        for a, b in _GATE_PAIRS.get(gate.kind, []):
            qa, qb = gate.qubits[a], gate.qubits[b]
            events.append((i, (qa, qb), noise.gate_error(qmap[qa], qmap[qb])))
        if single_qubit and len(gate.qubits) == 1:
            q = gate.qubits[0]
            events.append((i, (q,), noise.single_qubit_errors.get(qmap[q], 0.0)))
    return events


def noisy_run(
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int = 0,
    qubit_map=None,
    single_qubit: bool = False,
) -> Histogram:
    """Sample ``shots`` noisy executions of ``circuit`` from |0...0>.

    All randomness for a call is drawn up front from one seeded stream, so a
    fixed seed reproduces the histogram bit for bit. Shots sharing a failure
    pattern share one simulated trajectory.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = circuit.n_qubits
    qmap = qubit_map or {q: q for q in range(n)}
    events = _failure_events(circuit, noise, qmap, single_qubit)
    readout = np.array([noise.readout_error(qmap[q]) for q in range(n)])
    rates = np.array([e[2] for e in events])

    rng = make_rng(seed)
    failed = rng.random((shots, len(events))) < rates
    paulis = rng.integers(0, 16, size=(shots, len(events)))
    u_outcome = rng.random(shots)
    flips = rng.random((shots, n)) < readout

    # ideal prefix states: prefix[i] is the state after gates[:i]
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1
    prefix = [amps]
    for gate in circuit.gates:
        amps = apply_matrix(amps, n, gate.matrix(), gate.qubits)
        prefix.append(amps)

    def trajectory(pattern):
        first_gate = events[pattern[0][0]][0]
        amps = prefix[first_gate + 1]
        pending = defaultdict(list)
        for ev, p in pattern:
            pending[events[ev][0]].append((events[ev][1], p))
        for i in range(first_gate, len(circuit.gates)):
            if i > first_gate:
                g = circuit.gates[i]
                amps = apply_matrix(amps, n, g.matrix(), g.qubits)
            for qubits, p in pending.get(i, ()):
                op = PAIR_PAULIS[p] if len(qubits) == 2 else _PAULIS[p % 4]
                amps = apply_matrix(amps, n, op, qubits)
        return amps

    cdf_cache = {}
    outcomes = np.empty(shots, dtype=np.int64)
    for s in range(shots):
        idx = np.flatnonzero(failed[s])
        key = tuple((int(e), int(paulis[s, e])) for e in idx)
        if key not in cdf_cache:
            final = prefix[-1] if not key else trajectory(key)
            cdf = np.cumsum(np.abs(final) ** 2)
            cdf_cache[key] = cdf / cdf[-1]
        outcomes[s] = min(int(np.searchsorted(cdf_cache[key], u_outcome[s], side="right")), 2**n - 1)

    weights = 1 << np.arange(n - 1, -1, -1)
    outcomes ^= flips.astype(np.int64) @ weights
    return Histogram.from_outcomes(outcomes, n)


# -- reference data ------------------------------------------------------------

@dataclass
class ReferenceRow:
    omega_tau: float
    alpha: float
    counts: dict[str, int]

    @property
    def shots(self) -> int:
        return sum(self.counts.values())

    @property
    def fidelity(self) -> float:
        zero = "0" * len(next(iter(self.counts)))
        return self.counts.get(zero, 0) / self.shots

    @property
    def fidelity_error(self) -> float:
        f = self.fidelity
        return math.sqrt(f * (1 - f) / self.shots)

    def histogram(self) -> Histogram:
        return Histogram(dict(self.counts), self.shots)


@dataclass
class ReferenceTable:
    rows: list[ReferenceRow]

    def __post_init__(self):
        for row in self.rows:
            if row.shots != 8192:
                raise ValueError(f"row ({row.omega_tau}, {row.alpha}) sums to {row.shots}, not 8192")

    def row(self, omega_tau: float, alpha: float, tol: float = 1e-6) -> ReferenceRow:
        for r in self.rows:
            if abs(r.omega_tau - omega_tau) < tol and abs(r.alpha - alpha) < tol:
                return r
        raise KeyError(f"no reference row for omega_tau={omega_tau}, alpha={alpha}")

    @classmethod
    def from_csv(cls, path) -> "ReferenceTable":
        grouped: dict[tuple[float, float], dict[str, int]] = {}
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                key = (parse_angle(rec["omega_tau"]), parse_angle(rec["alpha"]))
                grouped.setdefault(key, {})[rec["state"].strip()] = int(rec["count"])
        return cls([ReferenceRow(w, a, counts) for (w, a), counts in grouped.items()])


REFERENCE_FILES = {"2bit": "table1_2qubit.csv", "3bit": "table2_3qubit.csv"}


def load_reference(model: str) -> ReferenceTable:
    return ReferenceTable.from_csv(data_dir() / REFERENCE_FILES[model])


def load_calibration(path=None) -> dict[int, dict[str, float]]:
    """Per-qubit ``t1_us, t2_us, eps_r, eps_1`` from the calibration CSV."""
    path = path or data_dir() / "table3_calibration.csv"
    with open(path, newline="") as fh:
        return {int(r["qubit"]): {k: float(v) for k, v in r.items() if k != "qubit"} for r in csv.DictReader(fh)}


def compare_reference(hist: Histogram, row: ReferenceRow) -> dict:
    """Total-variation distance and per-state probability deltas (simulated minus recorded)."""
    width = len(next(iter(row.counts)))
    if any(len(k) != width for k in hist.counts):
        raise ValueError("histogram and reference row cover different registers")
    states = sorted(set(row.counts) | set(hist.counts))
    ref = row.histogram()
    deltas = {s: hist.probability(s) - ref.probability(s) for s in states}
    return {
        "tv_distance": 0.5 * sum(abs(d) for d in deltas.values()),
        "deltas": deltas,
        "reference_fidelity": row.fidelity,
    }
