import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tempus.statevector import StateVector, circuit_to_unitary
from tempus.synthesis import (
    SCHEMES,
    PhaseSpec,
    and_parity_expansion,
    cnot_cost,
    conjugation_fidelity,
    extract_phases,
    parity_ladders,
    phase_to_parity,
    synth_boolean,
    synth_dense_ancilla,
    synth_dense_naive,
    synthesize,
    walsh_hadamard,
    wrap_phase,
)

seeds = st.integers(0, 2**32 - 1)


def random_state(n, seed):
    return StateVector.random(n, np.random.default_rng(seed))


def test_walsh_hadamard_matches_hadamard_matrix(rng):
    h1 = np.array([[1, 1], [1, -1]])
    for n in range(1, 6):
        h = h1
        for _ in range(n - 1):
            h = np.kron(h, h1)
        v = rng.normal(size=2**n)
        assert np.allclose(walsh_hadamard(v), h @ v)


@pytest.mark.parametrize("n", range(1, 7))
def test_and_expansion_is_exact(n):
    for bits in itertools.product((0, 1), repeat=n):
        assert and_parity_expansion(bits) == pytest.approx(float(all(bits)), abs=1e-12)


@given(st.integers(1, 5), seeds)
def test_parity_expansion_reconstructs_target(n, seed):
    phases = np.random.default_rng(seed).uniform(-math.pi, math.pi, 2**n)
    coeffs = phase_to_parity(phases, n)
    assert np.allclose(coeffs.evaluate(), -2 * phases, atol=1e-10)


def test_two_qubit_boolean_form(rng):
    # F(b1, b0) written with phi_{b1 b0}; register index is 2*b1 + b0.
    for _ in range(20):
        p = {k: rng.uniform(-math.pi, math.pi) for k in ("00", "01", "10", "11")}
        A = (p["01"] + p["11"]) / 2
        B = (p["10"] + p["00"]) / 2
        C = (p["10"] + p["11"]) / 2
        D = (p["00"] + p["01"]) / 2
        E = (p["00"] + p["11"]) / 2
        G = (p["10"] + p["01"]) / 2
        for b1, b0 in itertools.product((0, 1), repeat=2):
            x = b1 ^ b0
            f = A * b0 + B * (1 - b0) + C * b1 + D * (1 - b1) - E * x - G * (1 - x)
            assert f == pytest.approx(p[f"{b1}{b0}"], abs=1e-12)
        phases = [p["00"], p["01"], p["10"], p["11"]]
        c = phase_to_parity(phases, 2)
        assert c.coefficient((1,)) == pytest.approx(-2 * (A - B))
        assert c.coefficient((0,)) == pytest.approx(-2 * (C - D))
        assert c.coefficient((0, 1)) == pytest.approx(-2 * (G - E))
        assert c.constant == pytest.approx(-2 * (B + D - G))


def test_extract_phases_roundtrip(rng):
    psi = StateVector.random(3, rng)
    spec = extract_phases(psi)
    assert spec.state().fidelity(psi) == pytest.approx(1)
    assert np.all(np.abs(spec.phases) <= math.pi)


def test_wrap_phase_range():
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    assert wrap_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_nested_ladders_cover_every_term_once():
    for n in range(2, 7):
        served = [t for _, fresh in parity_ladders(n) for t in fresh]
        expected = [s for k in range(2, n + 1) for s in itertools.combinations(range(n), k)]
        assert sorted(served) == sorted(expected)


@pytest.mark.parametrize("n", range(1, 6))
def test_boolean_cnot_count(n):
    spec = extract_phases(random_state(n, n))
    assert synth_boolean(spec).n_cnot == (n - 1) * 2 ** (n - 1) == cnot_cost("boolean", n)


@pytest.mark.parametrize("n", range(1, 6))
def test_boolean_circuit_is_exact_diagonal(n):
    spec = extract_phases(random_state(n, 100 + n))
    u = circuit_to_unitary(synth_boolean(spec).circuit)
    assert np.allclose(u, np.diag(np.exp(-2j * spec.phases)), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dense_ancilla_toffoli_count(n):
    report = synth_dense_ancilla(extract_phases(random_state(n, n)))
    assert report.n_toffoli == 4 * (2**n - 2)
    assert report.cnot_equivalent == cnot_cost("dense_nested", n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dense_naive_cost(n):
    report = synth_dense_naive(extract_phases(random_state(n, n)))
    assert report.cnot_equivalent == cnot_cost("dense_naive", n) == 12 * (n - 1) * 2**n


def test_ancilla_returns_clean(rng):
    psi = StateVector.random(3, rng)
    for scheme in ("dense_ancilla", "dense_naive"):
        r = synthesize(extract_phases(psi), scheme)
        u = circuit_to_unitary(r.circuit)
        amps = np.kron(psi.amplitudes, np.eye(2**r.n_ancilla)[0])
        out = (u @ amps).reshape(2**3, 2**r.n_ancilla)
        assert np.allclose(out[:, 1:], 0, atol=1e-10)


def test_unoptimized_boolean_cost_counts_ladders():
    for n in range(2, 8):
        ladders = sum(math.comb(n, k) * 2 * (k - 1) for k in range(2, n + 1))
        assert cnot_cost("boolean_unoptimized", n) == ladders


def test_dense_cost_reports():
    assert cnot_cost("dense_nested", 2) == 48
    assert cnot_cost("dense_nested", 3) == 144
    assert cnot_cost("dense_naive", 3) == 192
    assert cnot_cost("sparse", 4) == 0
    with pytest.raises(ValueError):
        cnot_cost("magic", 2)


@given(st.sampled_from(SCHEMES), st.integers(2, 3), seeds)
def test_every_scheme_conjugates(scheme, n, seed):
    psi = random_state(n, seed)
    report = synthesize(extract_phases(psi), scheme)
    assert conjugation_fidelity(report, psi) == pytest.approx(1, abs=1e-9)


def test_zero_amplitudes_get_zero_phase():
    psi = StateVector.from_amplitudes([1, 0, 1j, 0], normalize=True)
    spec = extract_phases(psi)
    assert spec.phases[1] == 0 and spec.phases[3] == 0
    assert conjugation_fidelity(synth_boolean(spec), psi) == pytest.approx(1)


def test_report_json_fields(rng):
    r = synth_boolean(extract_phases(StateVector.random(3, rng)))
    assert set(r.to_dict()) >= {"scheme", "n_cnot", "n_toffoli", "n_ancilla"}


def test_bad_inputs():
    with pytest.raises(ValueError):
        phase_to_parity(np.zeros(3), 2)
    with pytest.raises(ValueError):
        synthesize(extract_phases(StateVector.basis(2)), "nope")
    with pytest.raises(ValueError):
        PhaseSpec(2, np.zeros(3), np.ones(3))
