import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exact_zero_probability
from tempus.noise import (
    HARDWARE_LAYOUTS,
    FidelityLayout,
    NoiseModel,
    ReferenceTable,
    compare_reference,
    fidelity_formula,
    load_calibration,
    load_profile,
    load_reference,
    noisy_run,
)
from tempus.scattering import ALPHA_GRID, TliParams, build_experiment
from tempus.statevector import CNOT, Circuit, Histogram, X


def undirected(pairs):
    return sorted(tuple(sorted(p)) for p in pairs)


@pytest.mark.parametrize("model", ["2bit", "3bit"])
def test_circuit_layout_matches_stated_layout(model):
    exp = build_experiment(model, TliParams())
    derived = FidelityLayout.from_circuit(exp.circuit, exp.qubit_map)
    assert undirected(derived.cnots) == undirected(HARDWARE_LAYOUTS[model].cnots)
    assert sorted(derived.measured) == sorted(HARDWARE_LAYOUTS[model].measured)


def test_formula_by_hand():
    nm = load_profile("appendixF")
    two = (1 - 0.0268) ** 6 * (1 - 0.036) * (1 - 0.028)
    three = (1 - 0.0268) ** 6 * (1 - 0.0191) ** 6 * (1 - 0.017) ** 4 * (1 - 0.042) * (1 - 0.036) * (1 - 0.028)
    assert fidelity_formula(HARDWARE_LAYOUTS["2bit"], nm) == pytest.approx(two, rel=1e-12)
    assert fidelity_formula(HARDWARE_LAYOUTS["3bit"], nm) == pytest.approx(three, rel=1e-12)


def test_ideal_noise_is_noiseless():
    exp = build_experiment("3bit", TliParams(alpha=ALPHA_GRID[2]))
    hist = noisy_run(exp.circuit, NoiseModel.ideal(), 4096, seed=1, qubit_map=exp.qubit_map)
    assert hist.counts == {"000": 4096}


def test_seed_reproducibility():
    exp = build_experiment("2bit", TliParams())
    nm = load_profile("appendixF")
    a = noisy_run(exp.circuit, nm, 2048, seed=11, qubit_map=exp.qubit_map)
    b = noisy_run(exp.circuit, nm, 2048, seed=11, qubit_map=exp.qubit_map)
    c = noisy_run(exp.circuit, nm, 2048, seed=12, qubit_map=exp.qubit_map)
    assert a.counts == b.counts and a.counts != c.counts


def test_readout_only_flip_rate():
    nm = NoiseModel({}, {0: 0.2, 1: 0.0})
    hist = noisy_run(Circuit(2, [X(1)]), nm, 20000, seed=5)
    assert set(hist.counts) <= {"01", "11"}
    assert hist.probability("11") == pytest.approx(0.2, abs=4 * math.sqrt(0.16 / 20000))


def test_certain_failure_depolarises_pair():
    nm = NoiseModel({(0, 1): 1.0}, {0: 0.0, 1: 0.0})
    hist = noisy_run(Circuit(2, [CNOT(0, 1)]), nm, 16000, seed=2)
    for bits in ("00", "01", "10", "11"):
        assert hist.probability(bits) == pytest.approx(0.25, abs=0.02)


@pytest.mark.parametrize("model", ["2bit", "3bit"])
def test_monte_carlo_matches_density_matrix(model):
    exp = build_experiment(model, TliParams())
    nm = load_profile("appendixF")
    shots = 2**17
    p = exact_zero_probability(exp.circuit, nm, exp.qubit_map)
    hist = noisy_run(exp.circuit, nm, shots, seed=3, qubit_map=exp.qubit_map)
    sigma = math.sqrt(p * (1 - p) / shots)
    assert abs(hist.probability("0" * exp.circuit.n_qubits) - p) < 3 * sigma


def test_gate_error_lookup():
    nm = load_profile("maintext")
    assert nm.gate_error(1, 2) == nm.gate_error(2, 1) == pytest.approx(0.02786)
    with pytest.raises(KeyError):
        NoiseModel().gate_error(0, 1)
    with pytest.raises(ValueError):
        NoiseModel({(0, 1): 1.5})
    with pytest.raises(ValueError):
        load_profile("nonexistent")


def test_profile_roundtrip(tmp_path):
    nm = load_profile("appendixF")
    path = tmp_path / "nm.json"
    import json

    path.write_text(json.dumps(nm.to_dict()))
    again = load_profile(str(path))
    assert again.cnot_errors == nm.cnot_errors and again.readout_errors == nm.readout_errors


def test_calibration_matches_profile():
    cal = load_calibration()
    nm = load_profile("appendixF")
    for q, row in cal.items():
        assert row["eps_r"] == pytest.approx(nm.readout_error(q))
        assert row["t1_us"] == pytest.approx(nm.t1[q])


@pytest.mark.parametrize("model,width", [("2bit", 2), ("3bit", 3)])
def test_reference_tables(model, width):
    table = load_reference(model)
    assert len(table.rows) == 4
    for alpha in ALPHA_GRID:
        row = table.row(math.pi / 6, alpha)
        assert row.shots == 8192
        assert all(len(k) == width for k in row.counts)
        assert 0 < row.fidelity < 1
        same = compare_reference(row.histogram(), row)
        assert same["tv_distance"] == 0


def test_tv_distance_bounds():
    row = load_reference("2bit").row(math.pi / 6, math.pi / 6)
    far = Histogram({"11": 8192}, 8192)
    tv = compare_reference(far, row)["tv_distance"]
    assert tv == pytest.approx(1 - row.counts["11"] / 8192)
    with pytest.raises(ValueError):
        compare_reference(Histogram({"000": 1}, 1), row)


def test_bad_reference_rows(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("omega_tau,alpha,state,count\npi/6,pi/6,00,10\n")
    with pytest.raises(ValueError):
        ReferenceTable.from_csv(path)


def test_reference_fidelity_field():
    assert load_reference("2bit").row(math.pi / 6, math.pi / 6).fidelity == pytest.approx(0.848, abs=5e-4)


def test_noiseless_simulation_differs_from_hardware():
    from tempus.scattering import run_experiment

    row = load_reference("2bit").row(math.pi / 6, math.pi / 6)
    hist = run_experiment("2bit", TliParams(alpha=math.pi / 6), shots=8192)
    assert compare_reference(hist, row)["tv_distance"] > 0.1


def test_zero_rates_give_unit_fidelity():
    assert fidelity_formula(HARDWARE_LAYOUTS["3bit"], NoiseModel.ideal()) == 1.0


rates = st.floats(0, 1, allow_nan=False)


@given(st.lists(rates, min_size=6, max_size=6), st.integers(0, 5), st.floats(0, 1))
def test_formula_monotone_in_every_rate(values, which, bump):
    def model(v):
        return NoiseModel({(2, 1): v[0], (2, 0): v[1], (1, 0): v[2]}, {0: v[3], 1: v[4], 2: v[5]})

    raised = list(values)
    raised[which] = min(1.0, raised[which] + bump)
    layout = HARDWARE_LAYOUTS["3bit"]
    assert fidelity_formula(layout, model(raised)) <= fidelity_formula(layout, model(values)) + 1e-15


def test_missing_rate_is_an_error():
    with pytest.raises(KeyError):
        fidelity_formula(HARDWARE_LAYOUTS["3bit"], NoiseModel({(2, 1): 0.01}, {1: 0.0, 2: 0.0}))
