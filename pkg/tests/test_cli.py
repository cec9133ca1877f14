import json
import subprocess
import sys

import numpy as np
import pytest

from tempus.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def state_file(tmp_path):
    rng = np.random.default_rng(4)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    a /= np.linalg.norm(a)
    path = tmp_path / "psi.json"
    path.write_text(json.dumps({"real": a.real.tolist(), "imag": a.imag.tolist()}))
    return path


def test_experiment_writes_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    code, text, _ = run(capsys, "experiment", "--model", "2bit", "--alpha", "pi/6", "--noise", "appendixF", "--out", str(out))
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert {"fidelity", "formula_fidelity", "tv_vs_reference"} <= set(summary)
    assert summary["formula_fidelity"] == pytest.approx(0.796, abs=1e-3)
    assert (out / "histogram.csv").read_text().startswith("state,count,probability")
    assert json.loads(text)["fidelity"] == summary["fidelity"]


def test_experiment_is_seeded(tmp_path, capsys):
    args = ["experiment", "--model", "3bit", "--alpha", "pi/4", "--noise", "appendixF", "--shots", "1000"]
    a = run(capsys, *args, "--seed", "9")[1]
    b = run(capsys, *args, "--seed", "9")[1]
    c = run(capsys, *args, "--seed", "10")[1]
    assert a == b and a != c


def test_noiseless_experiment(capsys):
    code, text, _ = run(capsys, "experiment", "--model", "3bit", "--alpha", "pi/2")
    assert code == 0 and json.loads(text)["fidelity"] == 1.0


def test_refuses_overwrite(tmp_path, capsys):
    out = tmp_path / "run"
    assert run(capsys, "experiment", "--out", str(out))[0] == 0
    code, _, err = run(capsys, "experiment", "--out", str(out))
    assert code == 1 and "--force" in err
    assert run(capsys, "experiment", "--out", str(out), "--force")[0] == 0


def test_bad_angle_fails(capsys):
    code, _, err = run(capsys, "experiment", "--alpha", "__import__('os')")
    assert code == 1 and "angle" in err


@pytest.mark.parametrize("scheme,cost", [("boolean", 8), ("dense_naive", 192), ("dense_ancilla", 144), ("sparse", 0)])
def test_synth(tmp_path, capsys, state_file, scheme, cost):
    qasm = tmp_path / "c.qasm"
    report = tmp_path / "r.json"
    code, _, _ = run(capsys, "synth", "--state", str(state_file), "--scheme", scheme, "--out", str(qasm), "--report", str(report))
    assert code == 0
    data = json.loads(report.read_text())
    assert data["cost"] == cost and data["fidelity"] == pytest.approx(1)
    assert qasm.read_text().startswith("OPENQASM 2.0;")


def test_synth_cost_only(capsys, state_file):
    code, text, _ = run(capsys, "synth", "--state", str(state_file), "--scheme", "boolean_unoptimized")
    assert code == 0 and json.loads(text)["cost"] == 10


def test_reverse(tmp_path, capsys, state_file):
    rng = np.random.default_rng(1)
    h = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = h + h.conj().T
    hp = tmp_path / "h.json"
    hp.write_text(json.dumps({"n_qubits": 3, "real": h.real.tolist(), "imag": h.imag.tolist()}))
    code, text, _ = run(capsys, "reverse", "--hamiltonian", str(hp), "--state", str(state_file), "--tau", "2.5")
    data = json.loads(text)
    assert code == 0 and data["fidelity"] == pytest.approx(1, abs=1e-9) and data["ur_residual"] < 1e-8
    hp.write_text(json.dumps({"n_qubits": 3, "real": (h + np.triu(np.ones((8, 8)), 1)).real.tolist()}))
    assert run(capsys, "reverse", "--hamiltonian", str(hp))[0] == 1


def test_wavepacket(tmp_path, capsys):
    out = tmp_path / "wp"
    code, text, _ = run(capsys, "wavepacket", "--sigma", "1", "--tau", "3", "--cells", "15", "--out", str(out))
    data = json.loads(text)
    assert code == 0 and data["N"] == 15 and data["overlap"] == pytest.approx(0.86, abs=0.02)
    assert {p.name for p in out.iterdir()} == {
        "stage_initial.csv", "stage_spread.csv", "stage_kicked.csv", "stage_returned.csv", "summary.json"
    }


def test_wavepacket_scan(tmp_path, capsys):
    code, text, _ = run(capsys, "wavepacket", "--scan", "10", "18", "--points", "4096", "--out", str(tmp_path / "s"))
    assert code == 0
    summary = json.loads((tmp_path / "s" / "summary.json").read_text())
    assert set(summary["scan"]) == {str(n) for n in range(10, 19)}
    assert abs(json.loads(text)["overlap"] - 0.86) <= 0.02


def test_wavepacket_rejects_bad_sigma(capsys):
    assert run(capsys, "wavepacket", "--sigma", "-1")[0] == 1


def test_estimate(capsys):
    code, text, _ = run(capsys, "estimate")
    data = json.loads(text)
    assert code == 0 and 3e-11 <= data["tau_seconds"] <= 1.2e-10 and data["residual"] < 1e-6


def test_compare(capsys):
    code, text, _ = run(capsys, "compare", "--model", "2bit", "--alpha", "pi/3", "--noise", "appendixF", "--shots", "2000")
    data = json.loads(text)
    assert code == 0 and 0 <= data["tv_distance"] <= 1 and len(data["deltas"]) == 4


def test_compare_without_reference_row(capsys):
    assert run(capsys, "compare", "--alpha", "0.1")[0] == 1


def test_run_config_rejects_unknown_keys():
    assert RunConfig.from_dict({"subcommand": "x", "seed": 3}).seed == 3
    with pytest.raises(ValueError):
        RunConfig.from_dict({"subcommand": "x", "sede": 3})
    with pytest.raises(ValueError):
        RunConfig("x", seed=-1)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tempus", "estimate"], capture_output=True, text=True)
    assert proc.returncode == 0 and "tau_seconds" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "tempus", "bogus"], capture_output=True, text=True)
    assert proc.returncode != 0
