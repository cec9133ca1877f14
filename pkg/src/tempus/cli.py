"""Command-line front end.

    tempus experiment --model 2bit --omega-tau pi/6 --alpha pi/6 --noise appendixF --out runs/a
    tempus synth --state psi.json --scheme boolean --out psi.qasm
    tempus reverse --hamiltonian h.json --state psi0.json --tau 1.3
    tempus wavepacket --sigma 1 --tau 3 --cells 15 --out runs/wp
    tempus estimate --temperature 2.72
    tempus compare --model 3bit --alpha pi/3 --noise appendixF
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import noise as noise_mod
from . import reversal, scattering, synthesis, wavepacket
from .io import parse_angle, write_output
from .qasm import to_qasm
from .statevector import StateVector, make_rng

log = logging.getLogger("tempus")

RUN_CONFIG_KEYS = {"subcommand", "params", "seed", "out"}


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - RUN_CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _dump(data) -> str:
    return json.dumps(data, indent=2, default=_jsonable) + "\n"


def load_state(path) -> StateVector:
    """``{"real": [...], "imag": [...]}`` or a bare list of real amplitudes."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, list):
        amps = np.asarray(data, dtype=float).astype(complex)
    else:
        real = np.asarray(data["real"], dtype=float)
        amps = real + 1j * np.asarray(data.get("imag", np.zeros_like(real)), dtype=float)
    return StateVector.from_amplitudes(amps)


def _tli_params(args) -> scattering.TliParams:
    base = json.loads(Path(args.params).read_text()) if args.params else {}
    if args.omega_tau is not None:
        base["omega_tau"] = parse_angle(args.omega_tau)
    if args.alpha is not None:
        base["alpha"] = parse_angle(args.alpha)
    return scattering.TliParams.from_dict(base)


def _run_scattering(args):
    params = _tli_params(args)
    exp = scattering.build_experiment(args.model, params)
    nm = noise_mod.load_profile(args.noise) if args.noise else None
    hist = scattering.run_experiment(args.model, params, args.shots, nm, args.seed)
    zero = "0" * exp.forward.n_qubits
    # state-level invariant: the noiseless protocol must return |0...0>
    p_zero = float(exp.final_state().probabilities[0])
    if abs(p_zero - 1) > 1e-9:
        raise RuntimeError(f"noiseless protocol returned |{zero}> with probability {p_zero}")
    layout = noise_mod.FidelityLayout.from_circuit(exp.circuit, exp.qubit_map)
    try:
        row = noise_mod.load_reference(args.model).row(params.omega_tau, params.alpha)
        tv = noise_mod.compare_reference(hist, row)["tv_distance"]
    except KeyError:
        row, tv = None, None
    summary = {
        "model": args.model,
        "omega_tau": params.omega_tau,
        "alpha": params.alpha,
        "shots": args.shots,
        "noise": args.noise,
        "fidelity": hist.probability(zero),
        "formula_fidelity": noise_mod.fidelity_formula(layout, nm) if nm else 1.0,
        "tv_vs_reference": tv,
        "conjugation_cnots": exp.conjugation.n_cnot,
        "total_cnots": exp.circuit.count("CNOT"),
    }
    return params, hist, row, summary


def cmd_experiment(args) -> int:
    params, hist, _, summary = _run_scattering(args)
    cfg = RunConfig("experiment", params.to_dict(), args.seed, args.out)
    if args.out:
        out = Path(args.out)
        write_output(out / "histogram.csv", hist.to_csv(), args.force)
        write_output(out / "summary.json", _dump({**summary, "config": asdict(cfg)}), args.force)
    print(_dump(summary), end="")
    return 0


def cmd_compare(args) -> int:
    params, hist, row, summary = _run_scattering(args)
    if row is None:
        raise ValueError(f"no reference row for omega_tau={params.omega_tau}, alpha={params.alpha}")
    report = noise_mod.compare_reference(hist, row)
    out = {
        "model": args.model,
        "tv_distance": report["tv_distance"],
        "deltas": report["deltas"],
        "simulated_fidelity": summary["fidelity"],
        "reference_fidelity": row.fidelity,
        "reference_fidelity_error": row.fidelity_error,
    }
    if args.out:
        write_output(args.out, _dump(out), args.force)
    print(_dump(out), end="")
    return 0


def cmd_synth(args) -> int:
    state = load_state(args.state)
    scheme = args.scheme
    n = state.n_qubits
    spec = synthesis.extract_phases(state)
    summary = {"n_qubits": n}
    if scheme in synthesis.SCHEMES:
        report = synthesis.synthesize(spec, scheme)
        fid = synthesis.conjugation_fidelity(report, state)
        if abs(fid - 1) > 1e-9:
            raise RuntimeError(f"synthesised circuit misses the conjugate: fidelity {fid}")
        summary.update(report.to_dict(), cnot_equivalent=report.cnot_equivalent, fidelity=fid)
        if args.out:
            write_output(args.out, to_qasm(report.circuit), args.force)
    elif scheme in synthesis.COST_SCHEMES:
        summary.update(scheme=scheme)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    cost_key = "dense_nested" if scheme == "dense_ancilla" else scheme
    summary["cost"] = synthesis.cnot_cost(cost_key, n)
    if args.report:
        write_output(args.report, _dump(summary), args.force)
    elif args.out and scheme in synthesis.SCHEMES:
        write_output(Path(args.out).with_suffix(".json"), _dump(summary), args.force)
    print(_dump(summary), end="")
    return 0


def cmd_reverse(args) -> int:
    h = reversal.Hamiltonian.from_json(args.hamiltonian)
    if args.state:
        psi0 = load_state(args.state)
    else:
        psi0 = StateVector.random(h.n_qubits, make_rng(args.seed))
    if psi0.n_qubits != h.n_qubits:
        raise ValueError("state and Hamiltonian sizes differ")
    plan = reversal.compute_reversal(h)
    u = reversal.matrix_exponential(h, args.tau)
    psi_tau = StateVector(psi0.n_qubits, u @ psi0.amplitudes)
    recovered = reversal.reverse_protocol(u, plan, psi_tau)
    out = {
        "tau": args.tau,
        "fidelity": psi0.fidelity(recovered),
        "ur_residual": plan.residual(h),
        "energies": plan.energies,
        "u_r": {"re": plan.u_r.real, "im": plan.u_r.imag},
    }
    if args.out:
        write_output(args.out, _dump(out), args.force)
    print(_dump({k: out[k] for k in ("tau", "fidelity", "ur_residual")}), end="")
    return 0


def cmd_wavepacket(args) -> int:
    if args.sigma <= 0 or args.tau < 0:
        raise ValueError("need sigma > 0 and tau >= 0")
    grid = wavepacket.default_grid(args.sigma, args.tau, args.points)
    summary = {"sigma": args.sigma, "tau": args.tau}
    if args.scan:
        lo, hi = args.scan
        overlaps = {
            n: wavepacket.reversal_run(args.sigma, args.tau, n, args.layout, grid).overlap for n in range(lo, hi + 1)
        }
        n_cells = min(overlaps, key=lambda n: abs(overlaps[n] - args.target))
        summary["scan"] = overlaps
        summary["target"] = args.target
    elif args.cells:
        n_cells = args.cells
    else:
        spread = wavepacket.evolve_gaussian(args.sigma, args.tau, grid)
        n_cells = wavepacket.optimal_partition(spread, args.epsilon).n_cells if args.tau > 0 else 1
    run = wavepacket.reversal_run(args.sigma, args.tau, n_cells, args.layout, grid)
    summary.update(
        N=n_cells,
        overlap=run.overlap,
        epsilon=1 - wavepacket.overlap_probability(run.spread.conj(), run.kicked),
    )
    if args.out:
        out = Path(args.out)
        for name, psi in run.stages().items():
            write_output(out / f"stage_{name}.csv", psi.to_csv(), args.force)
        write_output(out / "summary.json", _dump(summary), args.force)
    print(_dump({k: v for k, v in summary.items() if k != "scan"}), end="")
    return 0


def cmd_estimate(args) -> int:
    tau = wavepacket.spontaneous_reversal_time(args.t_universe, args.temperature, args.epsilon)
    n = wavepacket.cells_at(tau, args.temperature, args.epsilon)
    ratio = tau / args.t_universe
    out = {
        "tau_seconds": tau,
        "cells": n,
        "epsilon": args.epsilon,
        "residual": abs(2.0**-n - ratio) / ratio,
    }
    print(_dump(out), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tempus", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    for name, fn in (("experiment", cmd_experiment), ("compare", cmd_compare)):
        p = sub.add_parser(name)
        p.add_argument("--model", choices=scattering.MODELS, default="2bit")
        p.add_argument("--omega-tau", default=None)
        p.add_argument("--alpha", default=None)
        p.add_argument("--params", help="TliParams JSON file")
        p.add_argument("--shots", type=int, default=8192)
        p.add_argument("--noise", help="appendixF, maintext, or a NoiseModel JSON file")
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("synth")
    p.add_argument("--state", required=True)
    p.add_argument("--scheme", default="boolean", choices=sorted(set(synthesis.SCHEMES) | set(synthesis.COST_SCHEMES)))
    p.add_argument("--report")
    common(p, seed=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("reverse")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--state")
    p.add_argument("--tau", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_reverse)

    p = sub.add_parser("wavepacket")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=3.0)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--cells", type=int)
    group.add_argument("--epsilon", type=float, default=0.01)
    group.add_argument("--scan", type=int, nargs=2, metavar=("MIN", "MAX"))
    p.add_argument("--target", type=float, default=0.86)
    p.add_argument("--layout", choices=("optimal", "uniform"), default="optimal")
    p.add_argument("--points", type=int, default=wavepacket.DEFAULT_POINTS)
    common(p, seed=False)
    p.set_defaults(func=cmd_wavepacket)

    p = sub.add_parser("estimate")
    p.add_argument("--t-universe", type=float, default=wavepacket.T_UNIVERSE)
    p.add_argument("--temperature", type=float, default=2.72)
    p.add_argument("--epsilon", type=float, default=wavepacket.DEFAULT_EPSILON)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, FileExistsError, FileNotFoundError, RuntimeError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"tempus {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
