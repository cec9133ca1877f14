"""Simulated reversal fidelity on the alpha grid for both register sizes.

Each row holds the Monte Carlo fidelity, the product formula, and the
hardware reference fidelity with its TV distance.

    python scripts/experiment_grid.py --noise appendixF --shots 8192
"""
import argparse
import math
from dataclasses import dataclass
from pathlib import Path

from tempus.noise import FidelityLayout, compare_reference, fidelity_formula, load_profile, load_reference
from tempus.scattering import ALPHA_GRID, MODELS, TliParams, build_experiment, run_experiment


@dataclass
class GridConfig:
    noise: str = "appendixF"
    shots: int = 8192
    seed: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--noise", default=GridConfig.noise)
    ap.add_argument("--shots", type=int, default=GridConfig.shots)
    ap.add_argument("--seed", type=int, default=GridConfig.seed)
    ap.add_argument("--out", type=Path, default=Path("results/experiment_grid.csv"))
    args = ap.parse_args()
    cfg = GridConfig(args.noise, args.shots, args.seed)
    nm = load_profile(cfg.noise)

    lines = ["model,alpha,mc_fidelity,formula_fidelity,reference_fidelity,tv_distance"]
    for model in MODELS:
        table = load_reference(model)
        for alpha in ALPHA_GRID:
            params = TliParams(alpha=alpha)
            exp = build_experiment(model, params)
            hist = run_experiment(model, params, cfg.shots, nm, cfg.seed)
            row = table.row(params.omega_tau, alpha)
            formula = fidelity_formula(FidelityLayout.from_circuit(exp.circuit, exp.qubit_map), nm)
            tv = compare_reference(hist, row)["tv_distance"]
            mc = hist.probability("0" * exp.circuit.n_qubits)
            lines.append(f"{model},{alpha / math.pi:.4f}pi,{mc:.4f},{formula:.4f},{row.fidelity:.4f},{tv:.4f}")
            print(lines[-1])
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
