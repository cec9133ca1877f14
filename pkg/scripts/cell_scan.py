"""Overlap of the returned packet with psi(0)* versus the number of cells.

    python scripts/cell_scan.py --out results/cell_scan.csv
"""
import argparse
from dataclasses import dataclass
from pathlib import Path

from tempus.wavepacket import default_grid, reversal_run


@dataclass
class ScanConfig:
    sigma: float = 1.0
    tau: float = 3.0
    n_min: int = 4
    n_max: int = 64
    target: float = 0.86


def main():
    cfg = ScanConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, value in vars(cfg).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    ap.add_argument("--out", type=Path, default=Path("results/cell_scan.csv"))
    args = ap.parse_args()
    cfg = ScanConfig(**{k: getattr(args, k) for k in vars(cfg)})

    grid = default_grid(cfg.sigma, cfg.tau)
    rows = []
    for n in range(cfg.n_min, cfg.n_max + 1):
        for layout in ("optimal", "uniform"):
            rows.append((n, layout, reversal_run(cfg.sigma, cfg.tau, n, layout, grid).overlap))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("n_cells,layout,overlap\n" + "".join(f"{n},{lay},{o:.6f}\n" for n, lay, o in rows))
    best = min((r for r in rows if r[1] == "optimal"), key=lambda r: abs(r[2] - cfg.target))
    print(f"closest to {cfg.target}: N={best[0]} overlap={best[2]:.4f}; wrote {args.out}")


if __name__ == "__main__":
    main()
