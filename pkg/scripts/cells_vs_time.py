"""Minimal cell count N(tau) at fixed conjugation error, with a linear fit."""
import argparse

import numpy as np
from scipy import stats

from tempus.wavepacket import evolve_gaussian, optimal_partition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--epsilon", type=float, default=0.01)
    ap.add_argument("--taus", type=float, nargs="+", default=[1, 2, 4, 6, 8, 10, 14, 20, 30])
    args = ap.parse_args()
    taus = np.array(args.taus)
    cells = np.array([optimal_partition(evolve_gaussian(args.sigma, t), args.epsilon).n_cells for t in taus])
    for t, n in zip(taus, cells):
        print(f"tau={t:6.2f}  N={n}")
    fit = stats.linregress(taus, cells)
    print(f"N ~ {fit.slope:.3f} tau + {fit.intercept:.2f}, R^2 = {fit.rvalue**2:.5f}")


if __name__ == "__main__":
    main()
