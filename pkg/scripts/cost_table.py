"""CNOT(-equivalent) cost of conjugating an n-qubit state under each scheme."""
import argparse

from tempus.synthesis import COST_SCHEMES, cnot_cost


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    print("n," + ",".join(COST_SCHEMES))
    for n in range(1, args.n_max + 1):
        print(f"{n}," + ",".join(str(cnot_cost(s, n)) for s in COST_SCHEMES))


if __name__ == "__main__":
    main()
