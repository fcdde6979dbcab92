"""Regenerate the shipped synthetic probit data set (n=20, p=3).

Usage: python3 tools/make_probit_data.py > src/cudmcmc/models/data/probit_synthetic.csv
"""

import numpy as np

SEED = 7
BETA = np.array([0.2, 0.5, -0.5])


def main():
    rng = np.random.default_rng(SEED)
    n = 20
    X = np.column_stack([np.ones(n), rng.standard_normal((n, 2))])
    y = (X @ BETA + rng.standard_normal(n) > 0).astype(int)
    print(f"# synthetic probit design, seed {SEED}, beta = {BETA.tolist()}")
    print("x0,x1,x2,y")
    for row, yi in zip(X, y):
        print(",".join(f"{v:.6f}" for v in row) + f",{yi}")


if __name__ == "__main__":
    main()
