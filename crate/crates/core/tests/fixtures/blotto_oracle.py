"""Minimax value of restricted Blotto under two readings of how the row
player's two unassigned regiments are placed. Writes
blotto_interpretations.json next to this file."""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

ROW = np.array([
    [4, 2, 1, 0],
    [1, 3, 0, -1],
    [-2, 2, 2, -2],
    [-1, 0, 3, 1],
    [0, 1, 2, 4],
], dtype=float)

SPREADS = {
    "independent_uniform": [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)],
    "uniform_over_splits": [Fraction(1, 3)] * 3,
}


def generators(spread):
    out = []
    for base in range(3):
        g = [Fraction(0)] * 5
        for k, p in enumerate(spread):
            g[base + k] += p
        out.append(g)
    return out


def maximin(payoff):
    rows, cols = payoff.shape
    # variables: x (rows), v; maximize v s.t. x^T payoff[:, j] >= v
    c = np.zeros(rows + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-payoff.T, np.ones((cols, 1))])
    b_ub = np.zeros(cols)
    a_eq = np.hstack([np.ones((1, rows)), np.zeros((1, 1))])
    bounds = [(0, None)] * rows + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    assert res.success
    return res.x[-1], res.x[:rows]


def main():
    out = {}
    for name, spread in SPREADS.items():
        gens = generators(spread)
        implicit = np.array([[float(sum(g[r] * Fraction(int(ROW[r, c])) for r in range(5))) for c in range(4)] for g in gens])
        value, weights = maximin(implicit)
        out[name] = {
            "generators": [[float(p) for p in g] for g in gens],
            "implicit_row_payoffs": implicit.tolist(),
            "value": round(value, 12) + 0.0,
            "row_weights": [round(w, 12) for w in weights],
        }
    full_value, _ = maximin(ROW)
    out["unrestricted_value"] = round(full_value, 12)
    path = Path(__file__).with_name("blotto_interpretations.json")
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
