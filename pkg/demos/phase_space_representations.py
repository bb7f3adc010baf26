"""How the choice of operator ordering shapes a history distribution.

Draws a pair of short branches, evaluates the two-branch distribution for
the Q, Wigner and near-P orderings and prints the coupling matrix of the
exponent, showing nearest-neighbour structure at s = 1 only.
"""

import numpy as np

from histphase import distribution, gaussian
from histphase.core import BranchHistory, ModelParams, TimeGrid
from histphase.errors import DivergenceError
from histphase.studies import random_branch


def coupling_matrix(b, bp, s, params, h=0.5):
    """Mixed second differences of log W between positions of the label string."""
    slots = [(0, i) for i in range(b.n)] + [(1, j) for j in reversed(range(bp.n))]

    def f(shifts):
        al, alp = b.alphas.copy(), bp.alphas.copy()
        for (which, idx), d in shifts:
            (al if which == 0 else alp)[idx] += d
        return distribution.log_w_two_branch(BranchHistory(b.grid, al), BranchHistory(bp.grid, alp), s, params)

    k = len(slots)
    out = np.zeros((k, k))
    for u in range(k):
        for v in range(k):
            if u != v:
                d = f([(slots[u], h), (slots[v], 1j * h)]) - f([(slots[u], h)]) - f([(slots[v], 1j * h)]) + f([])
                out[u, v] = abs(d)
    return out


def main():
    rng = np.random.default_rng(3)
    b, bp = random_branch(rng, 3), random_branch(rng, 3)
    params = ModelParams(omega=1.0, beta=0.3 + 0.2j)
    np.set_printoptions(precision=3, suppress=True)

    for s, name in ((1.0, "Q"), (0.0, "Wigner"), (0.5, "s = 0.5")):
        closed = distribution.normalization(6, s) * distribution.w_two_branch(b, bp, s, params)
        oracle = gaussian.oracle_two_branch(b, bp, s, params)
        print(f"{name:8s} W = {closed:.6f}   oracle = {oracle:.6f}")
        print(coupling_matrix(b, bp, s, params))

    print("\napproaching the P ordering on a single label pair:")
    one = BranchHistory(TimeGrid(0.0, 1.0, 1), [0.5])
    for eps in (0.1, 0.01, 0.001):
        print(f"  s = -1 + {eps:<6g} log W = {distribution.log_w_two_branch(one, one, -1 + eps, params).real:.4g}")
    try:
        distribution.log_w_two_branch(one, one, -1.0, params)
    except DivergenceError as exc:
        print(f"  s = -1: {exc}")


if __name__ == "__main__":
    main()
