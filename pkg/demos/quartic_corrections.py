"""Quartic coupling: kernels from scratch, their values on paths and coarse-graining.

Derives the perturbative exponent with exact arithmetic, evaluates it on a
pair of smooth paths and compares the first-order decoherence functional of
Gaussian-window histories with a Fock-space computation.
"""

import numpy as np

from histphase.core import ModelParams, TimeGrid
from histphase.ctp import Bump
from histphase.perturbation import (
    GaussianWindow,
    coarse_grain_gaussian_windows,
    connected_exponent,
    decoherence_fock,
    render_kernel,
    s_tilde_config,
)


def main():
    exp = connected_exponent(2)
    for order in (1, 2):
        print(f"order {order}:")
        for k in exp.kernels(order):
            print(f"  {render_kernel(k)}")

    grid = TimeGrid.span(0, 4, 1601)
    q = 0.8 * Bump(1.6, 1.2)(grid.times)
    qp = 0.5 * Bump(2.0, 1.4)(grid.times)
    for include in ("standard", "all"):
        v = s_tilde_config(q, qp, grid, 0.3, 1.1, include, "central")
        print(f"S~ ({include:8s}): S0 = {v.order0:.6f}, lam S1 = {v.order1:.3e}, lam^2 S2 = {v.order2:.3e}")

    C = GaussianWindow((0, 1), (0.3, -0.2), (0.8, 1.1))
    D = GaussianWindow((0.5, 1), (-0.1, 0.4), (0.9, 0.7))
    print("\n lambda    Gaussian-window d(C,D)        Fock d(C,D)              |diff|")
    for lam in (0.0, 1e-3, 1e-2, 5e-2):
        p = ModelParams(1.2, lam=lam)
        a = coarse_grain_gaussian_windows(C, D, p, (0.2, 0.9))
        b = decoherence_fock(C, D, p, (0.2, 0.9))
        print(f" {lam:<8g} {a:.10f}  {b:.10f}  {abs(a - b):.2e}")
    print(f"\n|d(C,D)|^2 / (d(C,C) d(D,D)) at lambda = 0: "
          f"{np.abs(coarse_grain_gaussian_windows(C, D)) ** 2 / (coarse_grain_gaussian_windows(C, C) * coarse_grain_gaussian_windows(D, D)).real:.4f}")


if __name__ == "__main__":
    main()
