"""Closed-time-path generating functional of the free oscillator.

Compares the Green's-function closed form with a brute-force product of
Weyl operators in a truncated Fock space, then extracts the equal-time
contact term of the time-ordered momentum correlator.
"""

import time

from scipy.integrate import trapezoid

from histphase import ctp, fock
from histphase.core import ModelParams, SourcePath, TimeGrid


def main():
    omega = 1.0
    grid = TimeGrid.span(0.0, 3.0, 3001)
    t = grid.times
    J = SourcePath(grid, 0.8 * ctp.Bump(1.0, 0.6)(t), 0.5 * ctp.Bump(1.5, 0.7)(t))
    Jp = SourcePath(grid, -0.6 * ctp.Bump(1.8, 0.5)(t), 0.3 * ctp.Bump(1.2, 0.6)(t))

    start = time.perf_counter()
    closed = ctp.ctp_z_phase(J, Jp, omega, "central")
    mid = time.perf_counter()
    brute = fock.ctp_z_fock(J, Jp, ModelParams(omega), fock.FockConfig(64))
    end = time.perf_counter()
    print(f"closed form  Z = {closed:.10f}  ({mid - start:.3f} s)")
    print(f"Fock product Z = {brute:.10f}  ({end - mid:.1f} s)")
    print(f"Z[J, -J] = {ctp.ctp_z_phase(J, J.negated(), omega):.3g}")

    fine = TimeGrid.span(-2, 2, 16001)
    f, g = ctp.Bump(0.0, 0.8), ctp.Bump(0.2, 0.8)
    contact = trapezoid(f(fine.times) * g(fine.times), dx=fine.dt)
    for branch, label in ((0, "time-ordered"), (1, "anti-time-ordered")):
        pp = ctp.correlation_smeared_fd(
            [(branch, "p", f(fine.times)), (branch, "p", g(fine.times))], fine, omega, h=1e-3
        )
        w = omega if branch == 0 else -omega
        conv = ctp.ordered_double(f.d1(fine.times), g.d1(fine.times), fine.dt, w) / (2 * omega)
        print(f"{label:18s} <pp> - smeared ddG = {(pp - conv) / contact:.6f} x int f g")


if __name__ == "__main__":
    main()
