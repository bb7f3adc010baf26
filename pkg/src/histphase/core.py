"""Shared domain types: time grids, branches, paths, coordinate maps, actions.

All types are frozen dataclasses holding read-only numpy arrays, so they can
be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .errors import DivergenceError, GridMismatchError, PreconditionError

__all__ = [
    "TimeGrid",
    "BranchHistory",
    "PhaseSpacePath",
    "SourcePath",
    "ModelParams",
    "SParam",
    "coords_to_complex",
    "complex_to_coords",
    "dual_coords_to_complex",
    "complex_to_dual_coords",
    "time_derivative",
    "action_phase_space",
    "action_config",
]


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_i = t0 + i*dt`` for ``i = 0..n-1``."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not self.n >= 1:
            raise PreconditionError(f"grid needs n >= 1, got {self.n}")
        if not self.dt > 0:
            raise PreconditionError(f"grid needs dt > 0, got {self.dt}")

    @classmethod
    def span(cls, t_start: float, t_end: float, n: int) -> "TimeGrid":
        """Grid with ``n`` points covering ``[t_start, t_end]`` inclusive."""
        if n < 2:
            raise PreconditionError("span() needs at least two points")
        return cls(float(t_start), (float(t_end) - float(t_start)) / (n - 1), int(n))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.n - 1)

    def same_as(self, other: "TimeGrid", rtol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.t0), abs(other.t0))
        return (
            self.n == other.n
            and abs(self.t0 - other.t0) <= rtol * scale
            and abs(self.dt - other.dt) <= rtol * max(self.dt, other.dt)
        )


@dataclass(frozen=True)
class BranchHistory:
    """One time-ordered branch of complex phase-space labels."""

    grid: TimeGrid
    alphas: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.alphas, complex)
        if arr.size != self.grid.n:
            raise PreconditionError(
                f"branch has {arr.size} labels for a grid of {self.grid.n} points"
            )
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("branch labels must be finite")
        object.__setattr__(self, "alphas", arr)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def n(self) -> int:
        return self.grid.n

    @classmethod
    def from_phase_space(cls, path: "PhaseSpacePath", omega: float) -> "BranchHistory":
        return cls(path.grid, coords_to_complex(path.q, path.p, omega))

    def to_phase_space(self, omega: float) -> "PhaseSpacePath":
        q, p = complex_to_coords(self.alphas, omega)
        return PhaseSpacePath(self.grid, q, p)


@dataclass(frozen=True)
class PhaseSpacePath:
    grid: TimeGrid
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _frozen(self.q, float)
        p = _frozen(self.p, float)
        if q.size != self.grid.n or p.size != self.grid.n:
            raise PreconditionError("q and p must both have one entry per grid point")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise PreconditionError("path entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class SourcePath:
    """Position source ``xi`` and momentum source ``chi`` on a grid."""

    grid: TimeGrid
    xi: np.ndarray
    chi: np.ndarray = field(default=None)

    def __post_init__(self):
        xi = _frozen(self.xi, float)
        chi = np.zeros_like(xi) if self.chi is None else _frozen(self.chi, float)
        if xi.size != self.grid.n or chi.size != self.grid.n:
            raise PreconditionError("xi and chi must both have one entry per grid point")
        chi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "chi", chi)

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "SourcePath":
        return cls(grid, np.zeros(grid.n), np.zeros(grid.n))

    def negated(self) -> "SourcePath":
        return SourcePath(self.grid, -self.xi, -self.chi)


@dataclass(frozen=True)
class ModelParams:
    """Oscillator frequency, quartic coupling and coherent label of the initial state."""

    omega: float = 1.0
    lam: float = 0.0
    beta: complex = 0j

    def __post_init__(self):
        if not self.omega > 0:
            raise PreconditionError(f"omega must be positive, got {self.omega}")
        if self.lam < 0:
            raise PreconditionError(f"quartic coupling must be >= 0, got {self.lam}")
        object.__setattr__(self, "beta", complex(self.beta))


@dataclass(frozen=True)
class SParam:
    """Ordering parameter of the operator-symbol map (1: Q, 0: Wigner, -1: P)."""

    s: float

    def __post_init__(self):
        if self.s <= -1:
            raise DivergenceError(
                f"s = {self.s}: the P representation (s = -1) and anything below it "
                "has no convergent phase-space distribution for histories"
            )

    @classmethod
    def coerce(cls, s) -> "SParam":
        return s if isinstance(s, SParam) else cls(float(s))


def _check_omega(omega):
    if not omega > 0:
        raise PreconditionError(f"omega must be positive, got {omega}")


def coords_to_complex(q, p, omega):
    """``alpha = sqrt(omega/2) q + i p / sqrt(2 omega)``."""
    _check_omega(omega)
    return np.sqrt(omega / 2) * np.asarray(q) + 1j * np.asarray(p) / np.sqrt(2 * omega)


def complex_to_coords(alpha, omega):
    _check_omega(omega)
    alpha = np.asarray(alpha)
    return np.sqrt(2 / omega) * alpha.real, np.sqrt(2 * omega) * alpha.imag


def dual_coords_to_complex(xi, chi, omega):
    """``z = -sqrt(omega/2) chi + i xi / sqrt(2 omega)``.

    With this choice the operator identity ``i (xi q + chi p) = z a^dag - z^* a``
    holds, while for c-numbers ``-z alpha^* + z^* alpha = -i (q xi + p chi)``.
    """
    _check_omega(omega)
    return -np.sqrt(omega / 2) * np.asarray(chi) + 1j * np.asarray(xi) / np.sqrt(2 * omega)


def complex_to_dual_coords(z, omega):
    _check_omega(omega)
    z = np.asarray(z)
    return np.sqrt(2 * omega) * z.imag, -np.sqrt(2 / omega) * z.real


def time_derivative(values, dt, scheme="forward"):
    """Derivative of uniformly sampled values.

    ``forward`` uses ``(x[i+1]-x[i])/dt`` with a backward difference at the
    last point; ``central`` uses second-order central differences
    (one-sided second order at the ends).
    """
    values = np.asarray(values)
    if values.size < 2:
        raise PreconditionError("need at least two samples to differentiate")
    if scheme == "forward":
        out = np.empty_like(values)
        out[:-1] = np.diff(values) / dt
        out[-1] = out[-2]
        return out
    if scheme == "central":
        return np.gradient(values, dt, edge_order=2 if values.size > 2 else 1)
    raise PreconditionError(f"unknown derivative scheme {scheme!r}")


def action_phase_space(path: PhaseSpacePath, omega: float, scheme: str = "forward") -> float:
    """Trapezoidal ``S = int dt [p qdot - (p^2 + omega^2 q^2)/2]``."""
    _check_omega(omega)
    if path.grid.n < 2:
        raise PreconditionError("action needs at least two grid points")
    qdot = time_derivative(path.q, path.grid.dt, scheme)
    integrand = path.p * qdot - 0.5 * (path.p**2 + omega**2 * path.q**2)
    return float(trapezoid(integrand, dx=path.grid.dt))


def action_config(q, grid: TimeGrid, omega: float, scheme: str = "forward") -> float:
    """Trapezoidal ``S = 1/2 int dt (qdot^2 - omega^2 q^2)``."""
    _check_omega(omega)
    q = np.asarray(q, dtype=float)
    if grid.n < 2:
        raise PreconditionError("action needs at least two grid points")
    if q.size != grid.n:
        raise GridMismatchError("path length does not match grid")
    qdot = time_derivative(q, grid.dt, scheme)
    return float(trapezoid(0.5 * (qdot**2 - omega**2 * q**2), dx=grid.dt))
