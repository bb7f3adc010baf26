"""Truncated Fock-space oracle.

Dense matrices on the number basis ``|0>..|N-1>``.  Nothing here uses any
closed-form Gaussian algebra: displacements are matrix exponentials, time
evolution is ``exp(iHt) X exp(-iHt)`` and traces are taken numerically.  The
rest of the package is checked against these routines.

Convention fixed by this module (see CONVENTIONS.md): with ``H = omega a^dag a``,
``exp(iHt) U(z) exp(-iHt) = U(exp(i omega t) z)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm

from .core import ModelParams, SourcePath, dual_coords_to_complex
from .errors import PreconditionError, TruncationError, TruncationWarning

DEFAULT_DIM = 64
CHECK_EXTRA = 32
CHECK_TOL = 1e-10


@dataclass(frozen=True)
class FockConfig:
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        if self.dim < 2:
            raise PreconditionError("Fock truncation needs dim >= 2")

    def enlarged(self, extra: int = CHECK_EXTRA) -> "FockConfig":
        return FockConfig(self.dim + extra)


def ladder_ops(cfg: FockConfig):
    """Annihilation and creation operators, ``a|n> = sqrt(n)|n-1>``."""
    a = np.diag(np.sqrt(np.arange(1, cfg.dim, dtype=float)), k=1).astype(complex)
    return a, a.conj().T.copy()


def number_op(cfg: FockConfig) -> np.ndarray:
    return np.diag(np.arange(cfg.dim, dtype=float)).astype(complex)


def position_op(cfg: FockConfig, omega: float) -> np.ndarray:
    a, ad = ladder_ops(cfg)
    return (a + ad) / np.sqrt(2 * omega)


def momentum_op(cfg: FockConfig, omega: float) -> np.ndarray:
    a, ad = ladder_ops(cfg)
    return 1j * np.sqrt(omega / 2) * (ad - a)


def sho_hamiltonian(cfg: FockConfig, omega: float) -> np.ndarray:
    """Normal-ordered ``H = omega a^dag a``."""
    return omega * number_op(cfg)


def _warn_amplitude(z, cfg):
    if abs(z) ** 2 > cfg.dim / 8:
        warnings.warn(
            f"|z|^2 = {abs(z) ** 2:.3g} is not small against dim = {cfg.dim}",
            TruncationWarning,
            stacklevel=3,
        )


def displacement(z: complex, cfg: FockConfig) -> np.ndarray:
    """Weyl operator ``U(z) = exp(z a^dag - z^* a)``."""
    z = complex(z)
    _warn_amplitude(z, cfg)
    if z == 0:
        return np.eye(cfg.dim, dtype=complex)
    a, ad = ladder_ops(cfg)
    return expm(z * ad - np.conj(z) * a)


def coherent_ket(beta: complex, cfg: FockConfig) -> np.ndarray:
    vac = np.zeros(cfg.dim, dtype=complex)
    vac[0] = 1.0
    return displacement(beta, cfg) @ vac


def coherent_state(beta: complex, cfg: FockConfig) -> np.ndarray:
    """Density matrix ``|beta><beta|``."""
    ket = coherent_ket(beta, cfg)
    return np.outer(ket, ket.conj())


def _check_hermitian(H):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise PreconditionError("Hamiltonian must be a square matrix")
    if not np.allclose(H, H.conj().T, atol=1e-12 * max(1.0, np.abs(H).max())):
        raise PreconditionError("Hamiltonian must be Hermitian")
    return H


class _Propagator:
    """Caches the eigendecomposition of H so ``exp(iHt)`` is cheap."""

    def __init__(self, H):
        H = _check_hermitian(H)
        self.energies, self.vectors = eigh(H)

    def forward(self, t):
        """``exp(iHt)``."""
        return (self.vectors * np.exp(1j * self.energies * t)) @ self.vectors.conj().T


def evolve_heisenberg(op, t: float, H) -> np.ndarray:
    """``exp(iHt) op exp(-iHt)``."""
    op = np.asarray(op, dtype=complex)
    if t == 0:
        _check_hermitian(H)
        return op.copy()
    prop = _Propagator(H)
    u = prop.forward(t)
    return u @ op @ u.conj().T


def weyl_string_trace(rho0, string, H) -> complex:
    """``Tr[rho0 prod_k exp(iH t_k) U(z_k) exp(-iH t_k)]`` in the given order.

    ``string`` is a sequence of ``(z, t)`` pairs, leftmost factor first.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    cfg = FockConfig(dim)
    prop = _Propagator(H)
    acc = np.eye(dim, dtype=complex)
    for z, t in string:
        u = prop.forward(t)
        acc = acc @ (u @ displacement(z, cfg) @ u.conj().T)
    return complex(np.trace(rho0 @ acc))


def _checked(fn, cfg: FockConfig, check: bool, tol: float = CHECK_TOL):
    value = fn(cfg)
    if check:
        bigger = fn(cfg.enlarged())
        if abs(bigger - value) > tol * max(1.0, abs(value)):
            raise TruncationError(
                f"result moved by {abs(bigger - value):.3e} between dim={cfg.dim} "
                f"and dim={cfg.dim + CHECK_EXTRA}"
            )
    return value


def coherent_weyl_trace(
    beta: complex,
    string,
    omega: float,
    cfg: FockConfig = FockConfig(),
    check: bool = True,
) -> complex:
    """Weyl-string trace against ``|beta><beta|`` for the SHO, with truncation control."""

    def run(c):
        return weyl_string_trace(coherent_state(beta, c), string, sho_hamiltonian(c, omega))

    return _checked(run, cfg, check)


def _ordered_action(vec, prop_energies, sources: SourcePath, omega, cfg, reverse):
    """Apply ``exp(i dt X(t_k))`` factors to ``vec`` (earliest first unless reverse)."""
    a, ad = ladder_ops(cfg)
    dt = sources.grid.dt
    times = sources.grid.times
    order = range(sources.grid.n - 1, -1, -1) if reverse else range(sources.grid.n)
    zs = dual_coords_to_complex(sources.xi, sources.chi, omega) * dt
    for k in order:
        z = zs[k]
        if z == 0:
            continue
        t = times[k]
        phase = np.exp(1j * prop_energies * t)
        # exp(iHt) U(z) exp(-iHt) applied to vec, H diagonal in the number basis
        vec = phase * (expm(z * ad - np.conj(z) * a) @ (vec / phase))
    return vec


def ctp_z_fock(
    sources: SourcePath,
    sources_prime: SourcePath,
    params: ModelParams = ModelParams(),
    cfg: FockConfig = FockConfig(),
    check: bool = True,
) -> complex:
    """Closed-time-path generating functional as a product of Weyl factors.

    ``Z = <beta| Tbar[prod_j exp(i dt X'(t'_j))] T[prod_i exp(i dt X(t_i))] |beta>``
    with ``X = xi q + chi p`` in the Heisenberg picture of ``H = omega a^dag a``.
    The unprimed (time-ordered) string acts first on the initial state.
    """
    omega = params.omega
    if abs(sources.grid.t_end - sources_prime.grid.t_end) > 1e-12 * max(
        1.0, abs(sources.grid.t_end)
    ):
        raise PreconditionError("both branches must share the final time")
    # total displacement a branch can accumulate
    amp = max(
        np.sum(np.abs(dual_coords_to_complex(sp.xi, sp.chi, omega))) * sp.grid.dt
        for sp in (sources, sources_prime)
    )
    if (amp + abs(params.beta)) ** 2 > cfg.dim / 8:
        warnings.warn(
            "source amplitudes push the coherent amplitude near the truncation",
            TruncationWarning,
            stacklevel=2,
        )

    def run(c):
        energies = omega * np.arange(c.dim, dtype=float)
        psi = coherent_ket(params.beta, c)
        vec = _ordered_action(psi, energies, sources, omega, c, reverse=False)
        vec = _ordered_action(vec, energies, sources_prime, omega, c, reverse=True)
        return complex(np.vdot(psi, vec))

    return _checked(run, cfg, check)


def two_point_fock(kind_a: str, t_a: float, kind_b: str, t_b: float, omega: float,
                   cfg: FockConfig = FockConfig()) -> complex:
    """Vacuum Wightman function ``<0| X_a(t_a) X_b(t_b) |0>`` with ``X in {q, p}``."""
    H = sho_hamiltonian(cfg, omega)
    ops = {"q": position_op(cfg, omega), "p": momentum_op(cfg, omega)}
    xa = evolve_heisenberg(ops[kind_a], t_a, H)
    xb = evolve_heisenberg(ops[kind_b], t_b, H)
    return complex((xa @ xb)[0, 0])
