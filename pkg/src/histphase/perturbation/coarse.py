"""Decoherence functional for Gaussian-window coarse-grainings.

A history ``C`` is a list of time slices ``t_j`` with windows
``P_j(q) = exp(-(q - c_j)^2 / (2 sigma_j^2))``.  Writing each window as a
Fourier superposition ``P_j(q) = int dk w_j(k) exp(i k q)`` with
``w_j(k) = sigma_j/sqrt(2 pi) exp(-sigma_j^2 k^2/2 - i k c_j)`` turns

    d(C, D) = Tr(C_C rho0 C_D^dag),   C_X = T[prod_j P_j(q(t_j))]

into a finite Gaussian integral of the free closed-time-path functional with
point sources.  A first-order quartic insertion is added as Gaussian moments
of the vertex legs over a finite interaction window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import expm

from .. import fock
from ..core import ModelParams
from ..ctp import dyson, feynman, wightman
from ..errors import PreconditionError
from ..gaussian import GaussianForm, evaluate


@dataclass(frozen=True)
class GaussianWindow:
    """Gaussian windows on position at the given times (``inf`` width: no constraint)."""

    times: tuple
    centers: tuple
    widths: tuple

    def __post_init__(self):
        t = tuple(float(x) for x in self.times)
        c = tuple(float(x) for x in self.centers)
        w = tuple(float(x) for x in self.widths)
        if not (len(t) == len(c) == len(w)):
            raise PreconditionError("times, centers and widths must have equal length")
        if any(not x > 0 for x in w):
            raise PreconditionError("window widths must be positive")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise PreconditionError("window times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "widths", w)

    def active(self):
        """Slices with finite width."""
        return [(t, c, w) for t, c, w in zip(self.times, self.centers, self.widths) if np.isfinite(w)]


def _form(C: GaussianWindow, D: GaussianWindow, omega: float):
    a = C.active()
    b = D.active()
    ta = np.array([x[0] for x in a])
    tb = np.array([x[0] for x in b])
    na, nb = ta.size, tb.size
    M = np.zeros((na + nb, na + nb), dtype=complex)
    if na:
        M[:na, :na] = 1j * feynman(ta[:, None] - ta[None, :], omega)
        M[:na, :na] += np.diag([x[2] ** 2 for x in a])
    if nb:
        M[na:, na:] = -1j * dyson(tb[:, None] - tb[None, :], omega)
        M[na:, na:] += np.diag([x[2] ** 2 for x in b])
    if na and nb:
        cross = 1j * wightman(ta[:, None] - tb[None, :], omega)
        M[:na, na:] = cross
        M[na:, :na] = cross.T
    L = -1j * np.array([x[1] for x in a] + [x[1] for x in b], dtype=complex)
    c = sum(np.log(x[2] / np.sqrt(2 * np.pi)) for x in a + b)
    return GaussianForm(M, L, c, measure_scale=1.0), ta, tb


def _legs(t, ta, tb, omega):
    """Coefficient vectors of the vertex legs ``dw/dJ(t)`` and ``dw/dJ'(t)``."""
    a = -1j * np.concatenate([feynman(t - ta, omega), wightman(t - tb, omega)])
    b = -1j * np.concatenate([wightman(ta - t, omega), -dyson(t - tb, omega)])
    return a, b


def coarse_grain_gaussian_windows(
    C: GaussianWindow,
    D: GaussianWindow,
    params: ModelParams = ModelParams(),
    interaction: tuple | None = None,
    n_quad: int = 801,
) -> complex:
    """``d(C, D)`` for the vacuum, exact at ``lambda = 0`` and first order in ``lambda``.

    ``interaction = (T0, T1)`` switches the quartic coupling on for
    ``T0 <= t <= T1``; it is required when ``params.lam > 0`` since the
    Wightman function does not decay.
    """
    if params.beta != 0:
        raise PreconditionError("coarse-graining is implemented for the vacuum initial state")
    omega = params.omega
    form, ta, tb = _form(C, D, omega)
    d0 = evaluate(form)
    if params.lam == 0:
        return d0
    if interaction is None:
        raise PreconditionError("a finite interaction window is needed when lambda > 0")
    if form.dim == 0:
        # no windows: d = Z[0,0] = 1 to every order
        return d0
    T0, T1 = map(float, interaction)
    if not T1 > T0:
        raise PreconditionError("interaction window must have T1 > T0")
    Minv = np.linalg.inv(form.M)
    mean = Minv @ form.L
    c_f = -1j * complex(feynman(0.0, omega))
    c_d = 1j * complex(dyson(0.0, omega))
    ts = np.linspace(T0, T1, n_quad)
    vals = np.empty(ts.size, dtype=complex)
    for k, t in enumerate(ts):
        la, lb = _legs(t, ta, tb, omega)
        mu_a, v_a = la @ mean, la @ Minv @ la
        mu_b, v_b = lb @ mean, lb @ Minv @ lb
        e4a = mu_a**4 + 6 * mu_a**2 * v_a + 3 * v_a**2
        e4b = mu_b**4 + 6 * mu_b**2 * v_b + 3 * v_b**2
        vals[k] = (e4a + 6 * c_f * (mu_a**2 + v_a)) - (e4b + 6 * c_d * (mu_b**2 + v_b))
    first = -1j / 24 * trapezoid(vals, ts)
    return complex(d0 * (1 + params.lam * first))


def decoherence_fock(
    C: GaussianWindow,
    D: GaussianWindow,
    params: ModelParams = ModelParams(),
    interaction: tuple | None = None,
    cfg: fock.FockConfig = fock.FockConfig(80),
    check: bool = True,
) -> complex:
    """Fock-space oracle: ``<0| C_D^dag C_C |0>`` with exact piecewise-constant evolution.

    The Hamiltonian is ``omega a^dag a + lambda q^4/4!`` inside the interaction
    window and ``omega a^dag a`` outside it.
    """
    if params.beta != 0:
        raise PreconditionError("the oracle is implemented for the vacuum initial state")
    omega, lam = params.omega, params.lam
    T0, T1 = interaction if interaction is not None else (0.0, 0.0)
    marks = sorted(set(C.times) | set(D.times) | {float(T0), float(T1)})
    t_start, t_end = marks[0], marks[-1]

    def run(c):
        H0 = fock.sho_hamiltonian(c, omega)
        q = fock.position_op(c, omega)
        H1 = H0 + lam / 24 * np.linalg.matrix_power(q, 4)
        evals, evecs = np.linalg.eigh(q)

        def window(center, width):
            f = np.exp(-((evals - center) ** 2) / (2 * width**2))
            return (evecs * f) @ evecs.conj().T

        def propagate(t_a, t_b):
            # split the step at the interaction boundaries
            cuts = [t_a] + [x for x in (T0, T1) if t_a < x < t_b] + [t_b]
            U = np.eye(c.dim, dtype=complex)
            for lo, hi in zip(cuts, cuts[1:]):
                mid = 0.5 * (lo + hi)
                H = H1 if (lam and T0 <= mid <= T1) else H0
                U = expm(-1j * H * (hi - lo)) @ U
            return U

        def chi(hist: GaussianWindow):
            psi = np.zeros(c.dim, dtype=complex)
            psi[0] = 1.0
            t_now = t_start
            for t, cen, wid in zip(hist.times, hist.centers, hist.widths):
                psi = propagate(t_now, t) @ psi
                t_now = t
                if np.isfinite(wid):
                    psi = window(cen, wid) @ psi
            return propagate(t_now, t_end) @ psi

        return complex(np.vdot(chi(D), chi(C)))

    return fock._checked(run, cfg, check, tol=1e-8)
