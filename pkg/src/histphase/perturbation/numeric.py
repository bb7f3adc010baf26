"""Numerical values of the perturbative exponent on sampled paths.

``d[q, q'] = exp(i S~[q, q'])`` with ``S~ = S~_0 + lambda S~_1 + lambda^2 S~_2``.
The kernels come from :func:`histphase.perturbation.wick.connected_exponent`;
nothing about their coefficients is hard-coded here.  Two-vertex kernels are
double integrals of powers of a Green's function; they are evaluated in O(n)
through :func:`histphase.ctp.separable_double` and
:func:`histphase.ctp.ordered_double`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import trapezoid

from ..core import PhaseSpacePath, TimeGrid, action_config, action_phase_space
from ..ctp import dyson, feynman, ordered_double, separable_double
from ..errors import GridMismatchError, PreconditionError
from .wick import PRIMED, UNPRIMED, PathKernel, connected_exponent

INCLUDE = ("standard", "all")


@lru_cache(maxsize=None)
def _exponent():
    return connected_exponent(2)


@dataclass(frozen=True)
class PerturbativeValue:
    """Contributions to ``S~``; ``order1`` and ``order2`` include their powers of lambda."""

    order0: complex
    order1: complex
    order2: complex

    @property
    def total(self) -> complex:
        return self.order0 + self.order1 + self.order2

    @property
    def log_d(self) -> complex:
        return 1j * self.total

    def to_dict(self) -> dict:
        out = {}
        for name in ("order0", "order1", "order2", "total"):
            v = complex(getattr(self, name))
            out[name] = {"re": v.real, "im": v.imag}
        return out


def _check_paths(q, qp, grid: TimeGrid):
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    if q.size != grid.n or qp.size != grid.n:
        raise GridMismatchError("paths must both be sampled on the given grid")
    ends = max(abs(q[0]), abs(q[-1]), abs(qp[0]), abs(qp[-1]))
    if ends > 1e-8:
        warnings.warn(
            "paths do not vanish at the grid ends; the nonlocal kernels assume compact support",
            stacklevel=3,
        )
    return q, qp


def kernel_value(kernel: PathKernel, q, qp, grid: TimeGrid, omega: float) -> complex:
    """Value of one kernel's contribution to ``i S~`` (without the power of lambda)."""
    fields = [q if b == UNPRIMED else qp for b in kernel.types]
    integrands = [np.asarray(f, dtype=float) ** p for f, p in zip(fields, kernel.powers)]
    const = complex(kernel.coeff)
    links = []
    for kind, i, j in kernel.props:
        if i == j:
            const *= complex(feynman(0.0, omega) if kind == "F" else dyson(0.0, omega))
        else:
            links.append((kind, i, j))
    if kernel.order == 1:
        return const * trapezoid(integrands[0], dx=grid.dt)
    if kernel.order != 2:
        raise PreconditionError("only one- and two-vertex kernels are supported")
    if not links:
        return const * trapezoid(integrands[0], dx=grid.dt) * trapezoid(integrands[1], dx=grid.dt)
    kinds = {k for k, _, _ in links}
    if len(kinds) != 1:
        raise PreconditionError("mixed Green's functions between one vertex pair")
    kind = kinds.pop()
    k = len(links)
    _, i, j = links[0]
    f, g = integrands[i], integrands[j]
    if kind == "P":
        # D_+(t_i - t_j)^k = (-i/2w)^k exp(i k w (t_i - t_j))
        val = (-0.5j / omega) ** k * separable_double(f, g, grid, -k * omega)
    elif kind == "F":
        val = (-0.5j / omega) ** k * ordered_double(f, g, grid.dt, k * omega)
    else:
        val = (0.5j / omega) ** k * ordered_double(f, g, grid.dt, -k * omega)
    return const * val


def _selected(order: int, include: str):
    if include not in INCLUDE:
        raise PreconditionError(f"include must be one of {INCLUDE}")
    kernels = _exponent().kernels(order)
    if include == "standard":
        wanted = "local" if order == 1 else "cross"
        kernels = [k for k in kernels if k.category() == wanted]
    return kernels


def correction_terms(q, qp, grid: TimeGrid, lam: float, omega: float, include: str = "standard"):
    """``(lambda S~_1, lambda^2 S~_2)`` for configuration paths ``q``, ``q'``."""
    q, qp = _check_paths(q, qp, grid)
    out = []
    for order in (1, 2):
        i_s = sum(kernel_value(k, q, qp, grid, omega) for k in _selected(order, include))
        out.append(complex(-1j * lam**order * i_s))
    return tuple(out)


def s_tilde_config(
    q,
    q_prime,
    grid: TimeGrid,
    lam: float,
    omega: float = 1.0,
    include: str = "standard",
    scheme: str = "forward",
) -> PerturbativeValue:
    """``S~[q, q']`` through second order in the coupling.

    ``include="standard"`` keeps the local first-order kernel and the three
    cross-branch second-order kernels; ``"all"`` adds the same-branch and
    tadpole kernels produced by the expansion.
    """
    if lam < 0:
        raise PreconditionError("quartic coupling must be >= 0")
    q, qp = _check_paths(q, q_prime, grid)
    s0 = action_config(q, grid, omega, scheme) - action_config(qp, grid, omega, scheme)
    s1, s2 = correction_terms(q, qp, grid, lam, omega, include)
    return PerturbativeValue(complex(s0), s1, s2)


def s_tilde_phase(
    path: PhaseSpacePath,
    path_prime: PhaseSpacePath,
    lam: float,
    omega: float = 1.0,
    include: str = "standard",
    scheme: str = "forward",
) -> PerturbativeValue:
    """Phase-space version: free part ``S[q,p] - S[q',p']``, kernels in ``q`` only."""
    if lam < 0:
        raise PreconditionError("quartic coupling must be >= 0")
    if not path.grid.same_as(path_prime.grid):
        raise GridMismatchError("both paths must live on the same grid")
    s0 = action_phase_space(path, omega, scheme) - action_phase_space(path_prime, omega, scheme)
    s1, s2 = correction_terms(path.q, path_prime.q, path.grid, lam, omega, include)
    return PerturbativeValue(complex(s0), s1, s2)


def effective_action_tree(
    q,
    q_prime,
    grid: TimeGrid,
    lam: float,
    omega: float = 1.0,
    scheme: str = "forward",
) -> dict:
    """Tree-level closed-time-path effective action and the first-order loop part.

    ``tree = S[q] - S[q'] - (lambda/4!) int (q^4 - q'^4)``.  The one-loop
    first-order part (the ``D_F(0) q^2`` and ``D_D(0) q'^2`` tadpoles) is
    reported separately under ``one_loop``.
    """
    q, qp = _check_paths(q, q_prime, grid)
    s0 = action_config(q, grid, omega, scheme) - action_config(qp, grid, omega, scheme)
    tree = complex(s0)
    loop = 0j
    for k in _exponent().kernels(1):
        val = -1j * lam * kernel_value(k, q, qp, grid, omega)
        if k.category() == "local":
            tree += val
        else:
            loop += val
    return {
        "tree": tree,
        "one_loop": loop,
        "delta_f0": complex(feynman(0.0, omega)),
        "delta_d0": complex(dyson(0.0, omega)),
    }
