"""Batch studies behind the command-line tools: oracle comparison and continuum convergence."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import distribution, gaussian
from .core import BranchHistory, ModelParams, TimeGrid
from .errors import PreconditionError
from .paths import band_limited_branch

DEFAULT_CASES = ((1, 0), (1, 1), (2, 1), (2, 2), (3, 3))
DEFAULT_S = (0.0, 0.5, 1.0)
DEFAULT_BETAS = (0j, 0.3 + 0.2j)


def random_branch(rng, n: int, max_abs: float = 1.0) -> BranchHistory | None:
    """Labels uniform in the disc ``|alpha| <= max_abs`` on a random uniform grid."""
    if n == 0:
        return None
    r = max_abs * np.sqrt(rng.uniform(size=n))
    phase = rng.uniform(0, 2 * np.pi, size=n)
    grid = TimeGrid(float(rng.uniform(-1, 1)), float(rng.uniform(0.1, 0.6)), n)
    return BranchHistory(grid, r * np.exp(1j * phase))


@dataclass(frozen=True)
class CompareRow:
    n: int
    m: int
    s: float
    beta: complex
    draw: int
    closed: complex
    oracle: complex

    @property
    def rel_err(self) -> float:
        return float(abs(self.closed - self.oracle) / abs(self.oracle))


def oracle_compare(
    cases=DEFAULT_CASES,
    s_values=DEFAULT_S,
    draws: int = 20,
    betas=DEFAULT_BETAS,
    seed: int = 1234,
    omega: float = 1.0,
    variant: str = "adjudicated",
    budget_seconds: float | None = None,
):
    """Closed form (times its normalisation) against the Gaussian-integral oracle.

    Returns ``(rows, over_budget)``.
    """
    rng = np.random.default_rng(seed)
    rows = []
    start = time.perf_counter()
    for n, m in cases:
        if n > 3 or m > 3 or n < 0 or m < 0:
            raise PreconditionError("oracle comparison supports branch lengths up to 3")
        for s in s_values:
            for beta in betas:
                params = ModelParams(omega=omega, beta=beta)
                for d in range(draws):
                    b, bp = random_branch(rng, n), random_branch(rng, m)
                    closed = distribution.normalization(n + m, s) * distribution.w_two_branch(
                        b, bp, s, params, variant
                    )
                    oracle = gaussian.oracle_two_branch(b, bp, s, params)
                    rows.append(CompareRow(n, m, float(s), complex(beta), d, closed, oracle))
                    if budget_seconds is not None and time.perf_counter() - start > budget_seconds:
                        return rows, True
    return rows, False


@dataclass(frozen=True)
class ConvergenceResult:
    rep: str
    n_values: tuple
    dts: tuple
    errors: tuple
    order: float | None

    @property
    def degenerate(self) -> bool:
        return self.order is None


def fit_order(dts, errors) -> float | None:
    """Least-squares slope of ``log(error)`` against ``log(dt)``; None if any error is zero."""
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0):
        return None
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])


def convergence_study(
    rep: str = "q",
    n_values=(100, 200, 400),
    t_end: float = 1.0,
    modes: int = 3,
    amplitude: float = 0.3,
    seed: int = 7,
    params: ModelParams = ModelParams(),
    ref_factor: int = 16,
) -> ConvergenceResult:
    """Discrete distribution against its continuum limit for shrinking ``dt``.

    Both branches are band-limited paths on ``[0, t_end]``; the reference is the
    continuum evaluator on a grid ``ref_factor`` times finer than the finest one.
    """
    if rep not in ("q", "wigner"):
        raise PreconditionError("rep must be 'q' or 'wigner'")
    n_values = tuple(int(n) for n in n_values)
    if len(n_values) < 2:
        raise PreconditionError("a convergence study needs at least two resolutions")
    if rep == "wigner" and any(n % 2 for n in n_values):
        raise PreconditionError("the Wigner continuum limit needs an even number of points per branch")
    span = (0.0, float(t_end))

    def branches(n):
        grid = TimeGrid.span(0.0, t_end, n)
        b = band_limited_branch(grid, modes, amplitude, seed, span)
        bp = band_limited_branch(grid, modes, amplitude, seed + 1, span)
        return b, bp

    if rep == "q":
        disc, cont = distribution.log_w_q_discrete, distribution.log_w_q_continuum
    else:
        disc, cont = distribution.log_w_wigner_discrete, distribution.log_w_wigner_continuum
    n_ref = ref_factor * max(n_values)
    n_ref += n_ref % 2
    ref = cont(*branches(n_ref), params)
    dts, errors = [], []
    for n in n_values:
        dts.append(t_end / (n - 1))
        errors.append(abs(disc(*branches(n), params) - ref))
    return ConvergenceResult(rep, n_values, tuple(dts), tuple(errors), fit_order(dts, errors))
