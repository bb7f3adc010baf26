"""Smooth test paths: band-limited branches and compactly supported bumps."""

from __future__ import annotations

import numpy as np

from .core import BranchHistory, PhaseSpacePath, TimeGrid
from .ctp import Bump


def band_limited_alpha(t, t_start: float, t_end: float, modes: int = 3,
                       amplitude: float = 0.3, seed: int = 0):
    """Sum of a few low Fourier modes on ``[t_start, t_end]`` with random complex weights."""
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=(modes + 1, 2)) @ np.array([1.0, 1j])
    coeffs *= amplitude / np.sqrt(modes + 1)
    x = (np.asarray(t, dtype=float) - t_start) / (t_end - t_start)
    k = np.arange(modes + 1)
    return np.cos(np.pi * np.outer(x, k)) @ coeffs


def band_limited_branch(grid: TimeGrid, modes: int = 3, amplitude: float = 0.3,
                        seed: int = 0, span=None) -> BranchHistory:
    """Branch sampled from :func:`band_limited_alpha`.

    ``span`` fixes the interval the modes live on (default: the grid itself),
    so grids of different resolution sample the same continuous path.
    """
    t0, t1 = span if span is not None else (grid.t0, grid.t_end)
    return BranchHistory(grid, band_limited_alpha(grid.times, t0, t1, modes, amplitude, seed))


def bump_path(grid: TimeGrid, center: float, width: float, q_amp: float,
              p_amp: float = 0.0, p_shift: float = 0.0) -> PhaseSpacePath:
    """Phase-space path ``q = q_amp * bump``, ``p = p_amp * bump(shifted)``; both vanish outside the support."""
    t = grid.times
    q = q_amp * Bump(center, width)(t)
    p = p_amp * Bump(center + p_shift, width)(t)
    return PhaseSpacePath(grid, q, p)
