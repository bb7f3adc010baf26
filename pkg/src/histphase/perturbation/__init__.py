"""Quartic-oscillator perturbation theory on the closed time path."""

from .coarse import GaussianWindow, coarse_grain_gaussian_windows, decoherence_fock
from .exact import GaussQ
from .numeric import (
    PerturbativeValue,
    effective_action_tree,
    kernel_value,
    s_tilde_config,
    s_tilde_phase,
)
from .wick import (
    PRIMED,
    UNPRIMED,
    PathKernel,
    PerturbativeExponent,
    SourceKernelExpansion,
    apply_quartic_vertex,
    connected_exponent,
    connected_expansion,
    expand_z,
    render_kernel,
)

__all__ = [
    "GaussQ",
    "GaussianWindow",
    "PRIMED",
    "UNPRIMED",
    "PathKernel",
    "PerturbativeExponent",
    "PerturbativeValue",
    "SourceKernelExpansion",
    "apply_quartic_vertex",
    "coarse_grain_gaussian_windows",
    "connected_expansion",
    "connected_exponent",
    "decoherence_fock",
    "effective_action_tree",
    "expand_z",
    "kernel_value",
    "render_kernel",
    "s_tilde_config",
    "s_tilde_phase",
]
