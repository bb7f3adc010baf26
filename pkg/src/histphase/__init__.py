"""Phase-space distributions and closed-time-path functionals for oscillator histories."""

import os as _os

# HISTPHASE_THREADS caps BLAS/OpenMP threads; it only takes effect when this
# package is imported before numpy (as the command-line entry point does).
if _os.environ.get("HISTPHASE_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["HISTPHASE_THREADS"])

from . import core, ctp, distribution, fock, gaussian, io, perturbation
from .core import (
    BranchHistory,
    ModelParams,
    PhaseSpacePath,
    SourcePath,
    SParam,
    TimeGrid,
)
from .errors import (
    DivergenceError,
    GridMismatchError,
    HistoriesError,
    PreconditionError,
    TruncationError,
    TruncationWarning,
)

__version__ = "0.1.0"

__all__ = [
    "BranchHistory",
    "DivergenceError",
    "GridMismatchError",
    "HistoriesError",
    "ModelParams",
    "PhaseSpacePath",
    "PreconditionError",
    "SParam",
    "SourcePath",
    "TimeGrid",
    "TruncationError",
    "TruncationWarning",
    "core",
    "ctp",
    "distribution",
    "fock",
    "gaussian",
    "io",
    "perturbation",
]
