"""Discrete- and continuous-time phase-space distributions of SHO histories.

Every evaluator works in the log domain: ``log_w_*`` returns the exponent,
``w_*`` its exponential.  The discrete closed forms are normalised to one at
the origin (all labels and ``beta`` zero); the literal integral carries the
extra constant :func:`normalization`, ``(1+s)^-(n+m)`` for the 1/(2 pi)
per ``d^2 z`` measure.

Branch convention: ``w_two_branch(b, b')`` is ``Tr(C_b^dag rho0 C_b')`` with
``C`` the product of time-evolved representation operators, earliest
leftmost, and ``rho0 = |beta><beta|``.  Paths enter through the rotated labels
``a(t) = alpha(t) exp(i omega t)``.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import trapezoid

from .core import BranchHistory, ModelParams, PhaseSpacePath, SParam, action_phase_space
from .errors import GridMismatchError, PreconditionError

__all__ = [
    "coeff_A",
    "coefficient_table",
    "step",
    "normalization",
    "log_w_one_branch",
    "w_one_branch",
    "log_w_two_branch",
    "w_two_branch",
    "log_w_q_discrete",
    "w_q_discrete",
    "log_w_q_one_branch",
    "log_w_wigner_discrete",
    "w_wigner_discrete",
    "log_w_wigner_one_branch",
    "log_w_q_continuum",
    "w_q_continuum",
    "log_w_wigner_continuum",
    "w_wigner_continuum",
    "w_infinite_time",
]


def coeff_A(k: int, s) -> float:
    """Recursion coefficients: ``A_0 = -1``, ``A_1 = 1/(1+s)``,
    ``A_{k+1} = (1 - 2/(1+s)) A_k``."""
    if k < 0:
        raise PreconditionError("coefficient index must be >= 0")
    return float(coefficient_table(k, s)[k])


def coefficient_table(kmax: int, s) -> np.ndarray:
    s = SParam.coerce(s).s
    table = np.empty(kmax + 1)
    table[0] = -1.0
    if kmax >= 1:
        table[1] = 1.0 / (1.0 + s)
        ratio = 1.0 - 2.0 / (1.0 + s)
        for k in range(1, kmax):
            table[k + 1] = ratio * table[k]
    return table


def step(x):
    """Heaviside step with ``step(0) = 1/2``."""
    return np.where(np.asarray(x) > 0, 1.0, np.where(np.asarray(x) < 0, 0.0, 0.5))


def normalization(n_labels: int, s) -> float:
    """Value of the literal discrete-time integral at the origin."""
    s = SParam.coerce(s).s
    return (1.0 + s) ** (-n_labels)


def _unpack(branch):
    if branch is None:
        return np.zeros(0, complex), np.zeros(0)
    return branch.alphas, branch.times


def log_w_one_branch(branch: BranchHistory, s, params: ModelParams) -> complex:
    """Exponent of ``Tr(rho0 C_n)`` (single branch, time order)."""
    s = SParam.coerce(s).s
    al, t = _unpack(branch)
    n = al.size
    w, beta = params.omega, params.beta
    A = coefficient_table(max(n, 1), s)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    Aij = np.where(j >= i, A[np.abs(j - i)], 0.0)
    quad = np.sum(
        step(t[j] - t[i]) * Aij * np.exp(-1j * w * (t[i] - t[j])) * np.conj(al)[i] * al[j]
    )
    idx = np.arange(1, n + 1)
    bnd = (
        -2 * abs(params.beta) ** 2 * A[1 : n + 1].sum()
        + 2 * beta * np.sum(np.conj(al) * A[n + 1 - idx] * np.exp(-1j * w * t))
        + 2 * np.conj(beta) * np.sum(al * A[idx] * np.exp(1j * w * t))
    )
    return complex(4.0 / (1.0 + s) * quad + bnd)


def w_one_branch(branch, s, params) -> complex:
    return complex(np.exp(log_w_one_branch(branch, s, params)))


def log_w_two_branch(
    branch: BranchHistory | None,
    branch_prime: BranchHistory | None,
    s,
    params: ModelParams,
    variant: str = "adjudicated",
) -> complex:
    """Exponent of ``Tr(C_n^dag rho0 C_m)`` assembled block by block.

    ``variant="printed"`` reproduces the unprimed diagonal block with the
    labels conjugated the other way round (``alpha_i alpha_j^*``); it fails the
    oracle comparison and exists as a negative control.
    """
    if variant not in ("adjudicated", "printed"):
        raise PreconditionError(f"unknown variant {variant!r}")
    s = SParam.coerce(s).s
    al, t = _unpack(branch)
    bp, tp = _unpack(branch_prime)
    n, m = al.size, bp.size
    w, beta = params.omega, params.beta
    bb = abs(beta) ** 2
    A = coefficient_table(max(n, m, 1) + 1, s)
    pref = 4.0 / (1.0 + s)
    total = 0j

    if n:
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        Aij = np.where(i >= j, A[np.abs(i - j)], 0.0)
        if variant == "adjudicated":
            pair = np.conj(al)[i] * al[j]
        else:
            pair = al[i] * np.conj(al)[j]
        total += pref * np.sum(step(t[i] - t[j]) * Aij * np.exp(-1j * w * (t[i] - t[j])) * pair)
    if m:
        i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        Aij = np.where(j >= i, A[np.abs(j - i)], 0.0)
        total += pref * np.sum(
            step(tp[j] - tp[i]) * Aij * np.exp(-1j * w * (tp[i] - tp[j]))
            * np.conj(bp)[i] * bp[j]
        )
    iN = np.arange(1, n + 1)
    jM = np.arange(1, m + 1)
    An_rev = A[n + 1 - iN] if n else np.zeros(0)  # A_{n+1-i}
    Am_rev = A[m + 1 - jM] if m else np.zeros(0)  # A_{m+1-j}
    An = A[iN] if n else np.zeros(0)              # A_i
    Am = A[jM] if m else np.zeros(0)              # A_j
    if n and m:
        total += 4 * np.sum(
            np.outer(An_rev * al * np.exp(1j * w * t), Am_rev * np.conj(bp) * np.exp(-1j * w * tp))
        )
    if n:
        total += (
            -2 * bb * An.sum()
            + 2 * beta * np.sum(np.conj(al) * An * np.exp(-1j * w * t))
            + 2 * np.conj(beta) * np.sum(al * An_rev * np.exp(1j * w * t))
        )
    if m:
        total += (
            -2 * bb * Am.sum()
            + 2 * beta * np.sum(np.conj(bp) * Am_rev * np.exp(-1j * w * tp))
            + 2 * np.conj(beta) * np.sum(bp * Am * np.exp(1j * w * tp))
        )
    if n and m:
        total += (
            4 * bb * An.sum() * Am.sum()
            - 4 * beta * An.sum() * np.sum(np.conj(bp) * Am_rev * np.exp(-1j * w * tp))
            - 4 * np.conj(beta) * Am.sum() * np.sum(al * An_rev * np.exp(1j * w * t))
        )
    return complex(total)


def w_two_branch(branch, branch_prime, s, params, variant="adjudicated") -> complex:
    return complex(np.exp(log_w_two_branch(branch, branch_prime, s, params, variant)))


# --- Q representation (s = 1): nearest-neighbour couplings only -------------


def _rotated(branch):
    al, t = _unpack(branch)
    return al, t


def log_w_q_one_branch(branch: BranchHistory, params: ModelParams) -> complex:
    """Local form of ``Tr(rho0 C_n)`` at ``s = 1``."""
    al, t = _unpack(branch)
    w, beta = params.omega, params.beta
    out = -abs(beta) ** 2 + beta * np.conj(al[-1]) * np.exp(-1j * w * t[-1])
    out += np.conj(beta) * al[0] * np.exp(1j * w * t[0])
    out += -np.sum(np.abs(al) ** 2)
    out += np.sum(np.conj(al[:-1]) * al[1:] * np.exp(-1j * w * (t[:-1] - t[1:])))
    return complex(out)


def log_w_q_discrete(branch, branch_prime, params: ModelParams) -> complex:
    """Local (nearest-neighbour) form of ``w_two_branch`` at ``s = 1``."""
    al, t = _unpack(branch)
    bp, tp = _unpack(branch_prime)
    w, beta = params.omega, params.beta
    a = al * np.exp(1j * w * t)
    ap = bp * np.exp(1j * w * tp)
    if a.size == 0 and ap.size == 0:
        return 0j
    out = -abs(beta) ** 2 + 0j
    if a.size:
        out += -np.sum(np.abs(a) ** 2) + np.sum(np.conj(a[1:]) * a[:-1])
    if ap.size:
        out += -np.sum(np.abs(ap) ** 2) + np.sum(np.conj(ap[:-1]) * ap[1:])
    if a.size and ap.size:
        out += beta * np.conj(a[0]) + np.conj(beta) * ap[0] + np.conj(ap[-1]) * a[-1]
    elif a.size:
        out += beta * np.conj(a[0]) + np.conj(beta) * a[-1]
    else:
        out += beta * np.conj(ap[-1]) + np.conj(beta) * ap[0]
    return complex(out)


def w_q_discrete(branch, branch_prime, params) -> complex:
    return complex(np.exp(log_w_q_discrete(branch, branch_prime, params)))


# --- Wigner representation (s = 0): alternating signs -----------------------


def _sign(k):
    return 1.0 - 2.0 * (np.asarray(k) % 2)


def log_w_wigner_one_branch(branch: BranchHistory, params: ModelParams) -> complex:
    """Alternating-sign form of ``Tr(rho0 C_n)`` at ``s = 0``."""
    al, t = _unpack(branch)
    n = al.size
    w, beta = params.omega, params.beta
    i, j = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    tt_i, tt_j = t[i - 1], t[j - 1]
    quad = 4 * np.sum(
        step(tt_j - tt_i) * _sign(i + j + 1) * np.exp(-1j * w * (tt_i - tt_j))
        * np.conj(al)[i - 1] * al[j - 1]
    )
    idx = np.arange(1, n + 1)
    bnd = (
        -2 * abs(beta) ** 2 * np.sum(_sign(idx + 1))
        + 2 * beta * np.sum(_sign(n - idx) * np.conj(al) * np.exp(-1j * w * t))
        + 2 * np.conj(beta) * np.sum(_sign(idx + 1) * al * np.exp(1j * w * t))
    )
    return complex(quad + bnd)


def log_w_wigner_discrete(branch, branch_prime, params: ModelParams) -> complex:
    """``w_two_branch`` at ``s = 0`` written with explicit signs ``(-1)^k``.

    ``A_k(0) = (-1)^(k+1)`` for every ``k >= 0``.
    """
    al, t = _unpack(branch)
    bp, tp = _unpack(branch_prime)
    n, m = al.size, bp.size
    w, beta = params.omega, params.beta
    bb = abs(beta) ** 2
    total = 0j
    if n:
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        total += 4 * np.sum(
            step(t[i] - t[j]) * np.where(i >= j, _sign(i - j + 1), 0.0)
            * np.exp(-1j * w * (t[i] - t[j])) * np.conj(al)[i] * al[j]
        )
    if m:
        i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        total += 4 * np.sum(
            step(tp[j] - tp[i]) * np.where(j >= i, _sign(j - i + 1), 0.0)
            * np.exp(-1j * w * (tp[i] - tp[j])) * np.conj(bp)[i] * bp[j]
        )
    iN = np.arange(1, n + 1)
    jM = np.arange(1, m + 1)
    sum_n = float(np.sum(_sign(iN + 1)))  # 0 for even n, 1 for odd n
    sum_m = float(np.sum(_sign(jM + 1)))
    ea = al * np.exp(1j * w * t)
    eb = bp * np.exp(1j * w * tp)
    if n and m:
        total += 4 * np.sum(np.outer(_sign(n - iN) * ea, _sign(m - jM) * np.conj(eb)))
    if n:
        total += (
            -2 * bb * sum_n
            + 2 * beta * np.sum(_sign(iN + 1) * np.conj(ea))
            + 2 * np.conj(beta) * np.sum(_sign(n - iN) * ea)
        )
    if m:
        total += (
            -2 * bb * sum_m
            + 2 * beta * np.sum(_sign(m - jM) * np.conj(eb))
            + 2 * np.conj(beta) * np.sum(_sign(jM + 1) * eb)
        )
    if n and m:
        total += (
            4 * bb * sum_n * sum_m
            - 4 * beta * sum_n * np.sum(_sign(m - jM) * np.conj(eb))
            - 4 * np.conj(beta) * sum_m * np.sum(_sign(n - iN) * ea)
        )
    return complex(total)


def w_wigner_discrete(branch, branch_prime, params) -> complex:
    return complex(np.exp(log_w_wigner_discrete(branch, branch_prime, params)))


# --- continuum limits --------------------------------------------------------


def _continuum_inputs(branch, branch_prime, params):
    for b in (branch, branch_prime):
        if b is None or b.n < 3:
            raise PreconditionError("continuum evaluators need at least three samples per branch")
    if abs(branch.grid.t_end - branch_prime.grid.t_end) > 1e-9 * max(1.0, abs(branch.grid.t_end)):
        raise GridMismatchError("both branches must end at the same final time")
    w = params.omega
    a = branch.alphas * np.exp(1j * w * branch.times)
    ap = branch_prime.alphas * np.exp(1j * w * branch_prime.times)
    adot = np.gradient(a, branch.grid.dt, edge_order=2)
    apdot = np.gradient(ap, branch_prime.grid.dt, edge_order=2)
    return a, adot, branch.grid.dt, ap, apdot, branch_prime.grid.dt


def log_w_q_continuum(branch, branch_prime, params: ModelParams) -> complex:
    """Continuum limit of the Q-representation distribution.

    With ``a = alpha exp(i omega t)`` (so ``a^* adot = alpha^* alphadot + i omega |alpha|^2``)::

        -|beta|^2 + beta a^*(t_1) + beta^* a'(t'_1) + a'^*(t_f) a(t_f)
        - |a(t_1)|^2 - |a'(t_f)|^2 - int a^* adot dt + int a'^* adot' dt
    """
    a, adot, dt, ap, apdot, dtp = _continuum_inputs(branch, branch_prime, params)
    beta = params.beta
    out = -abs(beta) ** 2 + beta * np.conj(a[0]) + np.conj(beta) * ap[0]
    out += np.conj(ap[-1]) * a[-1] - abs(a[0]) ** 2 - abs(ap[-1]) ** 2
    out += -trapezoid(np.conj(a) * adot, dx=dt) + trapezoid(np.conj(ap) * apdot, dx=dtp)
    return complex(out)


def w_q_continuum(branch, branch_prime, params) -> complex:
    return complex(np.exp(log_w_q_continuum(branch, branch_prime, params)))


def log_w_wigner_continuum(branch, branch_prime, params: ModelParams) -> complex:
    """Continuum limit of the Wigner-representation distribution.

    The discrete exponent is ``-y^dag K^-1 y`` along the string
    ``y = (a'_1..a'_m, a_n..a_1) - beta`` with ``K^-1 = 2(1-S)(1+S)^-1``
    (``S`` the shift).  Substituting the alternating tail sums
    ``u = (1+S)^-1 y`` and taking each smooth segment to the continuum gives

        -2|u_1|^2 + sum_seg [ 1/2 int (y^* dy - y dy^*) + (G^* Dy - G Dy^*) ]

    with ``R_seg`` the tail sum entering after the segment, ``G = y_end/2 - R``
    and ``Dy = y_end - y_start``.  Both branches need an even number of points.
    """
    if branch is None or branch_prime is None:
        raise PreconditionError("continuum evaluators need both branches")
    if branch.n % 2 or branch_prime.n % 2:
        raise PreconditionError("the Wigner continuum limit needs an even number of points per branch")
    a, adot, dt, ap, apdot, dtp = _continuum_inputs(branch, branch_prime, params)
    beta = params.beta
    yp = ap - beta
    y = a - beta

    def line(vals, ders, step_):
        return trapezoid(np.conj(vals) * ders - vals * np.conj(ders), dx=step_)

    # segment 2: unprimed branch, traversed from t_n down to t_1
    R2 = 0j
    start2, end2 = y[-1], y[0]
    G2 = 0.5 * end2 - R2
    D2 = end2 - start2
    seg2 = -0.5 * line(y, adot, dt) + (np.conj(G2) * D2 - G2 * np.conj(D2))
    R1 = 0.5 * (start2 - end2) + R2
    # segment 1: primed branch, ascending
    start1, end1 = yp[0], yp[-1]
    G1 = 0.5 * end1 - R1
    D1 = end1 - start1
    seg1 = 0.5 * line(yp, apdot, dtp) + (np.conj(G1) * D1 - G1 * np.conj(D1))
    u1 = 0.5 * (start1 - end1) + R1
    return complex(-2 * abs(u1) ** 2 + seg1 + seg2)


def w_wigner_continuum(branch, branch_prime, params) -> complex:
    return complex(np.exp(log_w_wigner_continuum(branch, branch_prime, params)))


def w_infinite_time(
    path: PhaseSpacePath,
    path_prime: PhaseSpacePath,
    params: ModelParams,
    scheme: str = "forward",
    decay_tol: float = 1e-6,
) -> complex:
    """``exp(i S[q,p] - i S[q',p'])`` for paths vanishing at the grid ends."""
    for pth in (path, path_prime):
        ends = max(abs(pth.q[0]), abs(pth.q[-1]), abs(pth.p[0]), abs(pth.p[-1]))
        if ends > decay_tol:
            warnings.warn(
                f"path does not decay at the grid ends (|endpoint| = {ends:.3g}); "
                "the infinite-time form assumes vacuum boundary conditions",
                stacklevel=2,
            )
    s1 = action_phase_space(path, params.omega, scheme)
    s2 = action_phase_space(path_prime, params.omega, scheme)
    return complex(np.exp(1j * (s1 - s2)))
