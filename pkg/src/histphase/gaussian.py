"""Multivariate Gaussian-integral oracle for the discrete-time distribution.

The integrand of the discrete-time distribution is built literally: one
complex integration variable ``z_k`` per history label, the ordering weight
``exp(-(s/2)|z|^2)``, the Fourier kernel ``exp(-(alpha^* z - alpha z^*))`` and
the coherent-state expectation of the product of time-evolved Weyl operators,
composed left to right with the symplectic phase.  The exponent is a complex
quadratic polynomial in the ``2k`` real components of the ``z_k``; its
coefficients are read off by evaluating the exponent at a handful of points,
so no algebra is shared with the closed forms in :mod:`histphase.distribution`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import BranchHistory, ModelParams, SParam
from .errors import DivergenceError, PreconditionError

#: weight per real integration variable so that each d^2 z carries 1/(2 pi)
TWO_PI_MEASURE = 1.0 / np.sqrt(2 * np.pi)


@dataclass(frozen=True)
class GaussianForm:
    """Integrand ``exp(-1/2 x^T M x + L^T x + c)`` over real ``x``.

    ``measure_scale`` multiplies each one-dimensional ``dx``.
    """

    M: np.ndarray
    L: np.ndarray
    c: complex
    measure_scale: float = TWO_PI_MEASURE

    def __post_init__(self):
        M = np.array(self.M, dtype=complex)
        L = np.array(self.L, dtype=complex).reshape(-1)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != L.size:
            raise PreconditionError("GaussianForm dimensions are inconsistent")
        object.__setattr__(self, "M", 0.5 * (M + M.T))
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "c", complex(self.c))

    @property
    def dim(self) -> int:
        return self.L.size

    def exponent(self, x) -> complex:
        x = np.asarray(x, dtype=float)
        return complex(-0.5 * x @ self.M @ x + self.L @ x + self.c)

    def to_json(self) -> str:
        def cplx(a):
            a = np.asarray(a)
            return {"re": a.real.tolist(), "im": a.imag.tolist()}

        return json.dumps(
            {"M": cplx(self.M), "L": cplx(self.L), "c": cplx(self.c),
             "measure_scale": self.measure_scale}
        )


def form_from_exponent(f, dim: int, measure_scale: float = TWO_PI_MEASURE) -> GaussianForm:
    """Recover ``(M, L, c)`` of a quadratic exponent ``f`` by point evaluation.

    Unit steps are used; the extraction is exact for quadratics up to rounding.
    """
    eye = np.eye(dim)
    c = f(np.zeros(dim))
    fp = np.array([f(eye[k]) for k in range(dim)])
    fm = np.array([f(-eye[k]) for k in range(dim)])
    L = 0.5 * (fp - fm)
    diag = -(fp + fm - 2 * c)
    M = np.diag(diag).astype(complex)
    for k in range(dim):
        for l in range(k + 1, dim):
            fkl = f(eye[k] + eye[l])
            M[k, l] = M[l, k] = -(fkl - L[k] - L[l] - c) - 0.5 * (diag[k] + diag[l])
    return GaussianForm(M, L, c, measure_scale)


def evaluate(form: GaussianForm, tol: float = 1e-12) -> complex:
    """Closed-form value of the Gaussian integral.

    ``det(M)^(-1/2)`` is taken as the product of principal square roots of the
    eigenvalues of ``M``; they lie in the closed right half-plane whenever the
    real part of ``M`` is positive semidefinite, and this is the branch reached
    continuously from ``M = identity``.  A positive semidefinite (not definite)
    real part is accepted when ``M`` is nonsingular: the value is then the limit
    of vanishing extra damping.
    """
    M, L = form.M, form.L
    k = form.dim
    if k == 0:
        return complex(np.exp(form.c))
    scale = max(1.0, np.abs(M).max())
    re_eigs = np.linalg.eigvalsh(M.real)
    if re_eigs.min() < -tol * scale:
        raise DivergenceError(
            f"real part of the quadratic form is indefinite (min eigenvalue {re_eigs.min():.3g})"
        )
    eigs = np.linalg.eigvals(M)
    if np.abs(eigs).min() < tol * scale:
        raise DivergenceError("quadratic form is singular")
    sqrt_det = np.prod(np.sqrt(eigs))
    quad = 0.5 * L @ np.linalg.solve(M, L)
    prefactor = (form.measure_scale * np.sqrt(2 * np.pi)) ** k
    return complex(prefactor / sqrt_det * np.exp(quad + form.c))


def _factors(branch: BranchHistory, dagger: bool):
    """(label, time, sign) triples; daggered strings are reversed with sign -1."""
    items = list(zip(branch.alphas, branch.times))
    if dagger:
        return [(a, t, -1) for a, t in reversed(items)]
    return [(a, t, 1) for a, t in items]


def _string_exponent_fn(factors, s: float, params: ModelParams):
    labels = np.array([f[0] for f in factors], dtype=complex)
    rot = np.array([np.exp(1j * params.omega * f[1]) for f in factors])
    signs = np.array([f[2] for f in factors], dtype=float)
    beta = params.beta

    def f(x):
        z = x[0::2] + 1j * x[1::2]
        total = 0j
        total += np.sum(-signs * (np.conj(labels) * z - labels * np.conj(z)))
        total += np.sum(-(s / 2) * np.abs(z) ** 2)
        # U(W) U(w) = exp{(w^* W - W^* w)/2} U(W + w)
        W = 0j
        for w in signs * rot * z:
            total += 0.5 * (np.conj(w) * W - np.conj(W) * w)
            W += w
        total += -0.5 * abs(W) ** 2 + W * np.conj(beta) - np.conj(W) * beta
        return total

    return f


def _check_s(s) -> float:
    return SParam.coerce(s).s


def assemble_string_form(factors, s, params: ModelParams) -> GaussianForm:
    s = _check_s(s)
    return form_from_exponent(_string_exponent_fn(factors, s, params), 2 * len(factors))


def assemble_branch_form(branch: BranchHistory, s, params: ModelParams) -> GaussianForm:
    """Form for ``Tr(rho0 C_n)`` with ``C_n`` the time-ordered product of
    time-evolved representation operators (earliest leftmost)."""
    return assemble_string_form(_factors(branch, dagger=False), s, params)


def assemble_two_branch_form(
    branch: BranchHistory | None,
    branch_prime: BranchHistory | None,
    s,
    params: ModelParams,
) -> GaussianForm:
    """Form for ``Tr(C_n^dag rho0 C_m) = Tr(rho0 C_m C_n^dag)``.

    ``C_n^dag`` is obtained by conjugate-transposing every factor of the
    unprimed string: order reversed, ``U(w) -> U(-w)`` and the scalar kernel
    conjugated.
    """
    factors = []
    if branch_prime is not None:
        factors += _factors(branch_prime, dagger=False)
    if branch is not None:
        factors += _factors(branch, dagger=True)
    return assemble_string_form(factors, s, params)


def oracle_two_branch(branch, branch_prime, s, params: ModelParams) -> complex:
    return evaluate(assemble_two_branch_form(branch, branch_prime, s, params))


def oracle_one_branch(branch, s, params: ModelParams) -> complex:
    return evaluate(assemble_branch_form(branch, s, params))


def integrand_value(factors, zs, s, params: ModelParams) -> complex:
    """Integrand at explicit complex points (used to cross-check with Fock traces)."""
    zs = np.asarray(zs, dtype=complex)
    x = np.empty(2 * zs.size)
    x[0::2], x[1::2] = zs.real, zs.imag
    return complex(np.exp(_string_exponent_fn(factors, _check_s(s), params)(x)))
