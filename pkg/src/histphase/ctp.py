"""Free SHO Green's functions, closed-time-path functionals and correlators.

Convention (fixed by the Fock oracle, see CONVENTIONS.md)::

    Z[J, J'] = <0| Tbar[exp(i int J' q)] T[exp(i int J q)] |0>

    Delta_F(t)  = -i exp(-i omega |t|) / (2 omega)      <T q(t) q(0)>   = i Delta_F(t)
    Delta_D(t)  = +i exp(+i omega |t|) / (2 omega)      <Tbar q(t) q(0)> = -i Delta_D(t)
    Delta_+(t)  = -i exp(+i omega t) / (2 omega)        <q(t') q(t)>    = i Delta_+(t - t')

so that ``log Z = -(i/2) int int [J D_F J + 2 J D_+ J' - J' D_D J']``.
Double integrals are done in O(n) by splitting at the diagonal and using
cumulative trapezoid sums.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .core import SourcePath, TimeGrid, time_derivative
from .errors import GridMismatchError, PreconditionError

KINDS = ("feynman", "wightman", "dyson")


def _check_omega(omega):
    if not omega > 0:
        raise PreconditionError(f"omega must be positive, got {omega}")


def feynman(t, omega: float = 1.0):
    _check_omega(omega)
    return -1j * np.exp(-1j * omega * np.abs(t)) / (2 * omega)


def dyson(t, omega: float = 1.0):
    _check_omega(omega)
    return 1j * np.exp(1j * omega * np.abs(t)) / (2 * omega)


def wightman(t, omega: float = 1.0):
    _check_omega(omega)
    return -1j * np.exp(1j * omega * np.asarray(t)) / (2 * omega)


def greens_eval(kind: str, t, omega: float = 1.0):
    """Evaluate a Green's function by name (``feynman``, ``wightman``, ``dyson``)."""
    fns = {"feynman": feynman, "wightman": wightman, "dyson": dyson}
    try:
        fn = fns[kind.lower()]
    except KeyError:
        raise PreconditionError(f"unknown Green's function {kind!r}; choose from {KINDS}") from None
    out = fn(t, omega)
    return complex(out) if np.ndim(out) == 0 else out


# --- quadrature helpers -------------------------------------------------------


def _causal(f, g, dt, omega):
    """``int dt f(t) exp(-i w t) int_{s<t} ds g(s) exp(i w s)``."""
    t = np.arange(f.size) * dt
    inner = cumulative_trapezoid(g * np.exp(1j * omega * t), dx=dt, initial=0.0)
    return trapezoid(f * np.exp(-1j * omega * t) * inner, dx=dt)


def ordered_double(f, g, dt: float, omega: float, c_fg: complex = 1.0, c_gf: complex = 1.0) -> complex:
    """``int int f(t) g(s) [step(t-s) c_fg e^{-iw(t-s)} + step(s-t) c_gf e^{-iw(s-t)}]``.

    ``f`` and ``g`` are samples on a common uniform grid.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    return complex(c_fg * _causal(f, g, dt, omega) + c_gf * _causal(g, f, dt, omega))


def separable_double(f, g, grid: TimeGrid, omega: float) -> complex:
    """``int int f(t) g(s) e^{-i w (t - s)}`` (no ordering)."""
    t = grid.times
    a = trapezoid(np.asarray(f) * np.exp(-1j * omega * t), dx=grid.dt)
    b = trapezoid(np.asarray(g) * np.exp(1j * omega * t), dx=grid.dt)
    return complex(a * b)


def _same_grid(a: SourcePath, b: SourcePath):
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("both source paths must live on the same grid")


# --- generating functionals ---------------------------------------------------


def log_ctp_z_config(J: SourcePath, J_prime: SourcePath, omega: float = 1.0) -> complex:
    """Exponent ``-(i/2) int int [J D_F J + 2 J D_+ J' - J' D_D J']``.

    Only the ``xi`` components of the source paths are used.
    """
    _check_omega(omega)
    _same_grid(J, J_prime)
    return _log_z_from_u(J.xi, J_prime.xi, J.grid, omega)


def _log_z_from_u(u, up, grid, omega):
    dt = grid.dt
    pref = 1.0 / (2 * omega)
    # J D_F J: D_F = -i pref e^{-iw|t-s|}
    ff = -1j * pref * ordered_double(u, u, dt, omega)
    # J' D_D J' = conj of the same structure for real sources
    dd = 1j * pref * np.conj(ordered_double(up, up, dt, omega))
    # J(t) D_+(t-s) J'(s), D_+(t-s) = -i pref e^{iw(t-s)}
    fp = -1j * pref * separable_double(up, u, grid, omega)
    return complex(-0.5j * (ff + 2 * fp - dd))


def ctp_z_config(J: SourcePath, J_prime: SourcePath, omega: float = 1.0) -> complex:
    return complex(np.exp(log_ctp_z_config(J, J_prime, omega)))


def log_ctp_z_phase(
    sources: SourcePath,
    sources_prime: SourcePath,
    omega: float = 1.0,
    scheme: str = "forward",
) -> complex:
    """Exponent of the phase-space functional.

    ``u = xi - chidot`` replaces ``J`` in the configuration-space exponent and
    the local term ``(i/2) int (chi^2 - chi'^2)`` is added.  Momentum sources
    must vanish at the grid ends.
    """
    _check_omega(omega)
    _same_grid(sources, sources_prime)
    grid = sources.grid
    for sp in (sources, sources_prime):
        if abs(sp.chi[0]) > 1e-12 or abs(sp.chi[-1]) > 1e-12:
            raise PreconditionError("momentum sources must vanish at the ends of the grid")
    u = sources.xi - time_derivative(sources.chi, grid.dt, scheme)
    up = sources_prime.xi - time_derivative(sources_prime.chi, grid.dt, scheme)
    local = 0.5j * trapezoid(sources.chi**2 - sources_prime.chi**2, dx=grid.dt)
    return complex(_log_z_from_u(u, up, grid, omega) + local)


def ctp_z_phase(sources, sources_prime, omega: float = 1.0, scheme: str = "forward") -> complex:
    return complex(np.exp(log_ctp_z_phase(sources, sources_prime, omega, scheme)))


# --- test functions -----------------------------------------------------------


@dataclass(frozen=True)
class Bump:
    """Smooth compactly supported ``exp(-1/(1-x^2))``, ``x = (t-center)/width``."""

    center: float = 0.0
    width: float = 1.0
    scale: float = 1.0

    def _x(self, t):
        return (np.asarray(t, dtype=float) - self.center) / self.width

    def _parts(self, t):
        x = self._x(t)
        inside = np.abs(x) < 1
        one = np.where(inside, 1 - x**2, 1.0)
        phi = np.where(inside, np.exp(-1.0 / one), 0.0) * self.scale
        return x, one, phi

    def __call__(self, t):
        return self._parts(t)[2]

    def d1(self, t):
        x, one, phi = self._parts(t)
        return -2 * x / one**2 * phi / self.width

    def d2(self, t):
        x, one, phi = self._parts(t)
        g1 = -2 * x / one**2
        g2 = -2 * (1 + 3 * x**2) / one**3
        return (g2 + g1**2) * phi / self.width**2


# --- correlation functions ----------------------------------------------------

# <X_a(t_a) X_b(t_b)> = WIGHTMAN_COEFF[a b] * exp(-i omega (t_a - t_b))
def _wightman_coeff(a: str, b: str, omega: float) -> complex:
    table = {
        ("q", "q"): 1 / (2 * omega),
        ("q", "p"): 0.5j,
        ("p", "q"): -0.5j,
        ("p", "p"): omega / 2,
    }
    try:
        return table[(a, b)]
    except KeyError:
        raise PreconditionError(f"operator kinds must be 'q' or 'p', got {a!r}, {b!r}") from None


@dataclass(frozen=True)
class CorrelationRequest:
    """Operators on the time-ordered (unprimed) and anti-time-ordered (primed) branches.

    Each entry is ``(kind, t)`` with ``kind`` in ``{"q", "p"}``.
    """

    unprimed: tuple = ()
    primed: tuple = ()

    def __post_init__(self):
        for kind, _ in tuple(self.unprimed) + tuple(self.primed):
            if kind not in ("q", "p"):
                raise PreconditionError(f"operator kind must be 'q' or 'p', got {kind!r}")
        object.__setattr__(self, "unprimed", tuple((k, float(t)) for k, t in self.unprimed))
        object.__setattr__(self, "primed", tuple((k, float(t)) for k, t in self.primed))

    def entries(self):
        """``(branch, kind, t)`` with branch 0 for unprimed and 1 for primed."""
        return [(0, k, t) for k, t in self.unprimed] + [(1, k, t) for k, t in self.primed]


def _pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i in range(len(rest)):
        for tail in _pairings(rest[:i] + rest[i + 1:]):
            yield [(first, rest[i])] + tail


def _pair_value(x, y, omega):
    (bx, kx, tx), (by, ky, ty) = x, y
    w_xy = _wightman_coeff(kx, ky, omega) * np.exp(-1j * omega * (tx - ty))
    w_yx = _wightman_coeff(ky, kx, omega) * np.exp(-1j * omega * (ty - tx))
    if bx != by:
        # primed operators stand to the left of unprimed ones
        return w_xy if bx == 1 else w_yx
    th = float(step_half(tx - ty))
    if bx == 0:
        return th * w_xy + (1 - th) * w_yx
    return th * w_yx + (1 - th) * w_xy


def step_half(x):
    return np.where(np.asarray(x) > 0, 1.0, np.where(np.asarray(x) < 0, 0.0, 0.5))


def correlation(req: CorrelationRequest, omega: float = 1.0) -> complex:
    """``<0| Tbar[X'...] T[X...] |0>`` by Wick's theorem (equal times weighted 1/2)."""
    _check_omega(omega)
    items = req.entries()
    if len(items) % 2:
        return 0j
    total = 0j
    for pairing in _pairings(items):
        term = 1.0 + 0j
        for x, y in pairing:
            term *= _pair_value(x, y, omega)
        total += term
    return complex(total)


def _smeared_pair(x, y, grid, omega):
    """Smeared contraction; ``x = (branch, kind, samples)``."""
    (bx, kx, fx), (by, ky, fy) = x, y
    dt = grid.dt
    c_xy = _wightman_coeff(kx, ky, omega)
    c_yx = _wightman_coeff(ky, kx, omega)
    if bx != by:
        if bx == 1:
            return c_xy * separable_double(fx, fy, grid, omega)
        return c_yx * separable_double(fy, fx, grid, omega)
    if bx == 0:
        return ordered_double(fx, fy, dt, omega, c_xy, c_yx)
    # anti-ordering: the later operator stands to the right
    return ordered_double(fx, fy, dt, -omega, c_yx, c_xy)


def correlation_smeared_wick(entries, grid: TimeGrid, omega: float = 1.0) -> complex:
    """Wick sum for smeared operators ``int f_k(t) X_k(t) dt``.

    ``entries`` is a list of ``(branch, kind, samples)`` with branch 0 for the
    time-ordered side and 1 for the anti-time-ordered side.
    """
    items = [(b, k, np.asarray(f, dtype=float)) for b, k, f in entries]
    for _, _, f in items:
        if f.size != grid.n:
            raise GridMismatchError("smearing function does not match grid")
    if len(items) % 2:
        return 0j
    total = 0j
    for pairing in _pairings(items):
        term = 1.0 + 0j
        for x, y in pairing:
            term *= _smeared_pair(x, y, grid, omega)
        total += term
    return complex(total)


def correlation_smeared_fd(
    entries,
    grid: TimeGrid,
    omega: float = 1.0,
    h: float = 1e-2,
    scheme: str = "central",
) -> complex:
    """Same quantity by finite-difference source derivatives of the functional.

    ``(-i)^(n+m) d^(n+m) Z / d eps_1 ... d eps_k`` with one amplitude per
    operator and a centred ``+-h`` stencil (error ``O(h^2)``).
    """
    items = [(b, k, np.asarray(f, dtype=float)) for b, k, f in entries]
    k = len(items)
    if k > 4:
        raise PreconditionError("finite-difference correlators are limited to four operators")
    if k == 0:
        return 1.0 + 0j
    total = 0j
    for signs in itertools.product((1.0, -1.0), repeat=k):
        xi = [np.zeros(grid.n), np.zeros(grid.n)]
        chi = [np.zeros(grid.n), np.zeros(grid.n)]
        for sgn, (branch, kind, f) in zip(signs, items):
            (xi if kind == "q" else chi)[branch] += sgn * h * f
        z = ctp_z_phase(
            SourcePath(grid, xi[0], chi[0]), SourcePath(grid, xi[1], chi[1]), omega, scheme
        )
        total += np.prod(signs) * z
    return complex((-1j) ** k * total / (2 * h) ** k)
