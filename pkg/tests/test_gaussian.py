import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.special import roots_hermite

from histphase import fock, gaussian
from histphase.core import BranchHistory, ModelParams, TimeGrid
from histphase.errors import DivergenceError
from histphase.gaussian import GaussianForm, evaluate


def gh_integral(form, npts=24):
    """Tensor Gauss-Hermite quadrature of exp(-x^T M x/2 + L x + c) times the measure."""
    y, w = roots_hermite(npts)
    x = np.sqrt(2) * y
    wx = np.sqrt(2) * w * np.exp(y**2)
    grids = np.meshgrid(*([x] * form.dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack(np.meshgrid(*([wx] * form.dim), indexing="ij")), axis=0).ravel()
    expo = -0.5 * np.einsum("pi,ij,pj->p", pts, form.M, pts) + pts @ form.L + form.c
    return np.sum(weights * np.exp(expo)) * form.measure_scale**form.dim


def quad2(f):
    re = dblquad(lambda y, x: f(x, y).real, -np.inf, np.inf, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    im = dblquad(lambda y, x: f(x, y).imag, -np.inf, np.inf, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    return re + 1j * im


def test_evaluate_unit_form():
    form = GaussianForm(2 * np.eye(2), np.zeros(2), 0.0)
    assert evaluate(form) == pytest.approx(0.5, abs=1e-15)
    brute = quad2(lambda x, y: np.exp(-(x * x + y * y)) / (2 * np.pi))
    assert brute == pytest.approx(0.5, abs=1e-10)


def test_constant_phase():
    M = np.array([[1.5, 0.2j], [0.2j, 0.8]])
    base = evaluate(GaussianForm(M, np.zeros(2), 0.0))
    assert evaluate(GaussianForm(M, np.zeros(2), 0.7j)) == pytest.approx(np.exp(0.7j) * base, rel=1e-14)


def test_random_forms_vs_adaptive_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(4):
        A = rng.normal(size=(2, 2))
        B = rng.normal(size=(2, 2))
        M = A @ A.T + 0.5 * np.eye(2) + 1j * (B + B.T)
        L = rng.normal(size=2) + 1j * rng.normal(size=2)
        form = GaussianForm(M, L, 0.1 - 0.2j)
        brute = quad2(lambda x, y: np.exp(form.exponent([x, y])) / (2 * np.pi))
        assert abs(evaluate(form) - brute) / abs(brute) < 1e-10


def test_branch_of_square_root_is_continuous():
    """Rotating the imaginary part of a diagonal form follows 1/(1 + i a) without sign flips."""
    for a in np.linspace(0, 40, 401):
        val = evaluate(GaussianForm(np.diag([1 + 1j * a, 1 + 1j * a]), np.zeros(2), 0.0))
        assert abs(val - 1 / (1 + 1j * a)) < 1e-13


def test_divergent_forms_rejected():
    with pytest.raises(DivergenceError):
        evaluate(GaussianForm(np.diag([1.0, -0.5]), np.zeros(2), 0.0))
    with pytest.raises(DivergenceError):
        gaussian.assemble_branch_form(BranchHistory(TimeGrid(0, 1, 1), [0.1]), -1.0, ModelParams())


def test_form_extraction_is_exact_for_quadratics():
    rng = np.random.default_rng(2)
    M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    M = M + M.T
    L = rng.normal(size=3) + 1j * rng.normal(size=3)
    f = GaussianForm(M, L, 0.3j)
    g = gaussian.form_from_exponent(f.exponent, 3)
    assert np.abs(g.M - f.M).max() < 1e-13 and np.abs(g.L - f.L).max() < 1e-13


def _branch(n, t0, seed):
    rng = np.random.default_rng(seed)
    return BranchHistory(TimeGrid(t0, 0.37, n), 0.5 * (rng.normal(size=n) + 1j * rng.normal(size=n)))


def test_single_variable_normalisation():
    """n=1, s=1, beta=0, alpha=0: the integral is 1/2 under the 1/(2 pi) measure."""
    b = BranchHistory(TimeGrid(0, 1, 1), [0.0])
    params = ModelParams()
    form = gaussian.assemble_branch_form(b, 1.0, params)
    assert np.linalg.eigvalsh(form.M.real).min() > 0
    factors = [(0.0, 0.0, 1)]
    brute = quad2(lambda x, y: gaussian.integrand_value(factors, [x + 1j * y], 1.0, params) / (2 * np.pi))
    assert brute == pytest.approx(0.5, abs=1e-10)
    assert evaluate(form) == pytest.approx(0.5, abs=1e-14)
    # the same for the Wigner weight
    assert np.linalg.eigvalsh(gaussian.assemble_branch_form(b, 0.0, params).M.real).min() > 0


def test_one_sided_reduces_to_branch_form():
    b = _branch(2, 0.1, 1)
    params = ModelParams(beta=0.3 + 0.2j)
    one = gaussian.assemble_branch_form(b, 0.5, params)
    two = gaussian.assemble_two_branch_form(None, b, 0.5, params)
    assert np.abs(one.M - two.M).max() < 1e-13 and np.abs(one.L - two.L).max() < 1e-13
    v = gaussian.oracle_one_branch(b, 0.5, params)
    assert gaussian.oracle_two_branch(b, None, 0.5, params) == pytest.approx(np.conj(v), rel=1e-12)


def test_branch_swap_conjugates():
    a, b = _branch(2, 0.0, 3), _branch(3, 0.2, 4)
    params = ModelParams(beta=0.3 + 0.2j)
    for s in (0.0, 0.5, 1.0):
        x = gaussian.oracle_two_branch(a, b, s, params)
        y = gaussian.oracle_two_branch(b, a, s, params)
        assert abs(x - np.conj(y)) < 1e-12 * abs(x)


def test_integrand_matches_fock_traces():
    """Integrand built from the composition law equals the one built from Fock matrices."""
    cfg = fock.FockConfig(48)
    omega = 1.0
    params = ModelParams(omega, beta=0.3 + 0.2j)
    b, bp = _branch(1, 0.3, 5), _branch(1, 0.8, 6)
    s = 1.0
    H = fock.sho_hamiltonian(cfg, omega)
    rho = fock.coherent_state(params.beta, cfg)
    rng = np.random.default_rng(9)
    factors = [(bp.alphas[0], bp.times[0], 1), (b.alphas[0], b.times[0], -1)]
    for _ in range(5):
        z, zp = 0.5 * (rng.normal(size=2) + 1j * rng.normal(size=2))
        al, alp = b.alphas[0], bp.alphas[0]
        kern = np.exp(-(np.conj(alp) * zp - alp * np.conj(zp)))
        kern_dag = np.conj(np.exp(-(np.conj(al) * z - al * np.conj(z))))
        damp = np.exp(-(s / 2) * (abs(z) ** 2 + abs(zp) ** 2))
        tr = fock.weyl_string_trace(rho, [(zp, bp.times[0]), (-z, b.times[0])], H)
        expected = kern * kern_dag * damp * tr
        got = gaussian.integrand_value(factors, [zp, z], s, params)
        assert abs(got - expected) < 1e-9


def test_two_branch_value_vs_quadrature():
    params = ModelParams(beta=0.3 + 0.2j)
    b, bp = _branch(1, 0.3, 5), _branch(1, 0.8, 6)
    form = gaussian.assemble_two_branch_form(b, bp, 1.0, params)
    assert abs(gaussian.evaluate(form) - gh_integral(form, 28)) < 1e-8


def test_origin_is_normalisation():
    params = ModelParams()
    g = TimeGrid(0.0, 0.3, 3)
    zero = BranchHistory(g, np.zeros(3))
    for s in (0.0, 0.5, 1.0):
        assert gaussian.oracle_two_branch(zero, zero, s, params) == pytest.approx((1 + s) ** -6, rel=1e-12)


def test_form_json_dump():
    form = gaussian.assemble_branch_form(_branch(1, 0.0, 1), 1.0, ModelParams())
    assert '"measure_scale"' in form.to_json()
