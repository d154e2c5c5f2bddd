"""Weyl transform, Wigner fields, Moyal star product and the classical limit."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from supmech import dynamics as dyn
from supmech import wwm


def square_grid(N, hbar=1.0):
    """Grid with equal resolution in x and p (dx = dp)."""
    return dyn.PhaseGrid(float(np.sqrt(2 * np.pi * hbar * N)), N, hbar)


G64 = square_grid(64)


def sym(grid, fn):
    return wwm.symbol(grid, fn)


# -- Weyl transform and Wigner fields ----------------------------------------------


def test_symbols_of_basic_operators():
    g = square_grid(64)
    X, P = wwm.phase_mesh(g)
    assert np.max(np.abs(wwm.weyl_symbol(np.eye(64), g).values - 1)) < 1e-13
    assert np.max(np.abs(wwm.weyl_symbol(wwm.position_operator(g), g).values - X)) < 1e-12
    assert np.max(np.abs(wwm.weyl_symbol(wwm.momentum_operator(g), g).values - P)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([8, 16, 32]))
def test_weyl_round_trip(seed, N):
    g = square_grid(N)
    rng = np.random.default_rng(seed)
    K = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    assert np.allclose(wwm.weyl_quantize(wwm.weyl_symbol(K, g)), K, atol=1e-11)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.05, 1)), min_size=1, max_size=4))
def test_smooth_hermitian_kernels_have_real_symbols(packets):
    """Mixtures of packets resolved on the torus in both x and p give real symbols."""
    g = square_grid(128)
    rho = np.zeros((128, 128), dtype=complex)
    for x0, p0, w in packets:
        psi = dyn.gaussian(g, x0, 0.8, p0).psi
        rho += w * np.outer(psi, psi.conj()) * g.dx
    f = wwm.weyl_symbol(rho, g)
    assert np.max(np.abs(f.values.imag)) < 1e-10 * np.max(np.abs(f.values))


def _wigner_quadrature(psi_fn, x, p, hbar=1.0):
    """Direct quadrature of the Wigner integral for an analytic wavefunction."""
    def integrand(y, part):
        v = np.conj(psi_fn(x + y / 2)) * psi_fn(x - y / 2) * np.exp(1j * p * y / hbar)
        return v.real if part == 0 else v.imag
    re = quad(integrand, -25, 25, args=(0,), limit=400, epsabs=1e-14)[0]
    im = quad(integrand, -25, 25, args=(1,), limit=400, epsabs=1e-14)[0]
    return (re + 1j * im) / (2 * np.pi * hbar)


def test_wigner_matches_quadrature_oracle():
    g = square_grid(128)
    x0, p0 = 0.6, 0.4
    psi_fn = lambda x: np.pi ** -0.25 * np.exp(-((x - x0) ** 2) / 2 + 1j * p0 * x)  # noqa: E731
    W = wwm.wigner(dyn.coherent_state(g, 1.0, 1.0, x0, p0))
    rng = np.random.default_rng(3)
    idx = rng.integers(56, 72, size=(16, 2))
    for i, j in idx:
        ref = _wigner_quadrature(psi_fn, g.x[i], g.p[j])
        assert abs(ref.imag) < 1e-12
        assert abs(W.values[i, j] - ref.real) < 1e-10


def test_ground_state_closed_form_and_normalization():
    g = square_grid(128)
    W = wwm.wigner(dyn.coherent_state(g, 1.0, 1.0, 0.0))
    X, P = wwm.phase_mesh(g)
    exact = np.exp(-(X**2 + P**2)) / np.pi
    assert np.max(np.abs(W.values - exact)) < 1e-10
    assert W.mass() == pytest.approx(1, abs=1e-12)
    assert W.purity() == pytest.approx(1, abs=1e-10)
    assert W.imag_residual < 1e-12


def test_real_even_state_is_symmetric_in_p():
    g = square_grid(64)
    W = wwm.wigner(dyn.gaussian(g, 0.0, 0.9)).values
    # p_j = (j - N/2) dp, so -p_j sits at column N - j
    assert np.allclose(W[:, 1:], W[:, :0:-1], atol=1e-14)


def test_marginals():
    g = square_grid(128)
    psi = dyn.coherent_state(g, 1.0, 1.0, 1.0, -0.5)
    W = wwm.wigner(psi)
    assert np.allclose(W.marginal_x(), psi.density(), atol=1e-10)
    assert W.marginal_p().sum() * g.dp == pytest.approx(1, abs=1e-10)


def test_born_pairing():
    g = square_grid(128)
    rep = wwm.born_check(g, dyn.coherent_state(g, 1.0, 1.0, 0.7, 0.3))
    assert rep.passed and len(rep.entries) == 4


def test_csv(tmp_path):
    g = square_grid(8)
    wwm.wigner(dyn.gaussian(g)).to_csv(tmp_path / "w.csv")
    lines = (tmp_path / "w.csv").read_text().splitlines()
    assert lines[0] == "x,p,w" and len(lines) == 65


# -- star product ------------------------------------------------------------------


def test_star_examples():
    x, p = sym(G64, lambda X, P: X), sym(G64, lambda X, P: P)
    one = sym(G64, lambda X, P: np.ones_like(X))
    g = sym(G64, lambda X, P: np.exp(-(X**2) - P**2 / 2))
    win = wwm.interior(G64)
    assert np.allclose(wwm.star_product(one, g).values, g.values)
    xp = wwm.star_product(x, p).values
    assert np.max(np.abs(xp - (x.values * p.values + 0.5j))[win]) < 1e-10
    assert np.max(np.abs(wwm.star_product(x, x).values - x.values**2)[win]) < 1e-10


def test_calibration_identity():
    for hbar in (1.0, 0.5, 0.1):
        g = square_grid(64, hbar)
        assert wwm.calibration_residual(g, "series") < 1e-8
        assert wwm.calibration_residual(g, "quadrature") < 1e-6


def test_moyal_bracket_examples():
    x, p = sym(G64, lambda X, P: X), sym(G64, lambda X, P: P)
    win = wwm.interior(G64)
    assert np.max(np.abs(wwm.moyal_bracket(p, x).values - 1)[win]) < 1e-10
    f = sym(G64, lambda X, P: np.exp(-((X - 0.5) ** 2) - P**2))
    assert np.max(np.abs(wwm.moyal_bracket(f, f).values)) < 1e-14
    H = sym(G64, lambda X, P: P**2 / 2 + X**2 / 2)
    diff = wwm.moyal_bracket(H, f).values - wwm.classical_bracket(H, f).values
    assert np.max(np.abs(diff[win])) < 1e-10


def test_quadrature_agrees_with_high_order_series():
    g = square_grid(64, 0.1)
    f = sym(g, lambda X, P: np.exp(-((X - 0.3) ** 2) - P**2))
    h = sym(g, lambda X, P: np.exp(-(X**2) - 2 * (P + 0.2) ** 2))
    s = wwm.star_product(f, h, order=8).values
    q = wwm.star_product(f, h, method="quadrature").values
    assert np.max(np.abs(s - q)) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_quadrature_star_is_associative(seed):
    g = square_grid(16)
    rng = np.random.default_rng(seed)
    f, h, k = (wwm.SymbolField(g, rng.normal(size=(16, 16))) for _ in range(3))
    left = wwm.star_product(wwm.star_product(f, h, method="quadrature"), k, method="quadrature")
    right = wwm.star_product(f, wwm.star_product(h, k, method="quadrature"), method="quadrature")
    assert np.allclose(left.values, right.values, atol=1e-9)


def test_spectral_and_fd_derivatives_agree_on_smooth_data():
    g = square_grid(256)
    f = sym(g, lambda X, P: np.exp(-(X**2) - P**2)).values
    a = wwm.derivative(f, g, 1, 2, method="fd")
    b = wwm.derivative(f, g, 1, 2, method="spectral")
    assert np.max(np.abs(a - b)) < 5e-5


def test_fornberg_weights_reproduce_central_difference():
    w = wwm.fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 2)
    assert np.allclose(w[1], [-0.5, 0, 0.5])
    assert np.allclose(w[2], [1, -2, 1])


def test_star_product_errors():
    f = sym(G64, lambda X, P: X)
    with pytest.raises(ValueError):
        wwm.star_product(f, f, order=9)
    with pytest.raises(ValueError):
        wwm.star_product(f, f, hbar=0.5, method="quadrature")
    with pytest.raises(ValueError):
        wwm.star_product(f, sym(square_grid(32), lambda X, P: X))
    big = square_grid(512)
    with pytest.raises(ValueError):
        wwm.star_product(sym(big, lambda X, P: X), sym(big, lambda X, P: X), method="quadrature")


# -- semiclassical remainder -------------------------------------------------------


def test_quadratic_remainder_closed_form():
    x2, p2 = sym(G64, lambda X, P: X**2), sym(G64, lambda X, P: P**2)
    win = wwm.interior(G64)
    for hbar in (0.1, 0.5, 1.0):
        R = wwm.semiclassical_remainder(x2, p2, hbar).values
        assert np.max(np.abs(R[win] + hbar**2 / 2)) < 1e-9


def test_equal_arguments_leave_symmetric_term():
    f = sym(G64, lambda X, P: np.exp(-(X**2) - P**2))
    R = wwm.semiclassical_remainder(f, f, 0.1)
    # with f = g the bracket term vanishes, so R = f*f - f^2 is real and O(hbar^2)
    assert np.max(np.abs(R.values.imag)) < 1e-12
    assert 0 < np.max(np.abs(R.values)) < 0.1**2


def test_gaussian_scaling_slope():
    g = square_grid(64, 0.1)
    f = sym(g, lambda X, P: np.exp(-((X - 0.3) ** 2) - P**2))
    h = sym(g, lambda X, P: np.exp(-(X**2) - 2 * (P + 0.2) ** 2))
    fit = wwm.semiclassical_scaling(f, h, [0.1, 0.05, 0.025, 0.0125])
    assert abs(fit.slope - 2) <= 0.2
    assert fit.quadrature_gap is not None and fit.quadrature_gap < 1e-4


def test_scaling_excludes_floor():
    x, p = sym(G64, lambda X, P: X), sym(G64, lambda X, P: P)
    with pytest.raises(ValueError, match="floor"):
        wwm.semiclassical_scaling(x, p, [0.1, 0.05, 0.025, 0.0125])
    with pytest.raises(ValueError):
        wwm.semiclassical_scaling(x, p, [0.1, 0.05])


# -- classical limit ---------------------------------------------------------------


def test_harmonic_moyal_equals_liouville_split():
    g = square_grid(64)
    rho0 = wwm.gaussian_density(1.0, 0.5, np.sqrt(0.5), np.sqrt(0.5))
    r = wwm.classical_limit_compare(Polynomial([0, 0, 0.5]), rho0, 2 * np.pi, g, method="split", dt=0.02)
    assert r.l1_gap < 1e-6


def test_free_ehrenfest():
    g = square_grid(64)
    rho0 = wwm.gaussian_density(-1.0, 0.8, 0.8, 0.8)
    r = wwm.classical_limit_compare(Polynomial([0.0]), rho0, 1.5, g, method="split", dt=0.05)
    X, _ = wwm.phase_mesh(g)
    cell = g.dx * g.dp
    for W in (r.quantum, r.classical):
        assert np.sum(X * W) * cell == pytest.approx(-1.0 + 0.8 * 1.5, abs=1e-9)


def test_rk4_and_split_agree():
    g = square_grid(32)
    rho0 = wwm.gaussian_density(0.0, 0.0, 0.7, 0.7)
    V = Polynomial([0, 0, 0.5, 0, 0.05])
    W0 = rho0(*wwm.phase_mesh(g))
    a, _, _ = wwm.moyal_evolve(W0, g, V, 0.5, method="rk4")
    b, _, _ = wwm.moyal_evolve(W0, g, V, 0.5, method="split", dt=0.01)
    assert np.max(np.abs(a - b)) < 5e-5


def test_rk4_reports_instability():
    g = square_grid(32)
    W0 = wwm.gaussian_density(0.0, 0.0, 0.7, 0.7)(*wwm.phase_mesh(g))
    with pytest.raises(wwm.CFLError):
        wwm.moyal_evolve(W0, g, Polynomial([0, 0, 0.5]), 5.0, cfl=50.0, retries=0)
    with pytest.raises(ValueError):
        wwm.moyal_evolve(W0, g, Polynomial([0.0]), 1.0, method="euler")


def test_quartic_gap_scales_like_hbar_squared():
    fit = wwm.quartic_sweep([0.1, 0.05, 0.025, 0.0125])
    assert abs(fit.slope - 2) <= 0.2
