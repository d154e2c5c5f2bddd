"""Heisenberg/Noether (exact) and the grid Schrodinger, localization and Weyl checks."""

from fractions import Fraction
from math import erf, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supmech import dynamics as dyn
from supmech.nc import parse_expr
from supmech.presentations import ccr_spin

P = ccr_spin()
H = dyn.free_hamiltonian(P)


def E(s):
    return parse_expr(s, P)


# -- symbolic ----------------------------------------------------------------------


def test_heisenberg_free_particle():
    assert dyn.heisenberg_evolve(E("X1"), H) == E("X1 + P1*t/m")
    assert dyn.heisenberg_evolve(E("P1"), H) == E("P1")
    assert dyn.heisenberg_evolve(H, H) == H


def test_heisenberg_solution_satisfies_equation_of_motion():
    for a in ("X1", "X2*X2", "X1*P2 + S3"):
        At = dyn.heisenberg_evolve(E(a), H)
        assert dyn.heisenberg_residual(At, H).is_zero()


def test_heisenberg_numeric_time():
    assert dyn.heisenberg_evolve(E("X1"), H, t=2) == E("X1 + 2*P1/m")


def test_heisenberg_non_terminating():
    with pytest.raises(dyn.SeriesNotTerminating):
        dyn.heisenberg_evolve(E("X1"), E("X1*P1"), k_max=10)


def test_noether_invariants_are_conserved():
    rep = dyn.noether_check()
    assert rep.passed and len(rep.entries) == 11
    inv = dyn.noether_invariants(P)
    assert inv["mX1-P1t"][1] == E("m*X1 - P1*t")
    assert inv["J1"][1] == E("X2*P3 - X3*P2")


def test_noether_detects_non_invariant():
    rep = dyn.noether_check(H + E("X1"))
    assert not rep.passed


# -- grid --------------------------------------------------------------------------


def test_grid_validation():
    for bad in ((10.0, 100), (10.0, 1), (-1.0, 64)):
        with pytest.raises(ValueError):
            dyn.PhaseGrid(*bad)
    g = dyn.PhaseGrid(8.0, 8)
    assert g.x[0] == pytest.approx(-3.5) and g.dx == 1.0
    with pytest.raises(ValueError):
        g.edge_index(0.5)
    with pytest.raises(ValueError):
        g.shift_cells(0.3)


def test_free_gaussian_width_law():
    g = dyn.PhaseGrid(80.0, 512)
    psi = dyn.schrodinger_evolve(dyn.gaussian(g, 0.0, 1.0), np.zeros(512), 1.0, 100)
    exact = dyn.free_width_squared(1.0, 1.0)
    assert exact == 1.25
    assert abs(psi.var_x() - exact) / exact < 1e-6
    assert psi.boundary_mass() < 1e-20


def test_coherent_state_returns():
    g = dyn.PhaseGrid(40.0, 256)
    psi0 = dyn.coherent_state(g, 1.0, 1.0, 2.0, 0.5)
    V = 0.5 * g.x**2
    psi = dyn.schrodinger_evolve(psi0, V, 2 * np.pi, 1000)
    assert abs(psi0.overlap(psi)) ** 2 >= 1 - 1e-8
    assert abs(dyn.energy(psi, V) - dyn.energy(psi0, V)) < 1e-8 * dyn.energy(psi0, V)


def test_zero_time_is_identity():
    g = dyn.PhaseGrid(20.0, 64)
    psi0 = dyn.gaussian(g, 1.0, 1.0, 0.3)
    psi = dyn.schrodinger_evolve(psi0, 0.5 * g.x**2, 0.0, 5)
    assert np.allclose(psi.psi, psi0.psi, atol=1e-15)


def test_strang_is_second_order():
    g = dyn.PhaseGrid(30.0, 256)
    psi0 = dyn.gaussian(g, 1.0, 0.8, 1.0)
    assert dyn.richardson_order(psi0, 0.5 * g.x**2 + 0.1 * g.x**4 / 10, 1.0, 20) == pytest.approx(2.0, abs=0.1)


def test_non_finite_amplitudes_abort():
    g = dyn.PhaseGrid(20.0, 64)
    V = np.zeros(64)
    V[3] = np.inf
    with pytest.raises(FloatingPointError, match="step 1"), np.errstate(invalid="ignore"):
        dyn.schrodinger_evolve(dyn.gaussian(g), V, 1.0, 4)


def test_bad_evolution_arguments():
    g = dyn.PhaseGrid(20.0, 64)
    with pytest.raises(ValueError):
        dyn.schrodinger_evolve(dyn.gaussian(g), np.zeros(63), 1.0, 4)
    with pytest.raises(ValueError):
        dyn.schrodinger_evolve(dyn.gaussian(g), 0.0, -1.0, 4)


def test_csv_export(tmp_path):
    g = dyn.PhaseGrid(8.0, 8)
    dyn.gaussian(g).to_csv(tmp_path / "psi.csv")
    lines = (tmp_path / "psi.csv").read_text().splitlines()
    assert lines[0] == "x,re_psi,im_psi" and len(lines) == 9


# -- localization ------------------------------------------------------------------

LOC = dyn.PhaseGrid(40.0, 8192)


def test_measure_empty_and_total():
    psi = dyn.gaussian(LOC)
    pov = dyn.PobvmGrid(LOC)
    assert pov.measure_exact(psi, None) == 0
    assert abs(pov.probability(psi, "all") - 1) < 1e-12
    assert isinstance(pov.measure_exact(psi, (-5.0, 5.0)), Fraction)


@pytest.mark.parametrize("x0", [0.0, 0.7, -1.3])
def test_half_line_matches_erf(x0):
    psi = dyn.gaussian(LOC, x0, 1.0)
    p = dyn.PobvmGrid(LOC).probability(psi, (-20.0, 0.0))
    assert abs(p - 0.5 * (1 + erf(-x0 / sqrt(2)))) < 1e-6


def test_misaligned_region():
    with pytest.raises(ValueError):
        dyn.PobvmGrid(dyn.PhaseGrid(8.0, 8)).mask((0.5, 1.0))


def test_localization_report():
    rep = dyn.localization_check(dyn.PhaseGrid(20.0, 256), dyn.gaussian(dyn.PhaseGrid(20.0, 256)))
    assert rep.passed
    assert all(e.residual == "0" for e in rep.group("pobvm") if e.tolerance == "exact")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_additivity_exact(seed, parts):
    g = dyn.PhaseGrid(10.0, 128)
    rng = np.random.default_rng(seed)
    psi = dyn.WaveField(g, rng.normal(size=128) + 1j * rng.normal(size=128)).normalized()
    labels = rng.integers(0, parts, size=128)
    pov = dyn.PobvmGrid(g)
    pieces = [labels == c for c in range(parts)]
    assert sum(pov.measure_exact(psi, m) for m in pieces) == pov.measure_exact(psi, "all")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(-200, 200))
def test_translation_covariance_exact(seed, k):
    g = dyn.PhaseGrid(10.0, 128)
    rng = np.random.default_rng(seed)
    psi = dyn.WaveField(g, rng.normal(size=128) + 0j).normalized()
    D = rng.random(128) < 0.3
    pov = dyn.PobvmGrid(g)
    moved = dyn.translate(psi, k * g.dx)
    assert pov.measure_exact(moved, np.roll(D, k)) == pov.measure_exact(psi, D)


# -- Weyl relations ----------------------------------------------------------------


def test_weyl_relations_default_example():
    g = dyn.PhaseGrid(20.0, 256)
    rep = dyn.weyl_relations_check(g, 64 * g.dx, 2 * np.pi / 20.0 * 32, tol=1e-12)
    assert rep.passed


def test_weyl_relations_trivial_parameters():
    g = dyn.PhaseGrid(20.0, 256)
    rep = dyn.weyl_relations_check(g, 0.0, 0.0, tol=0.0)
    assert rep.passed


def test_weyl_relations_need_whole_cells():
    g = dyn.PhaseGrid(20.0, 256)
    with pytest.raises(ValueError):
        dyn.weyl_relations_check(g, 0.3 * g.dx, 1.0)


def test_translation_generator_rate():
    g = dyn.PhaseGrid(20.0, 256)
    psi = dyn.gaussian(g, 0.0, 1.0, 0.5)
    eps = [0.1, 0.05, 0.025, 0.0125]
    assert dyn.fitted_rate(eps, dyn.generator_errors(psi, eps)) == pytest.approx(1.0, abs=0.05)
