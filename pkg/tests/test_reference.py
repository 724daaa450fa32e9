"""Reference integrator, grids, and convergence metrology."""

import math

import numpy as np
import pytest

from shearflow import (FlowSpec, TimePolyHamiltonian, TrigPoly,
                       fit_convergence, integrate_grid, lipschitz_estimate,
                       phase_grid, low_discrepancy_grid, shear_flow,
                       sup_error, torus_distance)


def test_integrator_matches_exact_vertical_shear():
    # H = cos(2 pi q): pdot = 2 pi sin(2 pi q), q frozen
    H = TrigPoly.harmonic(1, [1], [0])
    spec = FlowSpec(H, 0.0, 1.0, tol=1e-11)
    assert sup_error(shear_flow(H, 1.0), spec, phase_grid(1, 32)) < 1e-10


def test_integrator_matches_exact_horizontal_shear():
    H = TrigPoly.harmonic(1, [0], [1], 0.3)
    spec = FlowSpec(H, 0.0, 1.0, tol=1e-11)
    assert sup_error(shear_flow(H, 1.0), spec, phase_grid(1, 32)) < 1e-10


def test_energy_conservation():
    H = TrigPoly.harmonic(1, [1], [1], 0.2)
    Q, P = phase_grid(1, 16)
    spec = FlowSpec(H, 0.0, 1.0, tol=1e-11)
    Q1, P1 = integrate_grid(spec, Q, P)
    drift = H.evaluate_grid(Q1, P1) - H.evaluate_grid(Q, P)
    assert np.max(np.abs(drift)) < 1e-9


def test_time_reversal_round_trip():
    H = TrigPoly.harmonic(1, [1], [1], 0.2)
    Q, P = phase_grid(1, 16)
    Q1, P1 = integrate_grid(FlowSpec(H, 0.0, 1.0, tol=1e-11), Q, P)
    Qb, Pb = integrate_grid(FlowSpec(-H, 0.0, 1.0, tol=1e-11), Q1, P1)
    assert np.max(torus_distance(Qb, Pb, Q, P)) < 1e-9


def test_time_dependent_flow_against_quadrature():
    # H_t = t * cos(2 pi q): pdot = 2 pi t sin(2 pi q), q frozen, so
    # p(1) = p + pi sin(2 pi q) in closed form
    H = TimePolyHamiltonian(1, [(TrigPoly.harmonic(1, [1], [0]), 1)])
    Q, P = phase_grid(1, 16)
    Q1, P1 = integrate_grid(FlowSpec(H, 0.0, 1.0, tol=1e-11), Q, P)
    Pe = (P + math.pi * np.sin(2 * math.pi * Q)) % 1.0
    assert np.max(torus_distance(Q1, P1, Q, Pe)) < 1e-10


def test_torus_distance_wraps():
    a = np.array([[0.99]]), np.array([[0.01]])
    b = np.array([[0.01]]), np.array([[0.99]])
    d = torus_distance(a[0], a[1], b[0], b[1])
    assert d[0] == pytest.approx(math.sqrt(2) * 0.02, rel=1e-9)


def test_grids_shapes_and_determinism():
    Q, P = phase_grid(1, 8)
    assert Q.shape == (64, 1) and P.shape == (64, 1)
    Q1, P1 = low_discrepancy_grid(2, 500)
    Q2, P2 = low_discrepancy_grid(2, 500)
    assert np.array_equal(Q1, Q2) and np.array_equal(P1, P2)
    assert Q1.shape == (500, 2)


def test_fit_convergence_exact_slopes():
    N = [8, 16, 32, 64, 128]
    fit = fit_convergence([(n, 3.0 / n) for n in N])
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    fit = fit_convergence([(n, 0.5 * n ** -0.5) for n in N])
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)


def test_fit_convergence_excludes_floor_points():
    ladder = [(8, 1e-2), (16, 5e-3), (32, 2.5e-3), (64, 1.25e-3), (128, 1e-15)]
    fit = fit_convergence(ladder)
    assert len(fit.excluded) == 1
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_convergence([(8, 1e-15), (16, 1e-15), (32, 1e-15), (64, 1e-15)])


def test_lipschitz_estimate_single_harmonic():
    # DX for H = cos(2 pi p) has a single nonzero block of norm 4 pi^2 |cos|
    H = TrigPoly.harmonic(1, [0], [1])
    L = lipschitz_estimate(FlowSpec(H, 0.0, 1.0), phase_grid(1, 32))
    assert L == pytest.approx(4 * math.pi ** 2, rel=1e-12)
