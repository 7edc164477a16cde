"""Unit tests for the mean-field dynamics and scaling fits."""

import numpy as np
import pytest

from pauliweight import dense
from pauliweight.meanfield import (
    EQUILIBRIUM_RHO,
    SIGMA2_INF,
    appendix_bounds,
    beta1,
    beta_from_occupation,
    beta_mft,
    clifford_beta_reference,
    clifford_homogeneous_rho,
    fit_alpha_exponent,
    fit_alpha_prime,
    fit_alpha_prime_full,
    fit_beta_alpha_prime,
    fit_clifford_constant,
    fit_depth_scaling,
    homogeneous_closed_form,
    homogeneous_recurrence,
    mass_function,
    mf_evolve,
    mf_step,
    optimal_depth,
    velocity_endpoints,
)


def test_equilibrium_is_fixed_point():
    row = np.full(10, EQUILIBRIUM_RHO)
    for layer in (0, 1):
        out = mf_step(row, 0.5, layer)
        assert np.allclose(out, EQUILIBRIUM_RHO)


def test_mf_step_swap_at_alpha_zero():
    row = np.array([0.9, 0.1, 0.8, 0.2])
    out = mf_step(row, 0.0, 0)
    assert np.allclose(out, [0.1, 0.9, 0.2, 0.8])


def test_mf_step_rejects_bad_input():
    with pytest.raises(ValueError):
        mf_step(np.array([0.5, 1.5]), 0.5, 0)
    with pytest.raises(ValueError):
        mf_step(np.array([0.5, 0.5]), 0.8, 0)


def test_mf_evolve_matches_homogeneous_recurrence():
    # periodic uniform initial data stays uniform and follows the recurrence
    n, depth, alpha = 8, 10, 0.4
    grid = mf_evolve(n, depth, np.ones(n), alpha, boundary="periodic")
    series = homogeneous_recurrence(1.0, alpha, depth)
    for t in range(depth + 1):
        assert np.allclose(grid.rho[t], series[t], atol=1e-12)


def test_homogeneous_recurrence_converges():
    series = homogeneous_recurrence(1.0, 0.5, 60)
    assert series[-1] == pytest.approx(EQUILIBRIUM_RHO, abs=1e-6)
    # approach from above when starting at full occupation
    assert np.all(series >= EQUILIBRIUM_RHO - 1e-12)


def test_closed_form_fit_quality():
    for alpha in (0.1, 1.0 / 3.0, 0.6):
        ap, a = fit_alpha_prime_full(alpha)
        assert ap > 0
        assert -1.0 < a < 0.0  # approach from above forces negative amplitude
        ts = np.arange(1, 41)
        exact = homogeneous_recurrence(1.0, alpha, 40)[1:]
        model = homogeneous_closed_form(ts, ap, a)
        assert np.max(np.abs(model - exact)) < 1e-3


def test_alpha_prime_approaches_alpha_at_small_alpha():
    ap = fit_alpha_prime(0.05)
    assert abs(ap / 0.05 - 1.0) < 0.05


def test_beta1_iswap_value():
    # alpha = 2/3: 1/(3/sqrt(17/9) - 2)
    expect = 1.0 / (3.0 / np.sqrt(1.0 + 8.0 / 9.0) - 2.0)
    assert beta1(2.0 / 3.0) == pytest.approx(expect)


def test_beta_mft_monotone_to_two():
    ts = np.arange(1, 60)
    for alpha in (0.2, 0.5):
        vals = beta_mft(ts, alpha)
        assert np.all(np.diff(vals) <= 1e-12)
        assert vals[-1] == pytest.approx(2.0, abs=1e-2)
    with pytest.raises(ValueError):
        beta_mft(0, 0.5)


def test_fit_beta_alpha_prime_recovers_generator():
    alpha = 0.4
    ap_true = 0.8
    ts = np.arange(2, 21)
    betas = beta_mft(ts, alpha, ap_true)
    assert fit_beta_alpha_prime(ts, betas, alpha) == pytest.approx(ap_true,
                                                                   abs=1e-4)


def test_beta_from_occupation_homogeneous():
    assert beta_from_occupation(np.full(6, 0.75)) == pytest.approx(2.0)
    assert beta_from_occupation(np.ones(4)) == pytest.approx(3.0)


def test_clifford_reference_fits_exact_series():
    c = fit_clifford_constant()
    rho = clifford_homogeneous_rho(20)
    ts = np.arange(8, 21)
    model = c * (16.0 / 25.0) ** ts * ts ** (-1.5) + EQUILIBRIUM_RHO
    assert np.max(np.abs(model - rho[8:21])) < 1e-4
    beta_ref = clifford_beta_reference(10, c)
    assert beta_ref == pytest.approx(1.0 / (1.0 - 2.0 * rho[10] / 3.0), abs=1e-3)


def test_optimal_depth_monotone_in_k():
    t4, norms4 = optimal_depth(4, 0.5, 16, engine="dense")
    t8, norms8 = optimal_depth(8, 0.5, 16, engine="dense")
    assert 0 < t4 <= t8
    assert norms4[t4] == np.min(norms4)


def test_optimal_depth_decreases_with_alpha():
    t_lo, _ = optimal_depth(8, 0.25, 16, engine="dense")
    t_hi, _ = optimal_depth(8, 0.6, 16, engine="dense")
    assert t_hi <= t_lo


def test_fit_depth_scaling_recovers_slope():
    ks = np.array([4, 8, 16, 32, 64])
    t_stars = 2.5 * np.log(ks) - 1.3
    assert fit_depth_scaling(ks, t_stars) == pytest.approx(2.5, abs=1e-10)


def test_fit_alpha_exponent_recovers_power_law():
    alphas = np.array([0.2, 0.3, 0.45, 0.6])
    c, b = fit_alpha_exponent(alphas, 1.7 * alphas ** -0.95)
    assert c == pytest.approx(1.7, abs=1e-10)
    assert b == pytest.approx(-0.95, abs=1e-10)


def test_mass_function_and_velocities():
    assert mass_function(EQUILIBRIUM_RHO, 0.7) == pytest.approx(0.0)
    v0, v1 = velocity_endpoints(0.3)
    assert v0 == 1.0
    assert v1 == pytest.approx(abs(1.0 - 0.4))


def test_appendix_bounds_uncorrelated_start():
    diag = appendix_bounds(1.0, 1.0 / 3.0)
    assert diag.slack == pytest.approx(0.0, abs=1e-15)
    assert diag.sigma2 == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        appendix_bounds(0.5, 1.5)


def test_sigma2_inf_value():
    assert SIGMA2_INF == pytest.approx(0.2168, abs=5e-4)
