"""Special functions and fractional calculus operators.

Reference values come from independent routes: scipy's scaled complementary
error function for the half-order Mittag-Leffler function, closed-form
densities at beta = 1/2, mpmath series where cheap, and exact power-law
formulas for the fractional operators on monomials.
"""

import math

import numpy as np
import pytest
from scipy.special import erfcx, gamma

from fracstorm.errors import DomainError
from fracstorm.fracfun import (
    SampledFunction,
    caputo_derivative,
    fractional_integral,
    inverse_subordinator_density,
    mittag_leffler,
    mittag_leffler_log,
    stable_subordinator_density,
    subordinator_small_u_law,
    subordinator_tail_law,
)
from fracstorm.quadrature import integrate_semi_infinite


def test_classical_order_reduces_to_exp():
    x = np.linspace(-5.0, 5.0, 201)
    vals = np.array([mittag_leffler(1.0, xi) for xi in x])
    assert np.max(np.abs(vals - np.exp(x))) < 1e-12


def test_half_order_matches_scaled_erfc():
    # E_{1/2}(-z) = exp(z^2) erfc(z) = erfcx(z) for z >= 0.
    for z in np.linspace(0.0, 30.0, 61):
        assert mittag_leffler(0.5, -z) == pytest.approx(erfcx(z), rel=1e-10)


def test_mittag_leffler_rejects_bad_order():
    for beta in (0.0, -0.3, 1.5, np.inf):
        with pytest.raises(DomainError):
            mittag_leffler(beta, -1.0)


def test_log_form_consistent_and_asymptotic():
    # exp(log E) == E where both are representable in double precision.
    for x in (0.5, 2.0, 10.0, 25.0):
        lg = mittag_leffler_log(0.5, x)
        assert math.exp(lg) == pytest.approx(mittag_leffler(0.5, x), rel=1e-10)
    # E_{1/2}(x) ~ 2 exp(x^2) for large x, so log E - x^2 -> log 2.
    assert mittag_leffler_log(0.5, 50.0) - 50.0 ** 2 == pytest.approx(
        math.log(2.0), abs=1e-8)


def test_complete_monotonicity_on_negative_axis():
    x = np.linspace(0.0, 60.0, 2001)
    for beta in (0.3, 0.5, 0.8):
        v = np.array([mittag_leffler(beta, -xi) for xi in x])
        assert np.all(v > 0.0)
        assert np.all(np.diff(v) < 0.0)


def test_half_stable_density_closed_form():
    # g_{1/2}(u) = u^{-3/2} exp(-1/(4u)) / (2 sqrt(pi)).
    for u in np.geomspace(0.02, 50.0, 25):
        exact = u ** -1.5 * math.exp(-0.25 / u) / (2.0 * math.sqrt(math.pi))
        assert stable_subordinator_density(0.5, u) == pytest.approx(exact, rel=1e-10)


def test_stable_density_laplace_transform():
    # The defining identity: the Laplace transform of the density is
    # exp(-s^beta).  (The undamped total mass has a u^(-1-beta) tail that
    # adaptive bisection cannot certify; the damped integral is exact.)
    for beta in (0.3, 0.5, 0.8):
        for s in (0.5, 2.0):
            lap = integrate_semi_infinite(
                lambda u: np.exp(-s * u) * stable_subordinator_density(beta, u),
                tol=1e-11)
            assert lap == pytest.approx(math.exp(-s ** beta), abs=1e-12)


def test_stable_density_limit_laws():
    # Saddle-point law near zero, series tail law at infinity.
    assert stable_subordinator_density(0.5, 0.01) == pytest.approx(
        subordinator_small_u_law(0.5, 0.01), rel=5e-2)
    assert stable_subordinator_density(0.5, 600.0) == pytest.approx(
        subordinator_tail_law(0.5, 600.0), rel=1e-2)


def test_inverse_subordinator_half_closed_form():
    # f_{E_t}(x) = exp(-x^2/(4t)) / sqrt(pi t) at beta = 1/2.
    for t in (0.2, 1.0, 3.0):
        for x in (0.1, 0.7, 2.0):
            exact = math.exp(-x * x / (4.0 * t)) / math.sqrt(math.pi * t)
            assert inverse_subordinator_density(0.5, t, x) == pytest.approx(
                exact, rel=1e-9)


def test_inverse_subordinator_support_and_mass():
    assert inverse_subordinator_density(0.5, 1.0, -1.0) == 0.0
    assert inverse_subordinator_density(0.5, 1.0, 0.0) == 0.0
    for beta, t in ((0.3, 0.5), (0.8, 2.0)):
        total = integrate_semi_infinite(
            lambda x: inverse_subordinator_density(beta, t, x), tol=1e-11)
        assert total == pytest.approx(1.0, abs=1e-8)


def test_fractional_integral_exact_on_linear_data():
    # I^gamma t = t^{1+gamma} / Gamma(2+gamma); linear data is interpolated
    # exactly, so the quadrature is exact too.
    times = np.linspace(0.0, 2.0, 257)
    g = SampledFunction(times=times, values=times)
    for gam in (0.3, 0.5, 1.0):
        for t in (0.5, 1.0, 2.0):
            exact = t ** (1.0 + gam) / gamma(2.0 + gam)
            assert fractional_integral(g, gam, t) == pytest.approx(exact, rel=1e-13)


def test_caputo_exact_on_linear_data():
    # D^beta t = t^{1-beta} / Gamma(2-beta).
    times = np.linspace(0.0, 2.0, 257)
    g = SampledFunction(times=times, values=times)
    for beta in (0.3, 0.5, 0.8):
        for t in (0.5, 1.3, 2.0):
            exact = t ** (1.0 - beta) / gamma(2.0 - beta)
            assert caputo_derivative(g, beta, t) == pytest.approx(exact, rel=1e-12)


def test_caputo_of_quadratic_converges():
    # D^beta t^2 = 2 t^{2-beta} / Gamma(3-beta); quadratic data is only
    # piecewise-linear interpolated, so the error is O(h^2) but not zero.
    beta = 0.5
    times = np.linspace(0.0, 1.0, 4097)
    g = SampledFunction(times=times, values=times ** 2)
    exact = 2.0 * 1.0 / gamma(2.5)
    assert caputo_derivative(g, beta, 1.0) == pytest.approx(exact, rel=1e-5)


def test_operators_reject_plain_arrays():
    with pytest.raises(DomainError):
        caputo_derivative(np.ones(8), 0.5, 0.5)
    with pytest.raises(DomainError):
        fractional_integral(np.ones(8), 0.5, 0.5)


def test_sampled_function_validation():
    with pytest.raises(DomainError):
        SampledFunction(times=np.array([0.5, 1.0]), values=np.zeros(2))
    with pytest.raises(DomainError):
        SampledFunction(times=np.array([0.0, 1.0, 1.0]), values=np.zeros(3))
    with pytest.raises(DomainError):
        SampledFunction(times=np.array([0.0, 1.0]), values=np.array([0.0, np.nan]))
