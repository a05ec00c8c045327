"""Tests for the theta-function transition curves and their asymptotes."""
import sys
import os
import math

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from asymptotics import (
    Regime,
    asymptote_half,
    asymptote_k2,
    lattice_log_derivative,
    rate_transition_half,
    rate_transition_k2,
    regime,
    theta1_dq,
    theta1_log_derivative,
    theta4_dq,
    theta4_dz,
    theta4_grid,
    theta4_rate_shape,
)
from asymptotics.theta import small_nome_rate_shape
from model.errors import DomainError, ParameterError
from model.params import characteristic_rates, make_params
from model.propagator import effective_rate_profile


class TestTheta4:
    @pytest.mark.parametrize("q", [0.05, 0.3, 0.8, 0.95])
    def test_value_and_derivative(self, q):
        ev = theta4_dq(q)
        with mpmath.workdps(40):
            assert ev.value == pytest.approx(float(mpmath.jtheta(4, 0, q)), rel=1e-10)
            deriv = mpmath.diff(lambda x: mpmath.jtheta(4, 0, x), q)
            assert ev.dq == pytest.approx(float(deriv), rel=1e-8)

    def test_z_derivatives(self):
        value, dz2, dz4 = theta4_dz(0.4)
        with mpmath.workdps(30):
            assert dz2 == pytest.approx(float(mpmath.jtheta(4, 0, 0.4, 2)), rel=1e-10)
            assert dz4 == pytest.approx(float(mpmath.jtheta(4, 0, 0.4, 4)), rel=1e-10)

    def test_nome_domain(self):
        with pytest.raises(DomainError):
            theta4_dq(1.0)
        with pytest.raises(DomainError):
            theta4_dq(-0.1)

    def test_complex_grid(self):
        q = np.array([0.1 + 0.2j, -0.5j])
        values = theta4_grid(q)
        assert values[0] == pytest.approx(complex(mpmath.jtheta(4, 0, mpmath.mpc(0.1, 0.2))))
        with pytest.raises(DomainError):
            theta4_grid([1.2])


class TestRateShape:
    @pytest.mark.parametrize("L", [0.2, 0.5, 2.0, 5.0])
    def test_matches_nome_derivatives(self, L):
        ev = theta4_dq(math.exp(-L))
        expected = -math.exp(-L) * ev.dq2 / ev.dq
        assert theta4_rate_shape(L) == pytest.approx(expected, rel=1e-8)

    def test_branches_join_at_one(self):
        assert theta4_rate_shape(1.0 - 1e-9) == pytest.approx(theta4_rate_shape(1.0), rel=1e-6)

    def test_small_nome_form(self):
        assert small_nome_rate_shape(12.0) == pytest.approx(theta4_rate_shape(12.0), rel=1e-12)

    def test_nonpositive_L(self):
        with pytest.raises(DomainError):
            theta4_rate_shape(0.0)


class TestTheta1:
    @pytest.mark.parametrize("q", [0.1, 0.3, 0.7])
    def test_lattice_sum_equals_series_ratio(self, q):
        z = math.pi / 20
        assert lattice_log_derivative(z, q) == pytest.approx(theta1_log_derivative(z, q), rel=1e-8)

    def test_zero_nome(self):
        assert lattice_log_derivative(0.3, 0.0) == 0.0

    @pytest.mark.parametrize("q", [0.2, 0.9])
    def test_value_and_nome_derivative(self, q):
        z = 0.7
        ev = theta1_dq(z, q)
        with mpmath.workdps(40):
            assert ev.value == pytest.approx(float(mpmath.jtheta(1, z, q)), rel=1e-10)
            deriv = mpmath.diff(lambda x: mpmath.jtheta(1, z, x), q)
            assert ev.dq == pytest.approx(float(deriv), rel=1e-8)

    def test_phase_domain(self):
        with pytest.raises(DomainError):
            theta1_dq(0.0, 0.3)


# At n = 40 the closed forms drift from the exact rate at order t (pi / n)^4: about 6-9% for
# k = 2 over t_c + 5 .. 10 n and 16-21% for k = n/2 over t_c + 5 .. 75, 33% by t = 400.
K2_RATE_TOL = 0.10
HALF_RATE_TOL = 0.25


class TestTransition:
    def test_k2_matches_exact_rate(self):
        params = make_params(40, 2, 5)
        lambda_1 = characteristic_rates(params)[1]
        rates = effective_rate_profile(params, 400, 2)
        for t in range(42, 400, 17):
            assert rate_transition_k2(params, t) == pytest.approx(rates[t] - lambda_1, rel=K2_RATE_TOL)

    def test_half_matches_exact_rate(self):
        params = make_params(40, 20, 5)
        lambda_1 = characteristic_rates(params)[1]
        rates = effective_rate_profile(params, 75, 20)
        for t in range(24, 75, 5):
            assert rate_transition_half(params, t) == pytest.approx(rates[t] - lambda_1, rel=HALF_RATE_TOL)

    def test_requires_t_after_plateau(self):
        params = make_params(40, 2, 5)
        with pytest.raises(ParameterError):
            rate_transition_k2(params, 10)
        with pytest.raises(ParameterError):
            rate_transition_half(make_params(40, 20, 5), 10)

    def test_requires_matching_cut(self):
        with pytest.raises(ParameterError):
            rate_transition_k2(make_params(40, 3, 5), 100)
        with pytest.raises(ParameterError):
            rate_transition_half(make_params(40, 2, 5), 100)


class TestAsymptotes:
    n = 2000

    def test_k2_short_time(self):
        params = make_params(self.n, 2, 2)
        for t in range(10 * self.n, 25 * self.n + 1, 5 * self.n):
            assert rate_transition_k2(params, t) == pytest.approx(asymptote_k2(params, t, "short"), rel=0.10)

    def test_k2_long_time(self):
        params = make_params(self.n, 2, 2)
        for factor in (0.15, 0.2, 0.3):
            t = int(factor * self.n**2)
            assert rate_transition_k2(params, t) == pytest.approx(asymptote_k2(params, t, "long"), rel=0.10)

    def test_half_short_time(self):
        params = make_params(self.n, self.n // 2, 2)
        for t in range(10 * self.n, 20 * self.n + 1, 5 * self.n):
            assert rate_transition_half(params, t) == pytest.approx(asymptote_half(params, t, "short"), rel=0.10)

    def test_half_long_time(self):
        params = make_params(self.n, self.n // 2, 2)
        for factor in (0.05, 0.1, 0.2):
            t = int(factor * self.n**2)
            assert rate_transition_half(params, t) == pytest.approx(asymptote_half(params, t, "long"), rel=0.10)

    def test_scaling_collapse(self):
        small, large = make_params(1000, 2, 2), make_params(2000, 2, 2)
        for x in (0.05, 0.1, 0.2):
            a = rate_transition_k2(small, int(x * 1000**2)) * 1000**2
            b = rate_transition_k2(large, int(x * 2000**2)) * 2000**2
            assert a == pytest.approx(b, rel=0.02)

    def test_exponential_shape_close_to_cosine_power(self):
        params = make_params(self.n, 2, 2)
        t = self.n**2 // 5
        assert asymptote_k2(params, t, "long", exponential_shape=True) == pytest.approx(
            asymptote_k2(params, t, "long"), rel=1e-3
        )

    def test_unknown_regime(self):
        with pytest.raises(ParameterError):
            asymptote_k2(make_params(40, 2, 2), 10, "medium")


class TestRegime:
    def test_annotation(self):
        params = make_params(40, 2, 5)
        assert regime(params, 10) is Regime.PLATEAU
        assert regime(params, 100) is Regime.TRANSITION
        assert regime(params, 400) is Regime.ASYMPTOTIC
