"""Tests for the closed-form spectrum, expansion coefficients and the two Delta I representations."""
import sys
import os
import math

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from model.errors import ParameterError
from model.params import make_params, timescales
from model.propagator import ArithmeticMode, build_propagator, delta_purity, iterate_trajectory
from spectral import (
    CoefficientMethod,
    MagicSumTable,
    SeriesEvaluator,
    biorthogonality_matrix,
    coefficients,
    completeness_residual,
    diverging_term_estimate,
    edge_kernel_term,
    eigen_pair,
    eigenvalues,
    first_term_rate,
    kernel_enters_explicitly,
    r_min,
    spectral_delta_direct,
    spectral_delta_series,
)
from spectral.eigen import to_mp


def _exact_deltas(params, t_max):
    traj = iterate_trajectory(params, t_max, ArithmeticMode.RATIONAL, components=[params.k])
    return delta_purity(traj)


class TestEigenpairs:
    def test_eigenvalues_closed_form(self):
        params = make_params(12, 2, 2)
        lams = eigenvalues(params)
        assert len(lams) == 5
        assert lams[0] == pytest.approx((0.8 * math.cos(math.pi / 12)) ** 2)
        assert np.all(np.diff(lams) < 0)

    def test_right_eigenvector_residual(self):
        params = make_params(12, 3, 2)
        T = build_propagator(params, ArithmeticMode.RATIONAL).T
        for j in (1, 3, 5):
            pair = eigen_pair(params, j)
            with mpmath.workdps(pair.dps):
                worst = max(
                    abs(mpmath.fsum(to_mp(T[a, b]) * pair.R_tilde[b] for b in range(10)) - pair.lambda_j * pair.R_tilde[a])
                    for a in range(10)
                )
                scale = max(abs(x) for x in pair.R_tilde)
                assert worst < mpmath.mpf(10) ** -25 * scale

    def test_left_eigenvector_residual(self):
        params = make_params(12, 3, 2)
        T = build_propagator(params, ArithmeticMode.RATIONAL).T
        pair = eigen_pair(params, 2)
        with mpmath.workdps(pair.dps):
            worst = max(
                abs(mpmath.fsum(pair.L_tilde[a] * to_mp(T[a, b]) for a in range(10)) - pair.lambda_j * pair.L_tilde[b])
                for b in range(10)
            )
            assert worst < mpmath.mpf(10) ** -25 * max(abs(x) for x in pair.L_tilde)

    def test_normalization_sign_alternates(self):
        params = make_params(20, 2, 5)
        for j in range(1, params.half + 1):
            assert mpmath.sign(eigen_pair(params, j).N_j) == (-1) ** (j + 1)

    @pytest.mark.parametrize("j", [1, 19])
    def test_skin_localization_flips_between_sides(self, j):
        pair = eigen_pair(make_params(40, 5, 5), j)
        q = len(pair.R_tilde) // 4
        with mpmath.workdps(pair.dps):
            right_head = mpmath.fsum(abs(x) for x in pair.R_tilde[:q])
            right_tail = mpmath.fsum(abs(x) for x in pair.R_tilde[-q:])
            left_head = mpmath.fsum(abs(x) for x in pair.L_tilde[:q])
            left_tail = mpmath.fsum(abs(x) for x in pair.L_tilde[-q:])
            assert right_head > mpmath.mpf(10) ** 10 * right_tail
            assert left_tail > mpmath.mpf(10) ** 10 * left_head

    def test_mode_index_checked(self):
        with pytest.raises(ParameterError):
            eigen_pair(make_params(12, 2, 2), 6)

    def test_biorthogonality(self):
        M = biorthogonality_matrix(make_params(16, 2, 3))
        assert np.allclose(M, np.eye(7), atol=1e-12)

    def test_completeness(self):
        assert completeness_residual(make_params(10, 2, 2)) < 1e-20


class TestCoefficients:
    def test_half_cut_zeros_at_even_modes(self):
        for method in CoefficientMethod:
            cset = coefficients(make_params(40, 20, 5), method)
            assert [j for j in range(1, 20) if cset.is_zero(j)] == list(range(2, 20, 2))

    def test_k5_zeros(self):
        cset = coefficients(make_params(40, 5, 5), CoefficientMethod.EXACT)
        assert [j for j in range(1, 20) if cset.is_zero(j)] == [8, 16]

    def test_signs_alternate_across_nonzero_modes(self):
        cset = coefficients(make_params(40, 5, 5), CoefficientMethod.EXACT)
        modes = cset.nonzero_modes()
        signs = [cset.sign(j) for j in modes]
        assert all(a == -b for a, b in zip(signs, signs[1:]))
        for j in modes:
            assert signs[modes.index(j)] == (-1) ** (j + 1) * np.sign(math.sin(5 * math.pi * j / 40))

    def test_magnitudes_grow_with_n(self):
        small = coefficients(make_params(20, 2, 2))
        large = coefficients(make_params(40, 2, 2))
        assert max(large.log_magnitudes) > max(small.log_magnitudes)

    def test_methods_agree_away_from_boundary(self):
        params = make_params(30, 4, 5)
        exact = coefficients(params, CoefficientMethod.EXACT)
        closed = coefficients(params, "closed-form")
        for j in exact.nonzero_modes():
            assert exact.sign(j) == closed.sign(j)
            assert exact.log_magnitude(j) == pytest.approx(closed.log_magnitude(j), abs=1e-3)

    def test_rows(self):
        rows = coefficients(make_params(12, 2, 2)).rows()
        assert [r["j"] for r in rows] == [1, 2, 3, 4, 5]
        assert set(rows[0]) == {"j", "lambda_j", "sign", "log_abs_c"}


class TestRepresentations:
    @pytest.mark.parametrize("n,d", [(20, 2), (20, 5), (40, 5)])
    def test_series_matches_exact_iteration(self, n, d):
        table = MagicSumTable(n)
        for k in (2, n // 4, n // 2, n - 2, n - 1):
            params = make_params(n, k, d)
            deltas = _exact_deltas(params, 4 * n)
            evaluator = SeriesEvaluator(params, table)
            for t in range(0, 4 * n + 1, 7):
                value = spectral_delta_series(params, t, evaluator=evaluator)
                assert value == pytest.approx(float(deltas[t]), rel=1e-8)

    def test_direct_matches_exact_after_kernel(self):
        params = make_params(20, 2, 5)
        t_K = timescales(params).t_K
        deltas = _exact_deltas(params, 40)
        for t in range(t_K + 1, 41, 3):
            assert spectral_delta_direct(params, t).value == pytest.approx(float(deltas[t]), rel=1e-8)

    def test_r_min(self):
        params = make_params(20, 2, 5)
        assert r_min(params, 0) == 9
        assert r_min(params, 8) == 1
        assert r_min(params, 9) == 0
        assert r_min(params, 30) == 0

    def test_last_cut_keeps_p_zero_term(self):
        params = make_params(20, 19, 5)
        assert r_min(params, 0) == 0
        assert kernel_enters_explicitly(params)
        assert not kernel_enters_explicitly(make_params(20, 18, 5))
        assert edge_kernel_term(params, 0) == pytest.approx(4 / 65, rel=1e-15)
        assert edge_kernel_term(params, 1) == 0.0
        assert edge_kernel_term(make_params(20, 18, 5), 0) == 0.0

    @pytest.mark.parametrize("d", [2, 5])
    def test_last_cut_series_at_t0(self, d):
        params = make_params(20, 19, d)
        exact = float(_exact_deltas(params, 0)[0])
        assert spectral_delta_series(params, 0) == pytest.approx(exact, rel=1e-8)
        without_kernel = spectral_delta_series(params, 0) - edge_kernel_term(params, 0)
        assert without_kernel == pytest.approx(spectral_delta_direct(params, 0).value, rel=1e-8)

    def test_unrenormalized_series_diverges_below_t_K(self):
        params = make_params(20, 2, 5)
        exact = float(_exact_deltas(params, 2)[2])
        evaluator = SeriesEvaluator(params)
        terms = evaluator.terms(2, 0, 3)
        assert max(abs(x) for x in terms) > 1e3 * abs(exact)

    def test_diverging_estimate_range(self):
        params = make_params(20, 2, 5)
        assert diverging_term_estimate(params, 0) == 1.0
        with pytest.raises(ParameterError):
            diverging_term_estimate(params, 9)

    def test_kernel_free_divergence_slope(self):
        params = make_params(100, 25, 2)
        ts = np.arange(2, timescales(params).t_K - 4)
        logs = [math.log(abs(spectral_delta_direct(params, int(t), include_boundary_tail=False).value)) for t in ts]
        fitted = np.polyfit(ts, logs, 1)[0]
        # the j = n/2 - 1 mode dominates, so the fitted slope is ln lambda_{n/2-1} ~ 2 ln(2 pi alpha / n)
        assert fitted == pytest.approx(math.log(eigenvalues(params)[-1]), rel=0.01)
        estimate = math.log(diverging_term_estimate(params, 3) / diverging_term_estimate(params, 2))
        assert estimate - fitted == pytest.approx(2 * math.log(2), rel=0.05)

    def test_negative_time_rejected(self):
        with pytest.raises(ParameterError):
            spectral_delta_series(make_params(20, 2, 2), -1)


class TestFirstTermRate:
    def test_negative_power_rejected(self):
        params = make_params(40, 2, 5)
        with pytest.raises(ParameterError):
            first_term_rate(params, 10)

    def test_matches_table_ratio(self):
        params = make_params(40, 2, 5)
        table = MagicSumTable(40)
        t = 60
        p = 2 * t + 2 - 40 + 1
        expected = (2 * float(params.alpha)) ** 2 * float(table.exact(2, p + 2) / table.exact(2, p))
        assert first_term_rate(params, t, table) == pytest.approx(expected, rel=1e-12)
