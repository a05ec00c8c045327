"""Tests for the Jordan-kernel basis and the kernel cancellation check."""
import sys
import os
from fractions import Fraction

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from kernel import (
    cancellation_check,
    kernel_left_vectors,
    kernel_matrix,
    kernel_power_contribution,
    kernel_right_vectors,
    lift_to_A,
    rescale_alpha,
    steady_state_partner,
)
from kernel.basis import kernel_basis, lifted_basis, nilpotency_degree
from model.errors import ParameterError
from model.params import make_params, timescales
from model.propagator import ArithmeticMode, build_propagator, delta_purity, iterate_trajectory
from spectral import MagicSumTable, SeriesEvaluator
from spectral.eigen import default_dps, spectral_projector_sum, steady_state_vectors, to_mp


class TestKernelVectors:
    @pytest.mark.parametrize("n", [6, 12, 20])
    def test_closed_form_matches_recursion(self, n):
        assert kernel_right_vectors(n) == kernel_right_vectors(n, method="recursion")

    def test_fourth_vector(self):
        r4 = kernel_right_vectors(12)[3]
        assert r4[:8] == (-1, 0, 1, 1, 1, -5, 4, -1)
        assert all(x == 0 for x in r4[8:])

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            kernel_right_vectors(12, method="guess")

    def test_left_vectors_biorthonormal(self):
        rights = kernel_right_vectors(14)
        lefts = kernel_left_vectors(14)
        for i, r in enumerate(rights):
            for j, l in enumerate(lefts):
                assert sum(a * b for a, b in zip(r, l)) == (1 if i == j else 0)

    def test_small_n_rejected(self):
        with pytest.raises(ParameterError):
            kernel_basis(4)


class TestJordanChain:
    def test_T_shifts_right_vectors(self):
        params = make_params(12, 2, 3)
        T = build_propagator(params, ArithmeticMode.RATIONAL).T
        basis = rescale_alpha(kernel_basis(12), params.alpha)
        for k in range(1, basis.dimension + 1):
            assert list(T.dot(basis.r(k))) == list(basis.r(k - 1))

    def test_A_shifts_lifted_vectors(self):
        params = make_params(10, 2, 2)
        A = build_propagator(params, ArithmeticMode.RATIONAL).matrix
        basis = lifted_basis(params)
        for k in range(1, basis.dimension + 1):
            assert list(A.dot(basis.r(k))) == list(basis.r(k - 1))
            assert list(basis.l(k).dot(A)) == list(basis.l(k + 1))

    def test_lifting_pads_and_refuses_twice(self):
        params = make_params(10, 2, 2)
        basis = lifted_basis(params)
        assert basis.lifted
        assert all(len(r) == 10 and r[0] == 0 and r[-1] == 0 for r in basis.right)
        assert basis.left[-1][-1] == basis.b[-1]
        with pytest.raises(ParameterError):
            lift_to_A(basis, params)

    def test_kernel_matrix_nilpotent(self):
        params = make_params(10, 2, 5)
        assert nilpotency_degree(kernel_matrix(params)) == params.half

    def test_steady_state_partner(self):
        params = make_params(12, 3, 2)
        A = build_propagator(params, ArithmeticMode.RATIONAL).matrix
        R0p = steady_state_partner(params)
        _, L0, L0p = steady_state_vectors(params)
        assert list(A.dot(R0p)) == list(R0p)
        assert L0p.dot(R0p) == 1
        assert L0.dot(R0p) == 0


class TestCancellation:
    def test_reference_value(self):
        params = make_params(20, 2, 5)
        assert float(kernel_power_contribution(params, 8)) == pytest.approx(-0.32, rel=1e-12)

    def test_vanishes_after_kernel(self):
        params = make_params(20, 2, 5)
        assert kernel_power_contribution(params, 9) == 0

    @pytest.mark.parametrize("n,d", [(20, 2), (20, 5), (40, 5)])
    def test_kernel_cancels_nonpositive_terms(self, n, d):
        table = MagicSumTable(n)
        ks = range(2, n) if n <= 20 else sorted(set(range(2, n, 3)) | {n - 1})
        for k in ks:
            params = make_params(n, k, d)
            t_K = timescales(params).t_K
            deltas = delta_purity(iterate_trajectory(params, t_K, ArithmeticMode.RATIONAL, components=[k]), k)
            evaluator = SeriesEvaluator(params, table)
            for t in range(t_K + 1):
                report = cancellation_check(params, t, exact_delta=deltas[t], evaluator=evaluator)
                assert report.ok, report.row()

    def test_report_row(self):
        report = cancellation_check(make_params(12, 2, 2), 1)
        row = report.row()
        assert row["t"] == 1 and row["ok"] is True
        assert Fraction(row["kernel_exact"]) == report.kernel

    def test_time_outside_kernel_range(self):
        with pytest.raises(ParameterError):
            cancellation_check(make_params(12, 2, 2), 10)


class TestLastCut:
    """k = n - 1: t_c = t_K = 0 and the kernel is added to the series at t = 0."""

    def test_kernel_value_and_support(self):
        params = make_params(20, 19, 5)
        assert kernel_power_contribution(params, 0) == Fraction(4, 65)
        assert kernel_power_contribution(params, 1) == 0
        assert kernel_power_contribution(params, 2) == 0

    @pytest.mark.parametrize("d", [2, 5])
    def test_kernel_does_not_cancel_p_zero_term(self, d):
        params = make_params(20, 19, d)
        p_zero = SeriesEvaluator(params).term(0, 0)
        assert abs(float(kernel_power_contribution(params, 0)) + p_zero) > 0.01

    @pytest.mark.parametrize("d", [2, 5])
    def test_report_marks_explicit_kernel(self, d):
        params = make_params(20, 19, d)
        report = cancellation_check(params, 0)
        assert report.explicit_kernel
        assert report.ok, report.row()
        assert report.row()["kernel_mode"] == "explicit"
        assert report.renormalized_delta == pytest.approx(float(report.exact_delta), rel=1e-8)

    def test_other_cuts_cancel(self):
        report = cancellation_check(make_params(20, 18, 5), 0)
        assert not report.explicit_kernel
        assert report.row()["kernel_mode"] == "cancelled"


class TestSectors:
    def test_kernel_and_spectral_parts_annihilate(self):
        params = make_params(12, 2, 5)
        dps = default_dps(params.n)
        with mpmath.workdps(dps):
            A_lambda = spectral_projector_sum(params, dps)
            A_ker = np.array([[to_mp(x) for x in row] for row in kernel_matrix(params)], dtype=object)
            scale = max(abs(x) for x in A_ker.flat) * max(abs(x) for x in A_lambda.flat)
            for product in (A_ker.dot(A_lambda), A_lambda.dot(A_ker)):
                assert max(abs(x) for x in product.flat) < mpmath.mpf(10) ** -25 * scale
