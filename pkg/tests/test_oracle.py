"""Tests for the Haar staircase-circuit Monte Carlo."""
import sys
import os

import numpy as np
import pytest
from scipy.stats import chisquare

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from lab import MonteCarloExperiment
from model.errors import ParameterError, ResourceLimitError
from model.rng import SeededStreams
from oracle import (
    CircuitState,
    apply_gate,
    apply_staircase_layer,
    mc_average,
    purities,
    purity_of_cut,
    random_state_purity,
    sample_haar_gate,
    single_realization,
)


class TestGates:
    def test_gate_is_unitary(self):
        rng = SeededStreams(1).stream(0)
        for d in (2, 3):
            U = sample_haar_gate(d, rng)
            assert np.allclose(U.conj().T @ U, np.eye(d * d), atol=1e-12)

    def test_eigenphases_are_flat(self):
        rng = SeededStreams(7).stream(0)
        phases = np.concatenate([np.angle(np.linalg.eigvals(sample_haar_gate(2, rng))) for _ in range(1000)])
        counts, _ = np.histogram(phases, bins=12, range=(-np.pi, np.pi))
        assert chisquare(counts).pvalue > 1e-3

    def test_identity_gate_leaves_state(self):
        state = CircuitState.product(3, 2)
        out = apply_gate(state, np.eye(4), 2)
        assert np.array_equal(out.amplitudes, state.amplitudes)

    @pytest.mark.parametrize("d", [2, 3])
    def test_matrix_element_second_moment(self, d):
        rng = SeededStreams(21).stream(d)
        samples = np.array([abs(sample_haar_gate(d, rng)[0, 0]) ** 2 for _ in range(20_000)])
        stderr = samples.std(ddof=1) / np.sqrt(len(samples))
        assert abs(samples.mean() - 1 / d**2) < 4 * stderr

    def test_two_qudit_gate_is_matrix_product(self):
        rng = SeededStreams(5).stream(0)
        psi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        psi /= np.linalg.norm(psi)
        U = sample_haar_gate(3, rng)
        out = apply_gate(CircuitState(amplitudes=psi, n=2, d=3), U, 1)
        assert np.allclose(out.amplitudes, U @ psi, atol=1e-14)

    def test_gate_shape_checked(self):
        with pytest.raises(ParameterError):
            apply_gate(CircuitState.product(3, 2), np.eye(9), 1)
        with pytest.raises(ParameterError):
            apply_gate(CircuitState.product(3, 2), np.eye(4), 3)


class TestCircuitState:
    def test_product_state_is_pure_on_every_cut(self):
        assert np.allclose(purities(CircuitState.product(5, 2)), 1.0)

    def test_layer_preserves_norm(self):
        rng = SeededStreams(2).stream(0)
        state = CircuitState.product(5, 3)
        for _ in range(3):
            state = apply_staircase_layer(state, [sample_haar_gate(3, rng) for _ in range(4)])
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_norm_holds_over_many_layers(self):
        rng = SeededStreams(8).stream(0)
        state = CircuitState.product(4, 2)
        for _ in range(100):
            state = apply_staircase_layer(state, [sample_haar_gate(2, rng) for _ in range(3)])
        assert abs(state.norm() - 1.0) <= 1e-12

    def test_layer_applies_bonds_left_to_right(self):
        rng = SeededStreams(13).stream(0)
        g1, g2 = sample_haar_gate(2, rng), sample_haar_gate(2, rng)
        start = CircuitState.product(3, 2)
        layer = apply_staircase_layer(start, [g1, g2]).amplitudes
        in_order = apply_gate(apply_gate(start, g1, 1), g2, 2).amplitudes
        reversed_order = apply_gate(apply_gate(start, g2, 2), g1, 1).amplitudes
        assert np.allclose(layer, in_order, atol=1e-14)
        assert not np.allclose(layer, reversed_order, atol=1e-6)

    def test_bell_state_purity(self):
        bell = CircuitState(amplitudes=np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2), n=2, d=2)
        assert purity_of_cut(bell, 1) == pytest.approx(0.5, abs=1e-15)

    def test_complementary_cuts_agree(self):
        n, d = 5, 2
        rng = SeededStreams(17).stream(0)
        psi = rng.standard_normal(d**n) + 1j * rng.standard_normal(d**n)
        psi /= np.linalg.norm(psi)
        state = CircuitState(amplitudes=psi, n=n, d=d)
        flipped = CircuitState(amplitudes=psi.reshape((d,) * n).transpose().reshape(-1), n=n, d=d)
        for k in range(1, n):
            assert purity_of_cut(state, k) == pytest.approx(purity_of_cut(flipped, n - k), abs=1e-12)

    def test_layer_gate_count(self):
        with pytest.raises(ParameterError):
            apply_staircase_layer(CircuitState.product(4, 2), [np.eye(4)])

    def test_cut_range(self):
        with pytest.raises(ParameterError):
            purity_of_cut(CircuitState.product(4, 2), 4)

    def test_amplitude_count_checked(self):
        with pytest.raises(ParameterError):
            CircuitState(amplitudes=np.zeros(5, dtype=complex), n=2, d=2)


class TestMonteCarlo:
    def test_mean_matches_exact_purity(self):
        result = mc_average(4, 2, 1, 2000, seed=11)
        assert result.mean[0, 1] == 1.0
        assert abs(result.mean[1, 1] - 0.72) < 4 * result.stderr[1, 1]

    def test_minimum_realizations(self):
        with pytest.raises(ParameterError):
            mc_average(4, 2, 1, 10, seed=0)

    def test_state_limit(self):
        with pytest.raises(ResourceLimitError):
            mc_average(4, 2, 1, 200, seed=0, state_limit=8)

    def test_reproducible(self):
        a = single_realization(4, 2, 3, seed=5, realization=2)
        b = single_realization(4, 2, 3, seed=5, realization=2)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, single_realization(4, 2, 3, seed=5, realization=3))

    def test_threads_do_not_change_result(self):
        serial = mc_average(4, 2, 2, 100, seed=3)
        threaded = mc_average(4, 2, 2, 100, seed=3, threads=4)
        assert np.array_equal(serial.mean, threaded.mean)
        assert np.array_equal(serial.stderr, threaded.stderr)

    def test_frame_layout(self):
        frame = mc_average(4, 2, 2, 100, seed=3).to_frame()
        assert list(frame.columns) == ["k", "t", "mean", "stderr", "realizations"]
        assert len(frame) == 3 * 3
        assert list(frame["k"][:3]) == [1, 1, 1]


class TestRandomState:
    def test_page_purity(self):
        estimate = random_state_purity(6, 2, 3, samples=400, seed=4)
        assert abs(estimate.mean - estimate.expected) < 5 * estimate.stderr
        assert estimate.expected == pytest.approx(16 / 65)


class TestExperiment:
    def test_coverage(self):
        result = MonteCarloExperiment(n=4, d=2, t_max=3, realizations=400, seed=9).run()
        assert result.annotations["coverage"] >= 0.75
        frame = result.frames["montecarlo"]
        assert frame.loc[frame["k"] == 1, "exact"].isna().all()
        assert frame.loc[frame["k"] == 2, "exact"].iloc[1] == pytest.approx(0.72)
