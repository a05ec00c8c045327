"""Tests for the arbitrary-precision eigensolver and the perturbed Toeplitz spectra."""
import sys
import os
import math

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from model.errors import ParameterError, PrecisionError
from model.params import make_params
from pseudospectrum import (
    PerturbationConfig,
    collision_epsilon,
    decade_grid,
    eigenvalues,
    kernel_cloud_radius,
    make_context,
    perturbed_spectrum,
    sample_perturbation,
    sweep,
    theory_real_count,
)
from pseudospectrum.perturbation import log10_epsilon, parse_epsilon
from spectral import eigenvalues as closed_form_eigenvalues


def _sorted(values):
    return sorted(values, key=lambda z: (round(z.real, 8), z.imag))


class TestEigensolver:
    def test_context_minimum(self):
        with pytest.raises(ParameterError):
            make_context(32)

    def test_symmetric_two_by_two(self):
        ctx = make_context(128)
        values = eigenvalues(ctx, [[ctx.mpf(2), ctx.mpf(1)], [ctx.mpf(1), ctx.mpf(2)]])
        assert complex(values[0]) == pytest.approx(3.0)
        assert complex(values[1]) == pytest.approx(1.0)

    def test_rotation_has_imaginary_pair(self):
        ctx = make_context(128)
        values = eigenvalues(ctx, [[ctx.mpf(0), ctx.mpf(-1)], [ctx.mpf(1), ctx.mpf(0)]])
        assert _sorted([complex(z) for z in values]) == pytest.approx([-1j, 1j], abs=1e-30)

    def test_matches_numpy(self):
        rng = np.random.default_rng(3)
        M = rng.standard_normal((7, 7))
        ctx = make_context(113)
        values = eigenvalues(ctx, [[ctx.mpf(float(x)) for x in row] for row in M])
        ours = _sorted([complex(z) for z in values])
        ref = _sorted(list(np.linalg.eigvals(M)))
        assert ours == pytest.approx(ref, abs=1e-10)

    def test_non_square_rejected(self):
        ctx = make_context(64)
        with pytest.raises(ParameterError):
            eigenvalues(ctx, [[ctx.mpf(1), ctx.mpf(2)]])


class TestEpsilonHandling:
    def test_decade_grid_ascending(self):
        assert decade_grid(5, 6, 0.5) == ("10^-6", "10^-5.5", "10^-5")

    def test_decade_grid_bad_step(self):
        with pytest.raises(ParameterError):
            decade_grid(5, 6, 0)

    def test_parse(self):
        ctx = make_context(128)
        assert float(parse_epsilon(ctx, "10^-5.5")) == pytest.approx(10**-5.5)
        assert float(parse_epsilon(ctx, "3.7e-12")) == pytest.approx(3.7e-12)
        assert log10_epsilon("10^-60") == pytest.approx(-60)
        with pytest.raises(ParameterError):
            parse_epsilon(ctx, "tiny")

    def test_config_validation(self):
        params = make_params(12, 2, 5)
        with pytest.raises(ParameterError):
            PerturbationConfig(params=params, epsilons=("10^-5", "10^-6"))
        with pytest.raises(ParameterError):
            PerturbationConfig(params=params, epsilons=("0",))
        with pytest.raises(ParameterError):
            PerturbationConfig(params=params, epsilons=("10^-5",), realizations=0)

    def test_perturbation_is_reproducible(self):
        assert np.array_equal(sample_perturbation(12, 5, 2), sample_perturbation(12, 5, 2))
        assert not np.array_equal(sample_perturbation(12, 5, 2), sample_perturbation(12, 5, 3))


class TestUnperturbedCore:
    def test_nonzero_eigenvalues_and_jordan_cloud(self):
        params = make_params(12, 2, 5)
        config = PerturbationConfig(params=params, epsilons=("10^-5",), precision_bits=256)
        snapshot = perturbed_spectrum(config, "0")
        moduli = sorted(abs(complex(z)) for z in snapshot.eigenvalues)
        assert all(m < 1e-10 for m in moduli[: params.half])
        found = sorted((complex(z).real for z in snapshot.eigenvalues if abs(complex(z)) > 1e-6), reverse=True)
        assert found == pytest.approx(list(closed_form_eigenvalues(params)), rel=1e-12)


class TestPerturbedSpectrum:
    def test_precision_floor(self):
        config = PerturbationConfig(params=make_params(12, 2, 5), epsilons=("10^-100",), precision_bits=128)
        with pytest.raises(PrecisionError):
            perturbed_spectrum(config, "10^-100")

    def test_conjugate_pairs(self):
        config = PerturbationConfig(params=make_params(12, 2, 5), epsilons=("10^-10",), precision_bits=128)
        values = perturbed_spectrum(config, "10^-10").as_complex()
        for z in values:
            assert np.min(np.abs(values - np.conj(z))) < 1e-18

    def test_real_count_tracks_theory(self):
        params = make_params(20, 2, 5)
        config = PerturbationConfig(params=params, epsilons=("10^-40", "10^-20"))
        result = sweep(config)
        for row in result.summary():
            assert abs(row["real_count"] - row["theory_count"]) <= 2

    @pytest.mark.slow
    def test_real_count_staircase_n40(self):
        params = make_params(40, 2, 5)
        config = PerturbationConfig(params=params, epsilons=("10^-60", "10^-30", "10^-20", "10^-15"))
        rows = sweep(config).summary()
        assert [row["epsilon"] for row in rows] == list(config.epsilons)
        for row in rows:
            assert abs(row["real_count"] - row["theory_count"]) <= 2, row
        counts = [row["real_count"] for row in rows]
        assert counts == sorted(counts, reverse=True)

    def test_kernel_cloud_scaling(self):
        params = make_params(20, 2, 5)
        config = PerturbationConfig(params=params, epsilons=("10^-60", "10^-40"))
        small, large = (perturbed_spectrum(config, eps) for eps in config.epsilons)
        r_small = kernel_cloud_radius(small, params)
        r_large = kernel_cloud_radius(large, params)
        assert 0.5 < r_small / 10 ** (-60 / 9) < 2.0
        slope = (math.log10(r_large) - math.log10(r_small)) / 20
        assert slope == pytest.approx(1 / 9, rel=0.05)

    def test_threaded_sweep_is_deterministic(self):
        params = make_params(8, 2, 5)
        base = dict(params=params, epsilons=("10^-12", "10^-6"), realizations=2, precision_bits=128)
        serial = sweep(PerturbationConfig(**base, threads=1))
        threaded = sweep(PerturbationConfig(**base, threads=2))
        assert [s.rows() for s in serial.snapshots] == [s.rows() for s in threaded.snapshots]
        assert [row["mean_real_count"] for row in serial.summary()] == [
            row["mean_real_count"] for row in threaded.summary()
        ]


class TestTheory:
    def test_theory_count(self):
        params = make_params(20, 2, 5)
        assert theory_real_count(params, "10^-60") == pytest.approx(9.99, abs=0.02)
        assert theory_real_count(params, "10^-15") == pytest.approx(7.5, abs=0.05)
        assert theory_real_count(make_params(40, 2, 5), "10^-20") == pytest.approx(8.73, abs=0.05)

    def test_theory_count_vanishes_for_large_eps(self):
        assert theory_real_count(make_params(20, 2, 5), "1") == 0.0

    def test_collision_epsilon(self):
        params = make_params(20, 2, 5)
        assert 1e-23 < collision_epsilon(params, 9) < 1e-21
        assert collision_epsilon(params, 1) == pytest.approx(2.7e-8, rel=0.05)
        with pytest.raises(ParameterError):
            collision_epsilon(params, 10)
