"""Tests for random-matrix sampling and the spectral transform."""

import numpy as np
import pytest
from scipy import stats

from src.core.ensembles import (
    HermitianMatrix,
    Spectrum,
    eigen_decompose,
    f_curve,
    f_transform,
    sample_gue,
    sample_gue_spectrum,
    sample_haar,
    sample_poisson_spectrum,
)
from src.core.errors import InvalidDimensionError, NumericError, NumericInputError
from src.core.rng import GUE_STREAM, HAAR_STREAM, make_rng


class TestRng:
    """Test seeded streams."""

    def test_same_key_same_draws(self):
        """Test that equal keys give equal draws."""
        a = make_rng(7, GUE_STREAM, 3).standard_normal(5)
        b = make_rng(7, GUE_STREAM, 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_streams_are_independent(self):
        """Test that streams do not overlap."""
        a = make_rng(7, GUE_STREAM).standard_normal(5)
        b = make_rng(7, HAAR_STREAM).standard_normal(5)
        assert not np.array_equal(a, b)

    def test_negative_seed_is_accepted(self):
        """Test a negative seed."""
        make_rng(-1, GUE_STREAM).standard_normal()


class TestGUE:
    """Test GUE Hamiltonian sampling."""

    def test_hermitian_by_construction(self):
        """Test exact Hermiticity."""
        H = sample_gue(2, seed=5).entries
        assert H[0, 1] == np.conj(H[1, 0])
        assert np.array_equal(H, H.conj().T)

    def test_deterministic_per_seed(self):
        """Test determinism per seed."""
        assert np.array_equal(sample_gue(16, 3).entries, sample_gue(16, 3).entries)
        assert not np.array_equal(sample_gue(16, 3).entries, sample_gue(16, 4).entries)

    def test_dim_one_variance(self):
        """A 1x1 GUE matrix is N(0, 1)."""
        draws = np.array([sample_gue(1, 0, index=k).entries[0, 0].real for k in range(100_000)])
        assert abs(draws.var() - 1.0) < 0.02

    def test_offdiagonal_variance(self):
        """Test off-diagonal variance 1/N."""
        N = 32
        H = np.stack([sample_gue(N, 11, index=k).entries for k in range(200)])
        rows, cols = np.triu_indices(N, k=1)
        offdiag = H[:, rows, cols]
        assert abs(np.mean(np.abs(offdiag) ** 2) * N - 1) < 0.02
        assert abs(np.var(offdiag.real) * 2 * N - 1) < 0.03

    def test_semicircle_support(self):
        """Test that levels stay in [-2, 2] at large N."""
        energies = sample_gue_spectrum(256, seed=2).energies
        outside = np.mean(np.abs(energies) > 2.1)
        assert outside < 0.01

    def test_conjugation_invariance(self):
        """Spacings of V H V^dagger and of H follow the same law (KS p > 0.01)."""
        N, draws = 8, 1000
        V = sample_haar(N, 99).entries

        def middle_spacing(entries):
            energies = np.linalg.eigvalsh(entries)
            return energies[N // 2] - energies[N // 2 - 1]

        plain = [middle_spacing(sample_gue(N, 5, index=k).entries) for k in range(draws)]
        conjugated = [
            middle_spacing(V @ sample_gue(N, 5, index=draws + k).entries @ V.conj().T)
            for k in range(draws)
        ]
        assert stats.ks_2samp(plain, conjugated).pvalue > 0.01

    def test_zero_dimension(self):
        """Test GUE at N = 0."""
        with pytest.raises(InvalidDimensionError):
            sample_gue(0, 1)


class TestHaar:
    """Test Haar-random unitaries."""

    def test_dim_one_is_phase(self):
        """Test that a 1x1 unitary is a phase."""
        U = sample_haar(1, 9).entries
        assert abs(abs(U[0, 0]) - 1) < 1e-12

    @pytest.mark.parametrize("dim", [2, 7, 64])
    def test_unitarity(self, dim):
        """Test unitarity."""
        assert sample_haar(dim, 1).unitarity_error() < 1e-10

    def test_second_moment(self):
        """<|U_ij|^2> = 1/N."""
        N = 8
        values = np.array([np.abs(sample_haar(N, 4, index=k).entries[2, 5]) ** 2
                           for k in range(10_000)])
        stderr = values.std(ddof=1) / np.sqrt(values.size)
        assert abs(values.mean() - 1 / N) < 3 * stderr

    def test_left_invariance(self):
        """First-column moduli of V U and of U follow the same law (KS p > 0.01)."""
        N, draws = 6, 1000
        V = sample_haar(N, 77, index=0).entries
        plain = [abs(sample_haar(N, 78, index=k).entries[0, 0]) for k in range(draws)]
        rotated = [
            abs((V @ sample_haar(N, 78, index=draws + k).entries)[0, 0]) for k in range(draws)
        ]
        assert stats.ks_2samp(plain, rotated).pvalue > 0.01

    def test_zero_dimension(self):
        """Test Haar at N = 0."""
        with pytest.raises(InvalidDimensionError):
            sample_haar(0, 1)


class TestPoisson:
    """Test uncorrelated flat spectra."""

    def test_support_and_sorted(self):
        """Test support and ordering."""
        energies = sample_poisson_spectrum(4, 3).energies
        assert energies.size == 4
        assert np.all(np.abs(energies) <= 2)
        assert np.all(np.diff(energies) >= 0)

    def test_moments(self):
        """Test mean and variance of the flat density."""
        energies = sample_poisson_spectrum(100_000, 8).energies
        assert abs(energies.mean()) < 0.02
        assert abs(energies.var() - 4 / 3) < 0.02

    def test_spacings_are_exponential(self):
        """No level repulsion: P(s < 0.1 mean spacing) is close to 1 - exp(-0.1)."""
        energies = sample_poisson_spectrum(10_000, 5).energies
        spacings = np.diff(energies)
        spacings = spacings / spacings.mean()
        assert abs(np.mean(spacings < 0.1) - (1 - np.exp(-0.1))) < 0.015

    def test_zero_dimension(self):
        """Test Poisson at N = 0."""
        with pytest.raises(InvalidDimensionError):
            sample_poisson_spectrum(0, 1)


class TestEigenDecompose:
    """Test eigendecomposition."""

    def test_identity(self):
        """Test the identity."""
        spec, W = eigen_decompose(HermitianMatrix(np.eye(2)))
        assert np.allclose(spec.energies, [1, 1])
        assert W.unitarity_error() < 1e-12

    def test_diagonal(self):
        """Test a diagonal matrix."""
        spec, W = eigen_decompose(HermitianMatrix(np.diag([1.0, -1.0])))
        assert np.allclose(spec.energies, [-1, 1])
        assert np.allclose(np.abs(W.entries), [[0, 1], [1, 0]])

    def test_reconstruction(self):
        """Test that W diag(E) W^dagger rebuilds H."""
        H = sample_gue(16, 21)
        spec, W = eigen_decompose(H)
        rebuilt = (W.entries * spec.energies) @ W.entries.conj().T
        assert np.max(np.abs(rebuilt - H.entries)) < 1e-10

    def test_non_finite(self):
        """Test non-finite input."""
        H = np.eye(3, dtype=complex)
        H[1, 1] = np.nan
        with pytest.raises(NumericInputError):
            eigen_decompose(HermitianMatrix(H))
        assert issubclass(NumericInputError, NumericError)


class TestSpectralTransform:
    """Test f(t)."""

    def test_value_at_zero(self):
        """Test f(0) = 1."""
        assert f_transform(sample_gue_spectrum(8, 1), 0.0).value == pytest.approx(1.0)

    def test_bounded_on_random_spectra(self):
        """Test """
        rng = np.random.default_rng(0)
        for _ in range(1000):
            spec = Spectrum(rng.uniform(-3, 3, rng.integers(1, 20)))
            t = rng.uniform(-50, 50)
            assert abs(f_transform(spec, t).value) <= 1 + 1e-12
            assert f_transform(spec, 0.0).value == pytest.approx(1.0)

    def test_two_levels(self):
        """Test a two-level spectrum."""
        spec = Spectrum([-1.0, 1.0])
        assert f_transform(spec, np.pi / 2).value == pytest.approx(0.0, abs=1e-15)

    def test_curve_matches_pointwise(self):
        """Test the curve against single points."""
        spec = sample_poisson_spectrum(10, 3)
        times = np.linspace(0, 5, 11)
        curve = f_curve(spec, times)
        assert curve[4] == pytest.approx(f_transform(spec, times[4]).value)

    def test_spectrum_sorted_and_frozen(self):
        """Test that spectra are sorted and read-only."""
        spec = Spectrum([3.0, -1.0, 2.0])
        assert list(spec.energies) == [-1.0, 2.0, 3.0]
        assert spec.dim == 3
        with pytest.raises(ValueError):
            spec.energies[0] = 5.0

    def test_non_finite_spectrum(self):
        """Test non-finite energies."""
        with pytest.raises(NumericInputError):
            Spectrum([0.0, np.inf])
