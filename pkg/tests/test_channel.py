"""Tests for the induced qubit channel."""

import numpy as np
import pytest

from src.core.channel import (
    PAULI,
    DensityMatrix,
    EnvironmentSpec,
    PauliTransferMatrix,
    alpha_from_spectrum,
    alpha_values,
    apply_ptm,
    evolution_operator,
    evolve_reduced,
    extract_ptm,
    haar_average_ptm,
    haar_sample_ptms,
    partial_trace_env,
    ptm_curve,
)
from src.core.ensembles import (
    Spectrum,
    UnitaryMatrix,
    eigen_decompose,
    f_curve,
    sample_gue,
    sample_gue_spectrum,
    sample_haar,
)
from src.core.errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidDimensionError,
    NormalizationError,
)
from src.core.fluctuations import leading_variance
from src.core.measures import choi_from_ptm
from src.core.spectral import bessel_ratio


def _instance(N: int, seed: int):
    spec, W = eigen_decompose(sample_gue(N, seed))
    return spec, W


class TestDensityMatrix:
    """Test state validation."""

    def test_pure_state(self):
        """Test a pure qubit state."""
        rho = DensityMatrix.pure([1, 1j])
        assert rho.entries[0, 1] == pytest.approx(-0.5j)

    def test_rejects_bad_trace(self):
        """Test that a state without unit trace is rejected."""
        with pytest.raises(NormalizationError):
            DensityMatrix(np.eye(2))

    def test_rejects_non_hermitian(self):
        """Test that a non-Hermitian state is rejected."""
        with pytest.raises(NormalizationError):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_negative(self):
        """Test that a state with a negative eigenvalue is rejected."""
        with pytest.raises(NormalizationError):
            DensityMatrix(np.diag([1.5, -0.5]))


class TestEnvironmentSpec:
    """Test environment states."""

    def test_parse(self):
        """Test parsing of environment states."""
        assert EnvironmentSpec.parse("projector", 4).kind == "projector"
        assert EnvironmentSpec.parse("mixed", 4).kind == "mixed"
        env = EnvironmentSpec.parse("rank:3", 4)
        assert (env.kind, env.rank, env.label) == ("rank", 3, "rank:3")

    @pytest.mark.parametrize("text", ["rank:0", "rank:9", "rank:x", "thermal"])
    def test_parse_errors(self, text):
        """Test malformed environment states."""
        with pytest.raises(NormalizationError):
            EnvironmentSpec.parse(text, 4)

    def test_densities_have_unit_trace(self):
        """Test that every environment density has unit trace."""
        for text in ("projector", "mixed", "rank:2"):
            density = EnvironmentSpec.parse(text, 4).density()
            assert np.trace(density) == pytest.approx(1.0)

    def test_explicit_dimension_mismatch(self):
        """Test an explicit state of the wrong dimension."""
        with pytest.raises(DimensionMismatchError):
            EnvironmentSpec(3, kind="explicit", state=DensityMatrix(np.eye(2) / 2))


class TestPartialTrace:
    """Test reduction to the qubit."""

    def test_product_state(self):
        """Test tracing out the environment of a product state."""
        qubit = DensityMatrix.pure([0.6, 0.8])
        env = EnvironmentSpec(3, kind="mixed")
        joint = DensityMatrix(np.kron(qubit.entries, env.density()))
        assert np.allclose(partial_trace_env(joint, 3).entries, qubit.entries)

    def test_dimension_mismatch(self):
        """Test partial trace with a mismatched environment."""
        joint = DensityMatrix(np.eye(6) / 6)
        with pytest.raises(DimensionMismatchError):
            partial_trace_env(joint, 2)


class TestPTM:
    """Test Pauli transfer matrix extraction."""

    def test_identity_at_time_zero(self):
        """Test that the PTM is the identity at t = 0."""
        spec, W = _instance(8, 1)
        ptm = extract_ptm(W, spec, EnvironmentSpec(4), 0.0)
        assert np.allclose(ptm.entries, np.eye(4), atol=1e-12)

    def test_trace_preservation(self):
        """Test that row 3 stays (0, 0, 0, 1)."""
        spec, W = _instance(16, 2)
        for env in (EnvironmentSpec(8), EnvironmentSpec(8, kind="mixed")):
            for ptm in ptm_curve(W, spec, env, np.linspace(0, 20, 41)):
                assert PauliTransferMatrix(ptm).trace_preservation_error() < 1e-10
                assert np.all(np.abs(ptm) <= 1 + 1e-10)

    def test_decoupled_environment(self):
        """A product eigenbasis with a flat qubit spectrum leaves the qubit alone."""
        M = 3
        energies = np.tile(np.array([0.3, -1.2, 0.7]), 2)
        W = UnitaryMatrix(np.kron(np.eye(2), sample_haar(M, 6).entries))
        spec = Spectrum(energies)
        # Spectrum sorts its energies; reorder W's columns to match
        order = np.argsort(energies, kind="stable")
        W = UnitaryMatrix(W.entries[:, order])
        ptm = extract_ptm(W, spec, EnvironmentSpec(M), 2.5)
        assert np.allclose(ptm.entries, np.eye(4), atol=1e-10)

    def test_matches_direct_evolution(self):
        """PTM action equals evolving rho x rho_E and tracing out the environment."""
        spec, W = _instance(8, 3)
        rng = np.random.default_rng(4)
        for env in (EnvironmentSpec(4), EnvironmentSpec(4, kind="rank", rank=2)):
            for t in (0.3, 1.7, 6.0):
                ptm = extract_ptm(W, spec, env, t)
                vector = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                rho = DensityMatrix.pure(vector)
                direct = evolve_reduced(W, spec, env, rho, t)
                assert np.allclose(apply_ptm(ptm, rho).entries, direct.entries, atol=1e-10)

    def test_linearity(self):
        """Test that the PTM acts linearly on mixtures."""
        spec, W = _instance(8, 5)
        ptm = extract_ptm(W, spec, EnvironmentSpec(4), 1.1)
        rho0, rho1 = DensityMatrix.pure([1, 0]), DensityMatrix.pure([1, 1j])
        mix = DensityMatrix(0.3 * rho0.entries + 0.7 * rho1.entries)
        expected = 0.3 * apply_ptm(ptm, rho0).entries + 0.7 * apply_ptm(ptm, rho1).entries
        assert np.allclose(apply_ptm(ptm, mix).entries, expected, atol=1e-12)

    def test_evolution_operator_is_unitary(self):
        """Test unitarity of the evolution operator."""
        spec, W = _instance(6, 8)
        assert evolution_operator(W, spec, 3.3).unitarity_error() < 1e-10

    def test_dimension_checks(self):
        """Test dimension checks of the PTM extraction."""
        spec, W = _instance(8, 1)
        with pytest.raises(DimensionMismatchError):
            ptm_curve(W, spec, EnvironmentSpec(3), [0.0])
        with pytest.raises(DimensionMismatchError):
            ptm_curve(sample_haar(6, 1), spec, EnvironmentSpec(4), [0.0])

    def test_pauli_basis_order(self):
        """Index 3 is the identity."""
        assert np.allclose(PAULI[3], np.eye(2))
        assert np.allclose(PAULI[2], np.diag([1, -1]))


class TestAlpha:
    """Test the per-spectrum Haar average."""

    def test_value_at_zero(self):
        """Test alpha at t = 0."""
        spec = sample_gue_spectrum(10, 1)
        assert alpha_from_spectrum(spec, 0.0) == pytest.approx(1.0)

    def test_formula(self):
        """Test alpha against (N^2 """
        spec = sample_gue_spectrum(6, 2)
        f = f_curve(spec, 1.3)
        assert alpha_from_spectrum(spec, 1.3) == pytest.approx((36 * abs(f) ** 2 - 1) / 35)

    def test_dimension_one(self):
        """Test that alpha is undefined at N = 1."""
        with pytest.raises(InvalidDimensionError):
            alpha_values(Spectrum([0.0]), [0.0])


class TestHaarAverage:
    """Monte Carlo average over Haar eigenvectors against the closed form."""

    def test_requires_two_samples(self):
        """Test that an average needs two draws."""
        spec = sample_gue_spectrum(4, 1)
        with pytest.raises(InsufficientSamplesError):
            haar_average_ptm(spec, EnvironmentSpec(2), 1.0, 1, seed=1)

    def test_worker_count_does_not_change_draws(self):
        """Test that draws do not depend on the worker count."""
        spec = sample_gue_spectrum(4, 1)
        serial = haar_sample_ptms(spec, EnvironmentSpec(2), [0.5, 1.5], 6, seed=3, workers=1)
        threaded = haar_sample_ptms(spec, EnvironmentSpec(2), [0.5, 1.5], 6, seed=3, workers=3)
        assert np.array_equal(serial, threaded)

    def test_average_is_unital_and_completely_positive(self):
        """Column 3 of the averaged PTM is (0, 0, 0, 1) and its Choi state is positive."""
        N = 8
        spec = sample_gue_spectrum(N, 41)
        for t in (0.5, 1.5, 3.0):
            ptm, stderr = haar_average_ptm(spec, EnvironmentSpec(N // 2), t, 300, seed=42)
            gap = np.abs(ptm.entries[:, 3] - [0.0, 0.0, 0.0, 1.0])
            assert np.all(gap <= 4 * stderr[:, 3] + 1e-12)
            assert choi_from_ptm(ptm).eigenvalues().min() >= -4 * stderr.max()

    @pytest.mark.slow
    def test_average_matches_closed_form(self):
        """Test the averaged PTM against the closed form at N = 16."""
        N = 16
        spec = sample_gue_spectrum(N, 7)
        times = np.linspace(0.1, 10, 50)
        samples = haar_sample_ptms(spec, EnvironmentSpec(N // 2), times, 500, seed=8)
        mean = samples.mean(axis=0)
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(samples.shape[0])
        expected = alpha_values(spec, times)

        # 150 correlated comparisons: allow the odd 3-sigma excursion, never a gross one
        z = np.stack([np.abs(mean[:, i, i] - expected) / stderr[:, i, i] for i in range(3)])
        assert np.mean(z <= 3) >= 0.97
        assert z.max() <= 4.5
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert np.all(np.abs(mean[:, i, j]) <= 4 * stderr[:, i, j] + 1e-12)

    @pytest.mark.slow
    def test_self_averaging_at_large_n(self):
        """One N=1024 instance stays within 5 predicted standard deviations."""
        N = 1024
        spec, W = _instance(N, 12)
        times = np.linspace(0, 6, 61)
        ptms = ptm_curve(W, spec, EnvironmentSpec(N // 2), times)
        expected = alpha_values(spec, times)
        h_t, h_2t = bessel_ratio(times), bessel_ratio(2 * times)
        sigma = np.sqrt(np.maximum(leading_variance("diagonal", h_t, h_2t, N), 0))

        for i in range(3):
            assert np.all(np.abs(ptms[:, i, i] - expected) <= 5 * sigma + 1e-9)

    @pytest.mark.slow
    def test_mixed_environment_suppresses_fluctuations(self):
        """A maximally mixed environment shrinks Var(Lambda_00) by about M."""
        N, M = 64, 32
        spec = sample_gue_spectrum(N, 3)
        times = [1.0, 2.0, 3.0]
        pure = haar_sample_ptms(spec, EnvironmentSpec(M), times, 400, seed=4)
        mixed = haar_sample_ptms(spec, EnvironmentSpec(M, kind="mixed"), times, 400, seed=4)

        ratio = pure[:, :, 0, 0].var(axis=0, ddof=1) / mixed[:, :, 0, 0].var(axis=0, ddof=1)
        assert np.all(ratio >= M / 4)
        assert np.all(ratio <= 4 * M)
