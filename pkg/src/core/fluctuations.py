"""Variances of the channel matrix elements over Haar-random eigenvectors.

By symmetry only three classes of entries differ: the diagonal (i, i), the
non-unital column (i, 3) and the off-diagonal (i, j != i), for i, j in {0, 1, 2}.
Exact expressions hold to all orders in 1/N for a fixed spectrum entering only
through f(t) and f(2t); the leading-order forms replace f by its spectral
average h.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import EnvironmentSpec, haar_sample_ptms
from .ensembles import Spectrum, f_curve
from .errors import InsufficientSamplesError, InvalidIndexError, UnsupportedDimensionError
from .rng import BOOTSTRAP_STREAM, make_rng
from .spectral import b1_curve, bessel_ratio, box_ratio

logger = logging.getLogger(__name__)

KINDS = ("diagonal", "column3", "offdiagonal")

KIND_ENTRIES = {
    "diagonal": ((0, 0), (1, 1), (2, 2)),
    "column3": ((0, 3), (1, 3), (2, 3)),
    "offdiagonal": ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)),
}

MIN_MC_SAMPLES = 30
BOOTSTRAP_ROUNDS = 200


@dataclass(frozen=True)
class FluctuationPrediction:
    """Predicted second moment and variance of one class of entries at time t."""

    t: Optional[float]
    kind: str
    second_moment: float
    variance: float
    order: str


@dataclass(frozen=True, eq=False)
class MonteCarloFluctuations:
    """Pooled sample statistics per symmetry class over a time grid."""

    times: np.ndarray
    variance: dict
    variance_stderr: dict
    mean: dict
    mean_stderr: dict
    n_samples: int


def _check_kind(kind: str):
    if kind not in KINDS:
        raise InvalidIndexError(f"unknown fluctuation kind {kind!r}; expected one of {KINDS}")


def _check_dimension(N: int):
    if N < 4:
        raise UnsupportedDimensionError(
            f"exact fluctuations have poles at N=1 and N=3 and need N >= 4, got N={N}"
        )


def _invariants(f_t, f_2t):
    f_t = np.asarray(f_t, dtype=complex)
    f_2t = np.asarray(f_2t, dtype=complex)
    f2 = np.abs(f_t) ** 2
    cross = 2 * np.real(np.conj(f_t) ** 2 * f_2t)
    return f2, f2**2, np.abs(f_2t) ** 2, cross


def _prefactor(N: int) -> float:
    return 1.0 / (2 * N * (1 - 1 / N**2) * (1 - 9 / N**2))


def _scalar(values):
    return float(values) if np.ndim(values) == 0 else values


def second_moment_00(f_t, f_2t, N: int):
    """Haar second moment <Lambda_00^2> for a fixed spectrum, exact in 1/N."""
    _check_dimension(N)
    f2, f4, f2t2, cross = _invariants(f_t, f_2t)
    bracket = (
        (1 - 9 / N**2)
        + (2 - 3 / N - 6 / N**2) * (N * f4 + f2t2 / N - 4 * f2 / N)
        + (1 - 4 / N) * cross
    )
    return _scalar(_prefactor(N) * bracket)


def exact_variance(kind: str, f_t, f_2t, N: int, mean_alpha=None):
    """Exact variance of one entry class (vectorized over time)."""
    _check_kind(kind)
    _check_dimension(N)
    f2, f4, f2t2, cross = _invariants(f_t, f_2t)
    if kind == "diagonal":
        if mean_alpha is None:
            mean_alpha = (N**2 * f2 - 1) / (N**2 - 1)
        return _scalar(second_moment_00(f_t, f_2t, N) - np.asarray(mean_alpha) ** 2)
    if kind == "column3":
        bracket = (1 - 9 / N**2) - 3 * f4 - 3 * f2t2 / N**2 + 12 * f2 / N**2 + cross
        return _scalar((1 - 2 / N) * _prefactor(N) * bracket)
    bracket = (
        (1 - 9 / N**2) + f4 + f2t2 / N**2 - 4 * f2 / N**2 - (1 - 6 / N**2) * cross
    )
    return _scalar(_prefactor(N) * bracket)


def leading_variance(kind: str, h_t, h_2t, N: int):
    """Leading-order variance in 1/N (vectorized over time)."""
    _check_kind(kind)
    _, h4, _, cross = _invariants(h_t, h_2t)
    if kind == "offdiagonal":
        return _scalar((1 + h4 - cross) / (2 * N))
    return _scalar((1 + cross - 3 * h4) / (2 * N))


def sigma2_exact(
    kind: str,
    f_t: complex,
    f_2t: complex,
    N: int,
    mean_alpha: float,
    *,
    t: Optional[float] = None,
):
    """Exact prediction for one class; ``mean_alpha`` is the Haar mean of Lambda_00."""
    variance = exact_variance(kind, f_t, f_2t, N, mean_alpha)
    second = second_moment_00(f_t, f_2t, N) if kind == "diagonal" else variance
    return FluctuationPrediction(
        t=t, kind=kind, second_moment=float(second), variance=float(variance),
        order="exact",
    )


def sigma2_leading(
    kind: str, h_t: complex, h_2t: complex, N: int, *, t: Optional[float] = None
):
    """Leading-order prediction for one class; ``h`` is the spectral mean of f."""
    variance = float(leading_variance(kind, h_t, h_2t, N))
    mean = 0.0
    if kind == "diagonal":
        mean = float(np.abs(h_t) ** 2)
    return FluctuationPrediction(
        t=t, kind=kind, second_moment=variance + mean**2, variance=variance,
        order="leading",
    )


def spectrum_predictions(spec: Spectrum, times, order: str = "exact") -> dict:
    """Variance curves of all three classes for one fixed spectrum."""
    times = np.asarray(times, dtype=float)
    f_t, f_2t = f_curve(spec, times), f_curve(spec, 2 * times)
    if order == "exact":
        return {kind: exact_variance(kind, f_t, f_2t, spec.dim) for kind in KINDS}
    return {kind: leading_variance(kind, f_t, f_2t, spec.dim) for kind in KINDS}


def spectral_mean_f(model: str, times, N: int) -> np.ndarray:
    """h(t), the mean of f(t) over the spectra of ``model`` at dimension N.

    GUE spectra (``gue-exact`` and the instances behind ``monte-carlo``) give
    b1(t); ``gue-infinite`` its large-N limit J1(2t)/t; ``poisson`` the
    transform sin(2t)/2t of the flat density.
    """
    times = np.asarray(times, dtype=float)
    if model in ("gue-exact", "monte-carlo"):
        return b1_curve(times, N)
    if model == "gue-infinite":
        return bessel_ratio(times)
    if model == "poisson":
        return box_ratio(times)
    raise InvalidIndexError(f"no spectral mean of f for model {model!r}")


def sigma2_curves(spec: Spectrum, times, model: Optional[str] = None) -> dict:
    """Exact and leading-order variance curves per kind.

    The exact curve uses f of ``spec``. The leading curve uses h of ``model``,
    or f of ``spec`` again when no model is given. Returns
    ``{kind: (exact, leading)}``.
    """
    times = np.asarray(times, dtype=float)
    exact = spectrum_predictions(spec, times, "exact")
    if model is None:
        leading = spectrum_predictions(spec, times, "leading")
    else:
        h_t = spectral_mean_f(model, times, spec.dim)
        h_2t = spectral_mean_f(model, 2 * times, spec.dim)
        leading = {kind: leading_variance(kind, h_t, h_2t, spec.dim) for kind in KINDS}
    return {kind: (exact[kind], leading[kind]) for kind in KINDS}


def spectral_ensemble_sigma2(kind: str, spectra: Sequence[Spectrum], t):
    """Variance over Haar eigenvectors and sampled spectra together.

    The spectral spread of the Haar mean is added: second moments are averaged
    over spectra before the squared average mean is subtracted. ``t`` may be a
    time grid.
    """
    _check_kind(kind)
    if not spectra:
        raise InsufficientSamplesError("spectral average needs at least one spectrum")
    t = np.asarray(t, dtype=float)
    seconds, means = [], []
    for spec in spectra:
        N = spec.dim
        f_t, f_2t = f_curve(spec, t), f_curve(spec, 2 * t)
        if kind == "diagonal":
            means.append((N**2 * np.abs(f_t) ** 2 - 1) / (N**2 - 1))
            seconds.append(second_moment_00(f_t, f_2t, N))
        else:
            means.append(np.zeros(t.shape))
            seconds.append(exact_variance(kind, f_t, f_2t, N))
    return _scalar(np.mean(seconds, axis=0) - np.mean(means, axis=0) ** 2)


def _picked(block: np.ndarray, entries) -> np.ndarray:
    return np.stack([block[:, :, j, k] for j, k in entries], axis=-1)


def _pooled_variance(block: np.ndarray, entries) -> np.ndarray:
    """Unbiased variance over draws, averaged over ``entries`` of (S, T, 4, 4) samples."""
    return _picked(block, entries).var(axis=0, ddof=1).mean(axis=-1)


def monte_carlo_fluctuations(
    spec: Spectrum,
    env: EnvironmentSpec,
    times,
    n_samples: int,
    seed: int,
    workers: Optional[int] = None,
    samples: Optional[np.ndarray] = None,
) -> MonteCarloFluctuations:
    """Empirical variances per symmetry class with bootstrap standard errors.

    ``samples`` may pass precomputed PTM draws of shape (S, T, 4, 4).
    """
    if n_samples < MIN_MC_SAMPLES:
        raise InsufficientSamplesError(f"need at least {MIN_MC_SAMPLES} samples, got {n_samples}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if samples is None:
        samples = haar_sample_ptms(spec, env, times, n_samples, seed, workers)
    n_samples = samples.shape[0]

    rng = make_rng(seed, BOOTSTRAP_STREAM)
    resamples = rng.integers(0, n_samples, size=(BOOTSTRAP_ROUNDS, n_samples))
    logger.debug("bootstrapping %d rounds over %d samples", BOOTSTRAP_ROUNDS, n_samples)

    variance, variance_stderr, mean, mean_stderr = {}, {}, {}, {}
    for kind, entries in KIND_ENTRIES.items():
        # entries of one draw are correlated; the per-draw class mean is the unit
        per_draw = _picked(samples, entries).mean(axis=-1)
        mean[kind] = per_draw.mean(axis=0)
        mean_stderr[kind] = per_draw.std(axis=0, ddof=1) / np.sqrt(n_samples)
        variance[kind] = _pooled_variance(samples, entries)
        boot = np.array([_pooled_variance(samples[idx], entries) for idx in resamples])
        variance_stderr[kind] = boot.std(axis=0, ddof=1)

    return MonteCarloFluctuations(
        times=times,
        variance=variance,
        variance_stderr=variance_stderr,
        mean=mean,
        mean_stderr=mean_stderr,
        n_samples=n_samples,
    )
