"""Ensemble-averaged predictions for the Bloch radius alpha(t).

GUE correlations are built from the oscillator functions

    phi_j(x) = exp(-N x^2 / 4) H_j(x sqrt(N/2)) / sqrt(2^j j! sqrt(2 pi / N)),

which give the level density R1 = sum_j phi_j^2 and the cluster function
T2 = (sum_j phi_j(E1) phi_j(E2))^2. Their Fourier transforms b1 and b2 are
computed by Gauss-Legendre quadrature on [-2 - d, 2 + d], d = 10 / sqrt(N),
doubling the node count until successive results agree to 1e-7.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from .ensembles import Spectrum, f_curve
from .errors import (
    AccuracyError,
    ConfigError,
    InvalidDimensionError,
    InvalidIndexError,
    NumericInputError,
)

logger = logging.getLogger(__name__)

Dimension = Union[int, float]

QUADRATURE_TOL = 1e-7
MIN_NODES = 64
MAX_NODES = 1 << 14
EXACT_B2_MAX_DIM = 512
SETTLE_TOL = 1e-13
SERIES_CUTOFF = 1e-4
CURVE_CHUNK = 500

MODELS = ("per-spectrum", "gue-exact", "poisson", "gue-infinite", "poisson-infinite", "monte-carlo")


@dataclass(frozen=True)
class FormFactors:
    """b1(t) (Fourier transform of R1) and b2(t) (of T2), both divided by N."""

    t: float
    b1: float
    b2: float


@dataclass(frozen=True, eq=False)
class AlphaCurve:
    """Bloch radius sampled on an increasing time grid.

    ``evaluator`` is the exact alpha(t) for analytic models; extrema of such
    curves are refined on it instead of on the samples.
    """

    times: np.ndarray
    values: np.ndarray
    model: str
    N: Optional[Dimension] = None
    evaluator: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise NumericInputError("curve times and values must be 1-D arrays of equal length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise NumericInputError("curve times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise NumericInputError("curve contains non-finite values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def is_infinite(self) -> bool:
        return self.N is not None and math.isinf(self.N)


# ---------------------------------------------------------------------------
# Hermite functions
# ---------------------------------------------------------------------------

def _oscillator_functions(count: int, y: np.ndarray) -> np.ndarray:
    """H_j(y) exp(-y^2/2) / sqrt(2^j j! sqrt(pi)) for j < count, by recurrence."""
    psi = np.zeros((count,) + y.shape)
    psi[0] = np.pi ** -0.25 * np.exp(-y**2 / 2)
    if count > 1:
        psi[1] = np.sqrt(2.0) * y * psi[0]
    for j in range(1, count - 1):
        psi[j + 1] = np.sqrt(2.0 / (j + 1)) * y * psi[j] - np.sqrt(j / (j + 1)) * psi[j - 1]
    return psi


def hermite_functions(N: int, x, count: Optional[int] = None) -> np.ndarray:
    """phi_j(x) for j < ``count`` (default N), shape ``(count,) + x.shape``."""
    if N < 1:
        raise InvalidDimensionError(f"N must be >= 1, got {N}")
    x = np.asarray(x, dtype=float)
    count = N if count is None else count
    return (N / 2) ** 0.25 * _oscillator_functions(count, x * np.sqrt(N / 2))


def hermite_phi(j: int, x: float, N: int) -> float:
    """phi_j(x) of the GUE kernel at dimension N."""
    if j < 0:
        raise InvalidIndexError(f"Hermite index must be >= 0, got {j}")
    return float(hermite_functions(N, float(x), count=j + 1)[j])


def level_density_r1(E, N: int):
    """GUE level density R1(E) = sum_{j<N} phi_j(E)^2 (integrates to N)."""
    values = (hermite_functions(N, E) ** 2).sum(axis=0)
    return float(values) if np.ndim(values) == 0 else values


def cluster_t2(E1, E2, N: int):
    """GUE two-level cluster function (sum_j phi_j(E1) phi_j(E2))^2."""
    kernel = (hermite_functions(N, E1) * hermite_functions(N, E2)).sum(axis=0)
    values = kernel**2
    return float(values) if np.ndim(values) == 0 else values


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def quadrature_interval(N: int) -> float:
    """Half-width 2 + 10 / sqrt(N) of the integration box."""
    return 2.0 + 10.0 / math.sqrt(N)


def quadrature_nodes(N: int, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-L, L]."""
    half_width = quadrature_interval(N)
    nodes, weights = special.roots_legendre(n_nodes)
    return half_width * nodes, half_width * weights


def b2_ramp(t, N: int):
    """Large-N GUE form factor b2 = 1 - min(|t| / 2N, 1)."""
    return 1.0 - np.minimum(np.abs(t) / (2.0 * N), 1.0)


def _evaluate(
    N: int, times: np.ndarray, n_nodes: int, with_b2: bool
) -> tuple[np.ndarray, np.ndarray]:
    energies, weights = quadrature_nodes(N, n_nodes)
    phi = hermite_functions(N, energies)
    phases = weights * np.exp(-1j * np.multiply.outer(times, energies))

    b1 = (phases @ (phi**2).sum(axis=0)).real / N
    if not with_b2:
        return b1, b2_ramp(times, N)

    b2 = np.empty(times.size)
    for i, row in enumerate(phases):
        overlaps = (phi * row) @ phi.T
        b2[i] = np.sum(np.abs(overlaps) ** 2) / N
    return b1, b2


def _converged(N: int, times: np.ndarray, n_nodes: int, with_b2: bool):
    """Double the node count from ``n_nodes`` until two passes agree."""
    b1, b2 = _evaluate(N, times, n_nodes, with_b2)
    while True:
        if 2 * n_nodes > MAX_NODES:
            raise AccuracyError(
                f"form factors did not converge to {QUADRATURE_TOL:g} with {MAX_NODES} nodes "
                f"(N={N}, t up to {times.max():g})"
            )
        fine_b1, fine_b2 = _evaluate(N, times, 2 * n_nodes, with_b2)
        change = max(np.max(np.abs(fine_b1 - b1)), np.max(np.abs(fine_b2 - b2)))
        if change < QUADRATURE_TOL:
            return fine_b1, fine_b2, n_nodes
        n_nodes *= 2
        b1, b2 = fine_b1, fine_b2


def form_factor_curve(
    times, N: int, exact_b2: Optional[bool] = None
) -> tuple[np.ndarray, np.ndarray]:
    """b1(t) and b2(t) on a time grid.

    Times are processed in chunks, each refined independently. Finite-N form
    factors are Gaussian-damped; once both fall below 1e-13 over a whole
    chunk, all later values are zero. ``exact_b2`` defaults to N <= 512;
    otherwise the large-N ramp is used for b2.
    """
    if N < 1:
        raise InvalidDimensionError(f"N must be >= 1, got {N}")
    times = np.abs(np.atleast_1d(np.asarray(times, dtype=float)))
    with_b2 = N <= EXACT_B2_MAX_DIM if exact_b2 is None else exact_b2

    b1 = np.zeros(times.size)
    b2 = np.zeros(times.size) if with_b2 else b2_ramp(times, N)
    order = np.argsort(times, kind="stable")
    n_nodes = MIN_NODES
    for start in range(0, times.size, CURVE_CHUNK):
        idx = order[start:start + CURVE_CHUNK]
        chunk_b1, chunk_b2, n_nodes = _converged(N, times[idx], n_nodes, with_b2)
        b1[idx] = chunk_b1
        if with_b2:
            b2[idx] = chunk_b2
        settled = np.max(np.abs(chunk_b1)) < SETTLE_TOL
        if with_b2:
            settled = settled and np.max(np.abs(chunk_b2)) < SETTLE_TOL
        if settled and times[idx].min() > 0:
            logger.debug("form factors settled at t=%.3f (N=%d)", times[idx].min(), N)
            b1[order[start:]] = 0.0
            if with_b2:
                b2[order[start:]] = 0.0
            break
    return b1, b2


def form_factors(t: float, N: int) -> FormFactors:
    """b1 and b2 of the GUE at dimension N and time t."""
    if t < 0:
        t = -t
    b1, b2 = form_factor_curve([t], N)
    return FormFactors(t=float(t), b1=float(b1[0]), b2=float(b2[0]))


def b1_curve(times, N: int) -> np.ndarray:
    """b1 only, for large-N checks where T2 is not needed."""
    return form_factor_curve(times, N, exact_b2=False)[0]


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def bessel_j1(x):
    """Bessel function of the first kind, order one."""
    values = special.j1(x)
    return float(values) if np.ndim(values) == 0 else values


def bessel_ratio(t):
    """J1(2t) / t, equal to 1 at t = 0 (large-N limit of b1)."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < SERIES_CUTOFF
    safe = np.where(small, 1.0, t)
    values = np.where(small, 1 - t**2 / 2 + t**4 / 12, special.j1(2 * safe) / safe)
    return float(values) if values.ndim == 0 else values


def box_ratio(t):
    """sin(2t) / 2t, equal to 1 at t = 0 (Fourier transform of the flat density)."""
    t = np.asarray(t, dtype=float)
    x = 2 * t
    small = np.abs(t) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    values = np.where(small, 1 - x**2 / 6 + x**4 / 120, np.sin(safe) / safe)
    return float(values) if values.ndim == 0 else values


# ---------------------------------------------------------------------------
# alpha(t) models
# ---------------------------------------------------------------------------

def _alpha_from_form_factors(b1, b2, N: int):
    return (N**2 * b1**2 + N * (1 - b2) - 1) / (N**2 - 1)


def alpha_gue(t: float, N: int) -> float:
    """Exact finite-N GUE average of alpha(t)."""
    if math.isinf(N):
        return alpha_gue_infinite(t)
    if N < 2:
        raise InvalidDimensionError("alpha is undefined for N < 2")
    ff = form_factors(t, int(N))
    return float(_alpha_from_form_factors(ff.b1, ff.b2, int(N)))


def alpha_gue_values(times, N: int) -> np.ndarray:
    if N < 2:
        raise InvalidDimensionError("alpha is undefined for N < 2")
    b1, b2 = form_factor_curve(times, int(N))
    return _alpha_from_form_factors(b1, b2, int(N))


def alpha_gue_infinite(t, N: Optional[int] = None):
    """[J1(2t)/t]^2; with ``N`` the large-N form factors enter the exact formula."""
    h = bessel_ratio(t)
    if N is None:
        return h**2
    return _alpha_from_form_factors(h, b2_ramp(t, N), N)


def alpha_poisson(t, N: Dimension):
    """Poisson average N/(N+1) [sin 2t / 2t]^2 + 1/(N+1); N may be infinite."""
    sinc2 = box_ratio(t) ** 2
    if math.isinf(N):
        return sinc2
    if N < 1:
        raise InvalidDimensionError(f"N must be >= 1, got {N}")
    return N / (N + 1) * sinc2 + 1 / (N + 1)


def alpha_per_spectrum(spec: Spectrum, times) -> AlphaCurve:
    """Haar-averaged alpha(t) for one fixed spectrum."""
    N = spec.dim
    if N < 2:
        raise InvalidDimensionError("alpha is undefined for N < 2")

    def evaluate(t: float) -> float:
        return float((N**2 * abs(f_curve(spec, t)) ** 2 - 1) / (N**2 - 1))

    values = (N**2 * np.abs(f_curve(spec, times)) ** 2 - 1) / (N**2 - 1)
    return AlphaCurve(times, values, "per-spectrum", N, evaluate)


def alpha_curve(model: str, N: Dimension, times) -> AlphaCurve:
    """Sample an analytic model on ``times``.

    ``model`` is ``gue-exact`` or ``poisson`` (finite N) or ``gue-infinite`` /
    ``poisson-infinite``. A ``gue-exact`` or ``poisson`` request with infinite
    N resolves to the infinite model; ``gue-infinite`` with a finite N keeps the
    Bessel kernel but adds the large-N ramp of b2.
    """
    times = np.asarray(times, dtype=float)
    if model in ("gue-exact", "gue") and math.isinf(N):
        model = "gue-infinite"
    if model == "poisson" and math.isinf(N):
        model = "poisson-infinite"

    if model in ("gue-exact", "gue"):
        n = int(N)
        return AlphaCurve(times, alpha_gue_values(times, n), "gue-exact", n,
                          lambda t: alpha_gue(t, n))
    if model == "poisson":
        return AlphaCurve(times, alpha_poisson(times, N), "poisson", int(N),
                          lambda t: float(alpha_poisson(t, N)))
    if model == "gue-infinite":
        n = None if math.isinf(N) else int(N)
        return AlphaCurve(times, alpha_gue_infinite(times, n), model, math.inf if n is None else n,
                          lambda t: float(alpha_gue_infinite(t, n)))
    if model == "poisson-infinite":
        return AlphaCurve(times, alpha_poisson(times, math.inf), model, math.inf,
                          lambda t: float(alpha_poisson(t, math.inf)))
    raise ConfigError(f"no analytic curve for model {model!r}")
