"""Non-Markovianity measures of a depolarizing channel alpha(t).

All three measures only see the intervals on which alpha(t) increases:

    M1 = (3/2) sum ln alpha(t_f) - ln alpha(t_i)   (Choi positivity of intermediate maps)
    M2 = 2 sum alpha(t_f) - alpha(t_i)             (trace-distance backflow, full trace norm)
    M3 = (3/2) sum of the increase above alpha = 1/3 (concurrence revival)

Time is in natural units (hbar = 1, spectral span 4, Heisenberg time 2N).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .channel import PAULI, DensityMatrix, PauliTransferMatrix
from .errors import DimensionMismatchError, HorizonError, NormalizationError, NumericInputError
from .spectral import AlphaCurve, alpha_curve

logger = logging.getLogger(__name__)

SLOPE_TOL = 1e-10
DIVERGENCE_FLOOR = 1e-9
TAIL_FRACTION = 0.005
DEFAULT_HORIZON = 500.0
DEFAULT_STEP = 0.005
CONCURRENCE_THRESHOLD = 1 / 3
CHOI_TOL = 1e-12


@dataclass(frozen=True)
class Segment:
    """One interval [t_start, t_end] on which the curve increases."""

    t_start: float
    t_end: float
    v_start: float
    v_end: float

    @property
    def rise(self) -> float:
        return self.v_end - self.v_start


@dataclass(frozen=True)
class MonotoneSegments:
    """Disjoint, ascending increasing intervals of a curve."""

    segments: tuple[Segment, ...] = ()

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Jamiolkowski state of a qubit map (input ancilla first)."""

    entries: np.ndarray
    alpha: Optional[float] = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (4, 4):
            raise DimensionMismatchError(f"Choi matrix must be 4x4, got {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > CHOI_TOL:
            raise NormalizationError("Choi matrix is not Hermitian")
        if abs(np.trace(entries) - 1) > CHOI_TOL:
            raise NormalizationError("Choi matrix does not have unit trace")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def trace_norm(self) -> float:
        return float(np.sum(np.abs(self.eigenvalues())))


@dataclass(frozen=True)
class RateCurve:
    """g(t) on the curve's grid; ``divergent`` when alpha hits the floor while rising."""

    times: np.ndarray
    values: np.ndarray
    divergent: bool


@dataclass(frozen=True)
class MeasureReport:
    """M1, M2, M3 of one curve with integration diagnostics (M1 = inf when divergent)."""

    model: str
    N: Optional[float]
    m1: float
    m2: float
    m3: float
    horizon: float
    m1_tail: float
    m2_tail: float
    segment_count: int
    floor: float

    @property
    def m1_divergent(self) -> bool:
        return math.isinf(self.m1)

    @property
    def tail_bound(self) -> float:
        return max(self.m1_tail, self.m2_tail)


# ---------------------------------------------------------------------------
# Increasing intervals
# ---------------------------------------------------------------------------

def _parabola_vertex(t: np.ndarray, v: np.ndarray, k: int, minimum: bool) -> tuple[float, float]:
    """Extremum of the parabola through grid points k-1, k, k+1."""
    a, b, c = np.polyfit(t[k - 1:k + 2] - t[k], v[k - 1:k + 2], 2)
    if (a > 0) != minimum or a == 0:
        return float(t[k]), float(v[k])
    offset = float(np.clip(-b / (2 * a), t[k - 1] - t[k], t[k + 1] - t[k]))
    return float(t[k] + offset), float(c + b * offset + a * offset**2)


def _refine(curve: AlphaCurve, k: int, minimum: bool) -> tuple[float, float]:
    t, v = curve.times, curve.values
    if k == 0 or k == t.size - 1:
        return float(t[k]), float(v[k])
    if curve.evaluator is None:
        return _parabola_vertex(t, v, k, minimum)

    sign = 1.0 if minimum else -1.0
    result = optimize.minimize_scalar(
        lambda s: sign * curve.evaluator(s),
        bounds=(t[k - 1], t[k + 1]),
        method="bounded",
        options={"xatol": 1e-12},
    )
    value = float(curve.evaluator(result.x))
    # never report a worse extremum than the grid already shows
    if (minimum and value > v[k]) or (not minimum and value < v[k]):
        return float(t[k]), float(v[k])
    return float(result.x), value


def monotone_segments(curve: AlphaCurve, slope_tol: float = SLOPE_TOL) -> MonotoneSegments:
    """Intervals on which the finite-difference slope exceeds ``slope_tol``.

    Interior endpoints are local extrema and are refined below the grid step:
    on the exact alpha(t) when the curve carries it, otherwise by a quadratic
    through the three nearest samples.
    """
    if curve.times.size < 3:
        raise NumericInputError("monotone segments need at least 3 points")
    slopes = np.diff(curve.values) / np.diff(curve.times)
    rising = np.concatenate(([False], slopes > slope_tol, [False])).astype(np.int8)
    edges = np.diff(rising)
    starts, ends = np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)

    segments = []
    for trough, peak in zip(starts, ends):
        t_start, v_start = _refine(curve, trough, minimum=True)
        t_end, v_end = _refine(curve, peak, minimum=False)
        if v_end > v_start:
            segments.append(Segment(t_start, t_end, v_start, v_end))
    return MonotoneSegments(tuple(segments))


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def g_of_t(curve: AlphaCurve, floor: float = DIVERGENCE_FLOOR,
           slope_tol: float = SLOPE_TOL) -> RateCurve:
    """g(t) = 3 alpha' / (2 alpha) where alpha increases, else 0.

    Divergence follows M1: an increasing interval that starts below the floor.
    """
    derivative = np.gradient(curve.values, curve.times)
    rising = derivative > slope_tol
    divergent = any(s.v_start < floor for s in monotone_segments(curve, slope_tol))
    safe = np.maximum(curve.values, floor)
    values = np.where(rising, 1.5 * derivative / safe, 0.0)
    return RateCurve(curve.times, values, divergent)


def integrate_rate(rate: RateCurve) -> float:
    """Trapezoidal integral of g over its grid."""
    if rate.divergent:
        return math.inf
    return float(integrate.trapezoid(rate.values, rate.times))


def measure_tail(curve: AlphaCurve) -> tuple[float, float]:
    """Analytic bounds on (M1, M2) accumulated beyond the curve's last time.

    Poisson curves have 1/t^2 sinc sidelobes, the infinite GUE a 1/t^3
    Bessel envelope. Finite-N GUE curves settle to 1/(N+1) and sampled
    curves carry no model, so both get zero.
    """
    horizon = float(curve.times[-1])
    if horizon <= 0:
        return 0.0, 0.0
    if curve.model == "poisson":
        N = float(curve.N)
        return 3 * N / (4 * math.pi * horizon), N / ((N + 1) * math.pi * horizon)
    if curve.model == "poisson-infinite":
        return 0.0, 1 / (math.pi * horizon)
    if curve.model == "gue-infinite":
        return 0.0, 2 / (math.pi**2 * horizon**2)
    return 0.0, 0.0


def _check_tail(name: str, total: float, tail: float, tail_fraction: float, horizon: float):
    if tail > tail_fraction * total:
        raise HorizonError(
            f"{name} tail {tail:.3g} beyond t={horizon:g} exceeds "
            f"{tail_fraction:.1%} of the total {total:.4g}; extend the horizon"
        )


def measure_m1(curve: AlphaCurve, floor: float = DIVERGENCE_FLOOR,
               tail_fraction: float = TAIL_FRACTION,
               segments: Optional[MonotoneSegments] = None) -> float:
    """(3/2) sum of log increases of alpha plus tail; ``inf`` when alpha(t_i) < floor."""
    segments = monotone_segments(curve) if segments is None else segments
    if any(seg.v_start < floor for seg in segments):
        return math.inf
    total = 1.5 * sum(math.log(seg.v_end) - math.log(seg.v_start) for seg in segments)
    tail = measure_tail(curve)[0]
    _check_tail("M1", total, tail, tail_fraction, float(curve.times[-1]))
    return total + tail


def measure_m2(curve: AlphaCurve, tail_fraction: float = TAIL_FRACTION,
               segments: Optional[MonotoneSegments] = None) -> float:
    """2 * (total increase of alpha) plus tail."""
    segments = monotone_segments(curve) if segments is None else segments
    total = 2.0 * sum(seg.rise for seg in segments)
    tail = measure_tail(curve)[1]
    _check_tail("M2", total, tail, tail_fraction, float(curve.times[-1]))
    return total + tail


def measure_m3(curve: AlphaCurve, segments: Optional[MonotoneSegments] = None) -> float:
    """(3/2) * increase of alpha restricted to alpha > 1/3."""
    segments = monotone_segments(curve) if segments is None else segments
    rise = sum(
        max(0.0, seg.v_end - max(seg.v_start, CONCURRENCE_THRESHOLD)) for seg in segments
    )
    return 1.5 * rise


def evaluate_measures(curve: AlphaCurve, floor: float = DIVERGENCE_FLOOR,
                      tail_fraction: float = TAIL_FRACTION) -> MeasureReport:
    """All three measures of one curve sharing a single segmentation."""
    segments = monotone_segments(curve)
    m1_tail, m2_tail = measure_tail(curve)
    report = MeasureReport(
        model=curve.model,
        N=curve.N,
        m1=measure_m1(curve, floor, tail_fraction, segments),
        m2=measure_m2(curve, tail_fraction, segments),
        m3=measure_m3(curve, segments),
        horizon=float(curve.times[-1]),
        m1_tail=m1_tail,
        m2_tail=m2_tail,
        segment_count=len(segments),
        floor=floor,
    )
    logger.debug("%s N=%s: %d increasing segments", curve.model, curve.N, len(segments))
    return report


TABLE_ROWS = (
    ("gue-exact", 4), ("gue-exact", 8), ("gue-infinite", math.inf),
    ("poisson", 4), ("poisson", 8), ("poisson-infinite", math.inf),
)


def table_one(horizon: float = DEFAULT_HORIZON, step: float = DEFAULT_STEP,
              floor: float = DIVERGENCE_FLOOR) -> list[MeasureReport]:
    """Measures for GUE and Poisson environments at N = 4, 8 and infinity."""
    times = np.arange(0.0, horizon + step / 2, step)
    return [evaluate_measures(alpha_curve(model, N, times), floor) for model, N in TABLE_ROWS]


# ---------------------------------------------------------------------------
# Choi / Jamiolkowski algebra
# ---------------------------------------------------------------------------

def concurrence_of_alpha(alpha: float) -> float:
    """Concurrence of a Bell pair after one half passes the depolarizing channel."""
    return max(0.0, (3 * alpha - 1) / 2)


def depolarizing_superoperator(alpha: float) -> np.ndarray:
    """Channel matrix in the basis {|0><0|, |0><1|, |1><0|, |1><1|}."""
    p, q = (1 + alpha) / 2, (1 - alpha) / 2
    return np.array(
        [[p, 0, 0, q], [0, alpha, 0, 0], [0, 0, alpha, 0], [q, 0, 0, p]], dtype=float
    )


def intermediate_map(alpha_t2: float, alpha_t1: float) -> np.ndarray:
    """Map from t1 to t2, a depolarizing matrix with ratio alpha(t2) / alpha(t1)."""
    return depolarizing_superoperator(alpha_t2 / alpha_t1)


def choi_of_depolarizing(alpha: float) -> ChoiMatrix:
    """Jamiolkowski state alpha |Bell><Bell| + (1 - alpha) 1/4.

    Eigenvalues are (1 - alpha)/4 three times and (1 + 3 alpha)/4.
    """
    entries = 0.25 * np.array(
        [
            [1 + alpha, 0, 0, 2 * alpha],
            [0, 1 - alpha, 0, 0],
            [0, 0, 1 - alpha, 0],
            [2 * alpha, 0, 0, 1 + alpha],
        ],
        dtype=complex,
    )
    return ChoiMatrix(entries, alpha=float(alpha))


def choi_from_ptm(ptm: PauliTransferMatrix) -> ChoiMatrix:
    """Jamiolkowski state (1/2) sum_ab |a><b| (x) Lambda(|a><b|) of any qubit PTM."""
    # Lambda(sigma_k) = sum_j Lambda_jk sigma_j and |a><b| = (1/2) sum_k (sigma_k)_ba sigma_k
    images = np.einsum("jk,jcd->kcd", ptm.entries, PAULI)
    outputs = 0.5 * np.einsum("kba,kcd->abcd", PAULI, images)
    entries = 0.5 * np.einsum("abcd->acbd", outputs).reshape(4, 4)
    return ChoiMatrix(entries)


def choi_trace_norm(alpha_ratio: float) -> float:
    """||J(D)||_1 = 3|1 - a|/4 + |1 + 3a|/4; equals 1 iff -1/3 <= a <= 1."""
    return 3 * abs(1 - alpha_ratio) / 4 + abs(1 + 3 * alpha_ratio) / 4


def choi_rate(alpha: Callable[[float], float], t: float, eps: float = 1e-6) -> float:
    """Finite-difference [||J(D_{t+eps,t})||_1 - 1] / eps."""
    return (choi_trace_norm(alpha(t + eps) / alpha(t)) - 1) / eps


def trace_distance(rho0: DensityMatrix, rho1: DensityMatrix) -> float:
    """Full trace norm ||rho0 - rho1||_1 (orthogonal pure states give 2)."""
    if rho0.dim != rho1.dim:
        raise DimensionMismatchError(f"states have dims {rho0.dim} and {rho1.dim}")
    return float(np.sum(np.abs(np.linalg.eigvalsh(rho0.entries - rho1.entries))))
