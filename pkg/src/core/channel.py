"""The one-qubit channel induced by a random-eigenvector environment.

Tensor order is qubit first, environment second: joint index ``i = a * M + mu``
for qubit state ``a`` and environment state ``mu``. Pauli transfer matrices use
the basis order (x, y, z, identity), i.e. index 3 is the identity. Note that
this differs from the common convention that puts the identity first.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ensembles import Spectrum, UnitaryMatrix, f_curve, sample_haar
from .errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidDimensionError,
    NormalizationError,
)
from .parallel import ordered_map

logger = logging.getLogger(__name__)

STATE_TOL = 1e-12
POSITIVITY_TOL = 1e-10

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
        [[1, 0], [0, 1]],
    ],
    dtype=complex,
)
PAULI_LABELS = ("x", "y", "z", "1")

# Elements per chunk of the (N, 2r, T) evolved-column buffer.
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > STATE_TOL:
            raise NormalizationError("density matrix is not Hermitian")
        if abs(np.trace(entries) - 1) > STATE_TOL:
            raise NormalizationError(f"density matrix trace is {np.trace(entries).real:.15g}")
        if np.min(np.linalg.eigvalsh(entries)) < -POSITIVITY_TOL:
            raise NormalizationError("density matrix has a negative eigenvalue")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        vector = np.asarray(vector, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        return cls(np.outer(vector, vector.conj()))


@dataclass(frozen=True, eq=False)
class PauliTransferMatrix:
    """Real 4x4 matrix Lambda_jk = tr[sigma_j Lambda(sigma_k)] / 2."""

    entries: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (4, 4):
            raise DimensionMismatchError(f"PTM must be 4x4, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def trace_preservation_error(self) -> float:
        """Deviation of row 3 from (0, 0, 0, 1)."""
        return float(np.max(np.abs(self.entries[3] - np.array([0.0, 0.0, 0.0, 1.0]))))


@dataclass(frozen=True, eq=False)
class EnvironmentSpec:
    """Initial environment state of dimension M (total dimension 2M).

    ``kind`` is one of ``projector`` (basis vector 0), ``mixed`` (identity / M),
    ``rank`` (identity on the first ``rank`` basis vectors, normalized) or
    ``explicit`` (``state`` given).
    """

    dim: int
    kind: str = "projector"
    rank: int = 1
    state: Optional[DensityMatrix] = field(default=None)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidDimensionError(f"environment dimension must be >= 1, got {self.dim}")
        if self.kind not in ("projector", "mixed", "rank", "explicit"):
            raise NormalizationError(f"unknown environment state kind: {self.kind}")
        if self.kind == "rank" and not 1 <= self.rank <= self.dim:
            raise NormalizationError(f"rank must lie in [1, {self.dim}], got {self.rank}")
        if self.kind == "explicit":
            if self.state is None:
                raise NormalizationError("explicit environment needs a state")
            if self.state.dim != self.dim:
                raise DimensionMismatchError(
                    f"environment state has dim {self.state.dim}, expected {self.dim}"
                )

    @classmethod
    def parse(cls, text: str, dim: int) -> "EnvironmentSpec":
        """Parse the CLI syntax ``projector``, ``mixed`` or ``rank:<r>``."""
        text = text.strip().lower()
        if text == "projector":
            return cls(dim)
        if text in ("mixed", "maximally-mixed"):
            return cls(dim, kind="mixed")
        if text.startswith("rank:"):
            try:
                rank = int(text.split(":", 1)[1])
            except ValueError:
                raise NormalizationError(f"invalid rank in environment spec: {text}")
            return cls(dim, kind="rank", rank=rank)
        raise NormalizationError(f"unknown environment spec: {text}")

    @property
    def label(self) -> str:
        if self.kind == "rank":
            return f"rank:{self.rank}"
        return self.kind

    @property
    def total_dim(self) -> int:
        return 2 * self.dim

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        """Spectral decomposition (weights p_m, columns v_m) of the state."""
        if self.kind == "projector":
            return np.ones(1), np.eye(self.dim, 1, dtype=complex)
        if self.kind == "mixed":
            return np.full(self.dim, 1.0 / self.dim), np.eye(self.dim, dtype=complex)
        if self.kind == "rank":
            return np.full(self.rank, 1.0 / self.rank), np.eye(self.dim, self.rank, dtype=complex)
        weights, vectors = np.linalg.eigh(self.state.entries)
        keep = weights > POSITIVITY_TOL
        return weights[keep], vectors[:, keep]

    def density(self) -> np.ndarray:
        weights, vectors = self.components()
        return (vectors * weights) @ vectors.conj().T


def _check_spectrum(W: UnitaryMatrix, spec: Spectrum):
    if W.dim != spec.dim:
        raise DimensionMismatchError(f"eigenvectors have dim {W.dim}, spectrum has {spec.dim}")


def evolution_operator(W: UnitaryMatrix, spec: Spectrum, t: float) -> UnitaryMatrix:
    """U^t = W diag(exp(-i E t)) W^dagger."""
    _check_spectrum(W, spec)
    phases = np.exp(-1j * spec.energies * t)
    return UnitaryMatrix((W.entries * phases) @ W.entries.conj().T)


def _trace_env(operator: np.ndarray, env_dim: int) -> np.ndarray:
    n = operator.shape[0]
    if operator.shape != (n, n) or n != 2 * env_dim:
        raise DimensionMismatchError(
            f"cannot split dimension {n} into a qubit and an environment of dim {env_dim}"
        )
    return np.einsum("aubu->ab", operator.reshape(2, env_dim, 2, env_dim))


def partial_trace_env(state: DensityMatrix, M: int) -> DensityMatrix:
    """Trace out the environment (second tensor factor) of a qubit x M state."""
    return DensityMatrix(_trace_env(state.entries, M))


def ptm_curve(W: UnitaryMatrix, spec: Spectrum, env: EnvironmentSpec, times) -> np.ndarray:
    """PTMs of one eigenvector matrix at every time, shape ``(T, 4, 4)``.

    The map is applied to ``sigma_k x rho_E`` by linear extension: with
    ``rho_E = sum_m p_m |v_m><v_m|`` only the 2r columns ``U^t (a x v_m)`` are
    needed, and the reduced operator of ``|x><y|`` is ``X Y^dagger`` where X is
    x reshaped to (2, M).
    """
    _check_spectrum(W, spec)
    if spec.dim != env.total_dim:
        raise DimensionMismatchError(
            f"total dimension {spec.dim} does not equal 2 x environment dim {env.dim}"
        )
    times = np.atleast_1d(np.asarray(times, dtype=float))
    N, M = spec.dim, env.dim
    weights, vectors = env.components()
    rank = weights.size

    w = W.entries
    # rows of W^dagger restricted to the input columns (a, v_m)
    inputs = np.einsum("nau,um->nam", w.conj().T.reshape(N, 2, M), vectors)
    chunk = max(1, _CHUNK_ELEMENTS // (N * 2 * rank))

    ptms = np.empty((times.size, 4, 4))
    for start in range(0, times.size, chunk):
        block = times[start:start + chunk]
        phases = np.exp(-1j * np.multiply.outer(spec.energies, block))
        evolved = w @ (inputs[:, :, :, None] * phases[:, None, None, :]).reshape(N, -1)
        X = evolved.reshape(2, M, 2, rank, block.size)
        reduced = np.einsum("cuamt,m,dubmt->tabcd", X, weights, X.conj(), optimize=True)
        ptms[start:start + block.size] = 0.5 * np.einsum(
            "jdc,kab,tabcd->tjk", PAULI, PAULI, reduced, optimize=True
        ).real
    return ptms


def extract_ptm(
    W: UnitaryMatrix, spec: Spectrum, env: EnvironmentSpec, t: float
) -> PauliTransferMatrix:
    """Pauli transfer matrix of the induced channel at time ``t``."""
    if spec.dim < 2:
        raise InvalidDimensionError("the joint system needs N >= 2")
    return PauliTransferMatrix(ptm_curve(W, spec, env, [t])[0], time=float(t))


def apply_ptm(ptm: PauliTransferMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Apply a qubit channel given by its PTM to a qubit state."""
    if rho.dim != 2:
        raise DimensionMismatchError(f"expected a qubit state, got dim {rho.dim}")
    bloch = np.einsum("jab,ba->j", PAULI, rho.entries).real
    image = ptm.entries @ bloch
    return DensityMatrix(0.5 * np.einsum("j,jab->ab", image, PAULI))


def evolve_reduced(
    W: UnitaryMatrix, spec: Spectrum, env: EnvironmentSpec, rho: DensityMatrix, t: float
) -> DensityMatrix:
    """Reduced qubit state after joint evolution of ``rho x rho_E``."""
    U = evolution_operator(W, spec, t).entries
    joint = np.kron(rho.entries, env.density())
    return DensityMatrix(_trace_env(U @ joint @ U.conj().T, env.dim))


def alpha_values(spec: Spectrum, times) -> np.ndarray:
    """Exact Haar-averaged radius (N^2 |f|^2 - 1) / (N^2 - 1) at every time."""
    N = spec.dim
    if N < 2:
        raise InvalidDimensionError("alpha is undefined for N < 2")
    f = f_curve(spec, times)
    return (N**2 * np.abs(f) ** 2 - 1) / (N**2 - 1)


def alpha_from_spectrum(spec: Spectrum, t: float) -> float:
    """Haar-averaged Bloch radius for a fixed spectrum at time ``t``."""
    return float(alpha_values(spec, float(t)))


def haar_sample_ptms(
    spec: Spectrum,
    env: EnvironmentSpec,
    times: Sequence[float],
    n_samples: int,
    seed: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """PTM curves for ``n_samples`` Haar eigenvector draws, shape ``(S, T, 4, 4)``.

    Draw ``k`` always uses the generator keyed by ``(seed, k)``.
    """
    logger.debug("sampling %d Haar draws at N=%d (%s env)", n_samples, spec.dim, env.label)

    def one_draw(index: int) -> np.ndarray:
        return ptm_curve(sample_haar(spec.dim, seed, index), spec, env, times)

    return np.stack(ordered_map(one_draw, range(n_samples), workers))


def haar_average_ptm(
    spec: Spectrum,
    env: EnvironmentSpec,
    t: float,
    n_samples: int,
    seed: int,
    workers: Optional[int] = None,
) -> tuple[PauliTransferMatrix, np.ndarray]:
    """Haar-averaged PTM at ``t`` and its elementwise standard error."""
    if n_samples < 2:
        raise InsufficientSamplesError("a standard error needs at least 2 samples")
    samples = haar_sample_ptms(spec, env, [t], n_samples, seed, workers)[:, 0]
    mean = samples.mean(axis=0)
    stderr = samples.std(axis=0, ddof=1) / np.sqrt(n_samples)
    return PauliTransferMatrix(mean, time=float(t)), stderr
