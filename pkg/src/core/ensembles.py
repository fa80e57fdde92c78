"""Random-matrix ensembles and the spectral Fourier transform.

Energies are dimensionless with the GUE normalization <|H_ij|^2> = 1/N, so
the semicircle spans [-2, 2] (spectral span 4) and the Heisenberg time is 2N.
Poisson spectra are drawn on the same box so both models share a time axis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidDimensionError, NumericInputError
from .rng import GUE_STREAM, HAAR_STREAM, POISSON_STREAM, make_rng

UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9
POISSON_HALF_WIDTH = 2.0
PHASE_BLOCK = 1 << 22


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def _check_dim(dim: int) -> int:
    if int(dim) < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    return int(dim)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenenergies of one Hamiltonian, kept sorted ascending."""

    energies: np.ndarray

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float).ravel()
        if energies.size == 0:
            raise InvalidDimensionError("a spectrum needs at least one level")
        if not np.all(np.isfinite(energies)):
            raise NumericInputError("spectrum contains non-finite energies")
        object.__setattr__(self, "energies", _frozen(np.sort(energies)))

    @property
    def dim(self) -> int:
        return self.energies.size


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Dense N x N unitary."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"unitary must be square, got shape {entries.shape}")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def unitarity_error(self) -> float:
        """Max absolute entry of U U^dagger - 1."""
        product = self.entries @ self.entries.conj().T
        return float(np.max(np.abs(product - np.eye(self.dim))))


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Dense N x N Hermitian matrix."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"Hamiltonian must be square, got shape {entries.shape}")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SpectralTransform:
    """f(t) = (1/N) sum_j exp(-i E_j t) at one time."""

    t: float
    value: complex


def sample_gue(dim: int, seed: int, index: int = 0) -> HermitianMatrix:
    """Draw a GUE Hamiltonian with <|H_ij|^2> = 1/N.

    Diagonal entries are real N(0, 1/N); off-diagonal real and imaginary
    parts are independent N(0, 1/(2N)). Hermiticity is exact: the upper
    triangle is mirrored, never averaged with a second draw.
    """
    dim = _check_dim(dim)
    rng = make_rng(seed, GUE_STREAM, index)
    diagonal = rng.standard_normal(dim) / np.sqrt(dim)
    n_upper = dim * (dim - 1) // 2
    parts = rng.standard_normal((2, n_upper)) / np.sqrt(2 * dim)

    H = np.zeros((dim, dim), dtype=complex)
    rows, cols = np.triu_indices(dim, k=1)
    H[rows, cols] = parts[0] + 1j * parts[1]
    H[cols, rows] = parts[0] - 1j * parts[1]
    H[np.diag_indices(dim)] = diagonal
    return HermitianMatrix(H)


def sample_haar(dim: int, seed: int, index: int = 0) -> UnitaryMatrix:
    """Draw a Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    dim = _check_dim(dim)
    rng = make_rng(seed, HAAR_STREAM, index)
    ginibre = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(ginibre)
    # Q R is unique only up to phases; fixing diag(R) > 0 gives Haar measure.
    phases = np.diagonal(R)
    Q = Q * (phases / np.abs(phases))
    return UnitaryMatrix(Q)


def sample_poisson_spectrum(dim: int, seed: int, index: int = 0) -> Spectrum:
    """Draw ``dim`` uncorrelated levels uniform on [-2, 2]."""
    dim = _check_dim(dim)
    rng = make_rng(seed, POISSON_STREAM, index)
    return Spectrum(rng.uniform(-POISSON_HALF_WIDTH, POISSON_HALF_WIDTH, dim))


def eigen_decompose(H: HermitianMatrix) -> tuple[Spectrum, UnitaryMatrix]:
    """Diagonalize ``H = W diag(E) W^dagger`` with ascending energies.

    Raises :class:`NumericInputError` on non-finite input and
    :class:`NumericError`-derived errors when the reconstruction residual
    exceeds 1e-9 * dim.
    """
    entries = H.entries
    if not np.all(np.isfinite(entries)):
        raise NumericInputError("Hamiltonian contains non-finite entries")

    energies, vectors = np.linalg.eigh(entries)
    order = np.argsort(energies, kind="stable")
    energies, vectors = energies[order], vectors[:, order]

    residual = np.max(np.abs((vectors * energies) @ vectors.conj().T - entries))
    if residual > RECONSTRUCTION_TOL * H.dim:
        raise NumericInputError(
            f"eigendecomposition residual {residual:.3e} exceeds {RECONSTRUCTION_TOL * H.dim:.3e}"
        )
    return Spectrum(energies), UnitaryMatrix(vectors)


def sample_gue_spectrum(dim: int, seed: int, index: int = 0) -> Spectrum:
    """Eigenvalues of one GUE draw."""
    H = sample_gue(dim, seed, index)
    return Spectrum(np.linalg.eigvalsh(H.entries))


def f_curve(spec: Spectrum, times) -> np.ndarray:
    """f(t) for every t in ``times`` (complex array of the same shape).

    Times are processed in blocks so the phase matrix stays near
    ``PHASE_BLOCK`` entries for any N.
    """
    times = np.asarray(times, dtype=float)
    flat = times.ravel()
    values = np.empty(flat.size, dtype=complex)
    rows = max(1, PHASE_BLOCK // spec.dim)
    for start in range(0, flat.size, rows):
        block = flat[start:start + rows]
        values[start:start + rows] = np.exp(-1j * np.multiply.outer(block, spec.energies)).mean(
            axis=-1
        )
    return values[0] if times.ndim == 0 else values.reshape(times.shape)


def f_transform(spec: Spectrum, t: float) -> SpectralTransform:
    """Fourier transform of the level density of ``spec`` at time ``t``."""
    return SpectralTransform(t=float(t), value=complex(f_curve(spec, float(t))))
