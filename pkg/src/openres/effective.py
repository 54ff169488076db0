"""Non-Hermitian mode dynamics: damping matrix, dynamical matrix and its
bi-orthogonal eigendecomposition.

Sign convention used throughout: an eigenvalue ``nu = -1j*omega - gamma`` has
resonance frequency ``omega`` and amplitude decay rate ``gamma``; the energy
decay rate (full width) is ``2*gamma``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ensembles import CouplingMatrix, ModeSpectrum
from .errors import DegenerateVectors, DimensionMismatch, InvalidParameter, NearDefective

DEFAULT_CONDITION_BOUND = 1e8


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DampingMatrix:
    """``gamma = pi * W @ W.T`` (real symmetric, positive semidefinite)."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch(f"damping matrix must be square, got {g.shape}")
        scale = max(np.abs(g).max(), np.finfo(float).tiny)
        if np.abs(g - g.T).max() > 1e-12 * scale:
            raise InvalidParameter("damping matrix must be symmetric")
        object.__setattr__(self, "gamma", _frozen(g))

    @property
    def n_modes(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True)
class DynamicalMatrix:
    """Generator ``A = -1j*diag(omega) - gamma`` of the damped mode amplitudes."""

    a_matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a_matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"dynamical matrix must be square, got {a.shape}")
        object.__setattr__(self, "a_matrix", _frozen(a))

    @property
    def n_modes(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def damping(self) -> np.ndarray:
        """Hermitian part ``-(A + A^H)/2``."""
        a = self.a_matrix
        return -0.5 * (a + a.conj().T)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.a_matrix, 2))


@dataclass(frozen=True)
class ResonanceSet:
    """Resonances sorted by frequency, with bi-orthonormal eigenvectors.

    ``right_vectors[:, k]`` and ``left_vectors[:, k]`` satisfy
    ``left[:, j].conj() @ right[:, k] == delta_jk``; right vectors have unit
    norm so that ``petermann[k] == |left[:, k]|**2``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    petermann: np.ndarray
    mean_spacing: float = float("nan")
    condition: float = float("nan")

    @property
    def omega(self) -> np.ndarray:
        return -self.eigenvalues.imag

    @property
    def gamma(self) -> np.ndarray:
        return -self.eigenvalues.real

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.size

    @property
    def overlap_ratio(self) -> float:
        """Mean full width over mean spacing, ``mean(2 gamma) / spacing``."""
        return float(np.mean(2 * self.gamma) / self.mean_spacing)

    def as_rows(self):
        for k in range(self.n_modes):
            yield k, float(self.omega[k]), float(self.gamma[k]), float(self.petermann[k])


def build_damping(coupling: CouplingMatrix) -> DampingMatrix:
    w = coupling.entries
    g = np.pi * (w @ w.T)
    # exact symmetry; the product is symmetric only up to rounding
    return DampingMatrix(0.5 * (g + g.T))


def build_dynamical(spectrum: ModeSpectrum, damping: DampingMatrix) -> DynamicalMatrix:
    if spectrum.n_modes != damping.n_modes:
        raise DimensionMismatch(
            f"spectrum has {spectrum.n_modes} modes, damping matrix {damping.n_modes}")
    return DynamicalMatrix(-1j * np.diag(spectrum.frequencies) - damping.gamma)


def petermann_factor(left, right) -> float:
    """``K = <l|l><r|r> / |<l|r>|^2``; equals 1 iff ``l`` is parallel to ``r``."""
    left = np.asarray(left, dtype=complex).reshape(-1)
    right = np.asarray(right, dtype=complex).reshape(-1)
    overlap = np.vdot(left, right)
    ll = np.vdot(left, left).real
    rr = np.vdot(right, right).real
    if abs(overlap) < 1e-12 * np.sqrt(ll * rr):
        raise DegenerateVectors("left and right vectors are (nearly) orthogonal")
    return float(ll * rr / abs(overlap) ** 2)


def _closest_pair(values):
    n = values.size
    if n < 2:
        return None, np.inf
    d = np.abs(values[:, None] - values[None, :])
    d[np.diag_indices(n)] = np.inf
    i, j = np.unravel_index(np.argmin(d), d.shape)
    return (complex(values[i]), complex(values[j])), float(d[i, j])


def resonances(dyn: DynamicalMatrix, degeneracy_tol: float = 0.0,
               condition_bound: float = DEFAULT_CONDITION_BOUND,
               mean_spacing: float = float("nan")) -> ResonanceSet:
    """Bi-orthogonal eigendecomposition of the dynamical matrix.

    Left vectors come from the inverse of the right-vector matrix, so
    bi-orthonormality holds by construction.

    Raises
    ------
    NearDefective
        If the closest eigenvalue pair is within ``degeneracy_tol * ||A||``
        or the condition number of the (column-normalized) right-vector
        matrix exceeds ``condition_bound``.
    """
    a = dyn.a_matrix
    nu, right = scipy.linalg.eig(a)
    pair, gap = _closest_pair(nu)
    if degeneracy_tol > 0 and gap <= degeneracy_tol * dyn.norm:
        raise NearDefective(f"eigenvalue gap {gap:.3g} below tolerance", pair=pair)
    right = right / np.linalg.norm(right, axis=0)
    cond = float(np.linalg.cond(right))
    if not np.isfinite(cond) or cond > condition_bound:
        raise NearDefective(
            f"eigenvector condition number {cond:.3g} exceeds {condition_bound:.3g}",
            pair=pair, condition=cond)
    left = np.linalg.inv(right).conj().T
    order = np.lexsort((-nu.real, -nu.imag))
    nu, right, left = nu[order], right[:, order], left[:, order]
    # unit right vectors and l^H r = 1 make K = |l|^2
    k = np.sum(np.abs(left) ** 2, axis=0)
    return ResonanceSet(_frozen(nu), _frozen(right), _frozen(left), _frozen(k),
                        float(mean_spacing), cond)


def resonances_of(spectrum: ModeSpectrum, coupling: CouplingMatrix, **kwargs) -> ResonanceSet:
    """Convenience pipeline: couplings and spectrum to resonances."""
    dyn = build_dynamical(spectrum, build_damping(coupling))
    kwargs.setdefault("mean_spacing", spectrum.mean_spacing)
    return resonances(dyn, **kwargs)
