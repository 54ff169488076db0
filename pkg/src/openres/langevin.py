"""Linear Langevin dynamics of the mode amplitudes with channel-correlated
white noise, its exact Gaussian discretization and stationary moments."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .effective import DampingMatrix, DynamicalMatrix, _frozen
from .errors import MarginallyStable, NonPositiveStep, UnstableDynamics
from .seeding import rng_from


class Ordering(str, enum.Enum):
    """Operator ordering represented by the c-number noise.

    The value is the prefactor ``c`` in ``D = c * 2 * gamma``.
    """

    SYMMETRIC = "symmetric"
    NORMAL = "normal"
    ANTINORMAL = "antinormal"

    @property
    def prefactor(self) -> float:
        return {"symmetric": 0.5, "normal": 0.0, "antinormal": 1.0}[self.value]


@dataclass(frozen=True)
class NoiseModel:
    """White noise ``<F(t) F(t')^H> = covariance * delta(t - t')``."""

    covariance: np.ndarray
    ordering: Ordering | None = None

    def __post_init__(self):
        d = np.asarray(self.covariance)
        d = d.astype(complex if np.iscomplexobj(d) else float)
        object.__setattr__(self, "covariance", _frozen(d))

    @property
    def n_modes(self) -> int:
        return self.covariance.shape[0]


def noise_from_coupling(damping: DampingMatrix, ordering=Ordering.SYMMETRIC,
                        occupation: float = 0.0) -> NoiseModel:
    """``D = (c + occupation) * 2 * gamma`` with ``c`` set by the ordering."""
    ordering = Ordering(ordering)
    c = ordering.prefactor + occupation
    return NoiseModel(2.0 * c * damping.gamma, ordering)


def scaled_noise(damping: DampingMatrix, c: float) -> NoiseModel:
    """Noise with an arbitrary non-negative ordering constant ``c``."""
    if c < 0:
        raise ValueError("c must be non-negative")
    return NoiseModel(2.0 * c * damping.gamma)


def _check_stable(a: np.ndarray, rel_tol: float, exc):
    nu = np.linalg.eigvals(a)
    bound = rel_tol * np.linalg.norm(a, 2)
    worst = float(nu.real.max())
    if worst > bound:
        raise exc(f"eigenvalue real part {worst:.3g} exceeds {bound:.3g}")
    return nu


@dataclass(frozen=True)
class Propagator:
    """Exact one-step map ``a -> phi @ a + xi`` with ``Cov(xi) = q``."""

    phi: np.ndarray
    q: np.ndarray
    dt: float

    @cached_property
    def noise_factor(self) -> np.ndarray:
        # PSD square root tolerates rank-deficient q (rank <= number of channels)
        w, v = np.linalg.eigh(self.q)
        return v * np.sqrt(np.clip(w, 0.0, None))


def integrated_covariance(a, d, dt: float):
    """``(e^{A dt}, int_0^dt e^{As} D e^{A^H s} ds)`` by Van Loan's block exponential.

    The block exponential contains ``e^{-A^H h}``, so it is evaluated on a
    substep ``h = dt / 2^k`` with ``||A|| h <= 1`` and then doubled with
    ``Q(2h) = Phi(h) Q(h) Phi(h)^H + Q(h)``.
    """
    a = np.asarray(a)
    d = np.asarray(d)
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    k = max(0, int(np.ceil(np.log2(norm * dt)))) if norm * dt > 1 else 0
    h = dt / 2**k
    dtype = np.result_type(a, d)
    block = np.zeros((2 * n, 2 * n), dtype=dtype)
    block[:n, :n] = a
    block[:n, n:] = d
    block[n:, n:] = -a.conj().T
    e = scipy.linalg.expm(block * h)
    phi = e[:n, :n]
    q = e[:n, n:] @ phi.conj().T
    for _ in range(k):
        q = phi @ q @ phi.conj().T + q
        phi = phi @ phi
    return phi, 0.5 * (q + q.conj().T)


def step_propagator(dyn: DynamicalMatrix, noise: NoiseModel, dt: float) -> Propagator:
    """Exact one-step map for step ``dt``, see :func:`integrated_covariance`."""
    if not dt > 0:
        raise NonPositiveStep(f"dt must be positive, got {dt}")
    phi, q = integrated_covariance(dyn.a_matrix, noise.covariance, dt)
    return Propagator(_frozen(phi), _frozen(q), float(dt))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # shape (n_steps + 1, N)
    seed: object = None
    increments: np.ndarray | None = None  # shape (n_steps, N) when recorded


def propagate(dyn: DynamicalMatrix, noise: NoiseModel, a0, dt: float, n_steps: int, seed,
              record_increments: bool = False, propagator: Propagator | None = None) -> Trajectory:
    """Sample a trajectory with the exact Gaussian one-step update."""
    if not dt > 0:
        raise NonPositiveStep(f"dt must be positive, got {dt}")
    _check_stable(dyn.a_matrix, 1e-10, UnstableDynamics)
    prop = propagator or step_propagator(dyn, noise, dt)
    n = dyn.n_modes
    rng = rng_from(seed)
    z = rng.standard_normal((n_steps, n)) + 1j * rng.standard_normal((n_steps, n))
    xi = (z @ prop.noise_factor.T) / np.sqrt(2.0)
    out = np.empty((n_steps + 1, n), dtype=complex)
    out[0] = np.asarray(a0, dtype=complex)
    phi = prop.phi
    for i in range(n_steps):
        out[i + 1] = phi @ out[i] + xi[i]
    times = dt * np.arange(n_steps + 1)
    return Trajectory(times, out, seed, xi if record_increments else None)


def steady_covariance(dyn: DynamicalMatrix, noise: NoiseModel) -> np.ndarray:
    """Stationary ``<a a^H>`` solving ``A C + C A^H + D = 0``.

    Evaluated in the eigenbasis of ``A``:
    ``C = sum_jk r_j r_k^H (l_j^H D l_k) / (-nu_j - conj(nu_k))``.
    """
    a = dyn.a_matrix
    d = noise.covariance
    nu, right = scipy.linalg.eig(a)
    if np.any(d):
        bound = -1e-12 * np.linalg.norm(a, 2)
        if nu.real.max() >= bound:
            raise MarginallyStable(
                f"eigenvalue real part {nu.real.max():.3g} is not strictly negative")
    else:
        return np.zeros_like(a)
    left_h = np.linalg.inv(right)  # rows are l_j^H
    proj = left_h @ d @ left_h.conj().T
    core = proj / (-nu[:, None] - nu.conj()[None, :])
    c = right @ core @ right.conj().T
    return 0.5 * (c + c.conj().T)


def lyapunov_residual(dyn: DynamicalMatrix, noise: NoiseModel, c) -> float:
    """Relative residual ``||AC + CA^H + D|| / (||A|| ||C|| + ||D||)``."""
    a = dyn.a_matrix
    d = noise.covariance
    r = a @ c + c @ a.conj().T + d
    scale = np.linalg.norm(a, 2) * np.linalg.norm(c, 2) + np.linalg.norm(d, 2)
    return float(np.linalg.norm(r, 2) / scale) if scale > 0 else float(np.linalg.norm(r, 2))


@dataclass(frozen=True)
class CovarianceEstimate:
    """Time-averaged ``<a a^H>`` with batch-means standard errors."""

    matrix: np.ndarray
    n_samples: int
    standard_error: float
    elementwise_error: np.ndarray  # complex: real/imag parts carry the respective errors

    def z_scores(self, expected) -> np.ndarray:
        """Largest |deviation| / error over real and imaginary parts, per entry."""
        dev = self.matrix - np.asarray(expected)
        err = self.elementwise_error
        zr = np.abs(dev.real) / np.where(err.real > 0, err.real, np.inf)
        zi = np.abs(dev.imag) / np.where(err.imag > 0, err.imag, np.inf)
        return np.maximum(zr, zi)


def estimate_covariance(amplitudes, burn_in: int = 0, n_batches: int = 50) -> CovarianceEstimate:
    """Batch-means estimate of the stationary second moment ``<a a^H>``."""
    x = np.asarray(amplitudes)[burn_in:]
    n_samples, n = x.shape
    n_batches = max(2, min(n_batches, n_samples))
    size = n_samples // n_batches
    x = x[: size * n_batches]
    batches = x.reshape(n_batches, size, n)
    per_batch = np.einsum("bti,btj->bij", batches, batches.conj()) / size
    mean = per_batch.mean(axis=0)
    mean = 0.5 * (mean + mean.conj().T)
    se_r = per_batch.real.std(axis=0, ddof=1) / np.sqrt(n_batches)
    se_i = per_batch.imag.std(axis=0, ddof=1) / np.sqrt(n_batches)
    err = se_r + 1j * se_i
    return CovarianceEstimate(mean, size * n_batches, float(np.sqrt(np.mean(se_r**2 + se_i**2))), err)


def weak_damping_reduce(dyn: DynamicalMatrix, spacing: float):
    """Drop the off-diagonal damping.

    Returns the diagonal dynamical matrix and ``eps = max_offdiag |gamma| / spacing``.
    """
    a = dyn.a_matrix
    gamma = dyn.damping
    off = gamma - np.diag(np.diag(gamma))
    eps = float(np.abs(off).max() / spacing) if off.size else 0.0
    return DynamicalMatrix(np.diag(np.diag(a))), eps
