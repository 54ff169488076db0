"""Linearized quantum fluctuations about the lasing state: the doubled
fluctuation matrix, its phase-diffusion zero mode, the Petermann-enhanced
linewidth and the stationary field spectrum."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import OptimizeWarning, curve_fit

from .effective import DEFAULT_CONDITION_BOUND, DampingMatrix, _frozen, build_dynamical
from .ensembles import ModeSpectrum
from .errors import NearDefective, ZeroIntensity, ZeroModeMissing
from .langevin import NoiseModel, Ordering, integrated_covariance, noise_from_coupling
from .laser import GainMedium, LasingSolution, gain_slope, steady_state_matrix


@dataclass(frozen=True)
class FluctuationMatrix:
    """Generator of ``(da, da*)``:

    ``[[M, 0], [0, M*]] + dG/dI * w w^H`` with ``w = (a, a*)`` and ``M`` the
    steady-state generator at ``(omega_bar, G*)``.
    """

    l_matrix: np.ndarray
    dgdi: float

    @property
    def n_modes(self) -> int:
        return self.l_matrix.shape[0] // 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.l_matrix, 2))


def swap_blocks(n: int) -> np.ndarray:
    """Permutation exchanging the two N-blocks of a doubled vector."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]])


def fluctuation_matrix_from(a_matrix, solution: LasingSolution, medium: GainMedium) -> FluctuationMatrix:
    m = steady_state_matrix(a_matrix, solution.omega_bar, solution.gain_star)
    abar = solution.amplitude
    w = np.concatenate([abar, abar.conj()])
    dgdi = gain_slope(medium, solution.intensity)
    lmat = scipy.linalg.block_diag(m, m.conj()) + dgdi * np.outer(w, w.conj())
    return FluctuationMatrix(_frozen(lmat), float(dgdi))


def build_fluctuation_matrix(solution: LasingSolution, spectrum: ModeSpectrum,
                             damping: DampingMatrix, medium: GainMedium) -> FluctuationMatrix:
    dyn = build_dynamical(spectrum, damping)
    return fluctuation_matrix_from(dyn.a_matrix, solution, medium)


@dataclass(frozen=True)
class ZeroMode:
    right: np.ndarray
    left: np.ndarray
    residual: float
    left_residual: float
    smallest_eigenvalue: complex


def zero_mode(fluct: FluctuationMatrix, solution: LasingSolution) -> ZeroMode:
    """Phase mode ``v0 = (a, -a*) / |.|`` and its left partner ``u0`` (``u0^H v0 = 1``).

    ``u0`` comes from the bordered system ``[[L^H, v0], [v0^H, 0]]``.
    """
    lmat = fluct.l_matrix
    norm = fluct.norm
    mu = np.linalg.eigvals(lmat)
    smallest = complex(mu[np.argmin(np.abs(mu))])
    if abs(smallest) > 1e-6 * norm:
        raise ZeroModeMissing(f"smallest |eigenvalue| {abs(smallest):.3g} of the fluctuation matrix")
    abar = solution.amplitude
    v0 = np.concatenate([abar, -abar.conj()])
    v0 = v0 / np.linalg.norm(v0)
    n2 = lmat.shape[0]
    bordered = np.zeros((n2 + 1, n2 + 1), dtype=complex)
    bordered[:n2, :n2] = lmat.conj().T
    bordered[:n2, n2] = v0
    bordered[n2, :n2] = v0.conj()
    rhs = np.zeros(n2 + 1, dtype=complex)
    rhs[n2] = 1.0
    u0 = np.linalg.solve(bordered, rhs)[:n2]
    residual = float(np.linalg.norm(lmat @ v0) / norm)
    left_residual = float(np.linalg.norm(u0.conj() @ lmat) / (norm * np.linalg.norm(u0)))
    return ZeroMode(_frozen(v0), _frozen(u0), residual, left_residual, smallest)


@dataclass(frozen=True)
class LinewidthReport:
    schawlow_townes: float
    petermann: float
    linewidth: float
    zero_mode_weight: float = float("nan")

    def to_dict(self):
        return {k: float(getattr(self, k))
                for k in ("schawlow_townes", "petermann", "linewidth", "zero_mode_weight")}


def schawlow_townes(solution: LasingSolution) -> float:
    """Default baseline ``gamma / (2 I)`` of the lasing resonance."""
    if not solution.intensity > 0:
        raise ZeroIntensity("linewidth undefined at zero intensity")
    return solution.gain_star / (2 * solution.intensity)


def linewidth(solution: LasingSolution, baseline: float | None = None,
              zero_mode_weight: float = float("nan")) -> LinewidthReport:
    """``K * baseline``; ``baseline=None`` uses :func:`schawlow_townes`."""
    if not solution.intensity > 0:
        raise ZeroIntensity("linewidth undefined at zero intensity")
    st = schawlow_townes(solution) if baseline is None else float(baseline)
    return LinewidthReport(st, solution.petermann, solution.petermann * st, zero_mode_weight)


def field_noise(damping: DampingMatrix) -> NoiseModel:
    """Vacuum input noise ``<F F^H> = 2 pi W W^T`` driving the fluctuations."""
    return noise_from_coupling(damping, Ordering.ANTINORMAL)


def doubled_covariance(noise, atomic=None) -> np.ndarray:
    """Covariance of ``(F, F*)`` for circular field noise plus optional atomic noise."""
    if isinstance(noise, NoiseModel):
        d = np.asarray(noise.covariance, dtype=complex)
        cov = scipy.linalg.block_diag(d, d.conj())
    else:
        cov = np.asarray(noise, dtype=complex)
    if atomic is not None:
        atomic = np.asarray(atomic, dtype=complex)
        if atomic.shape != cov.shape:
            raise ValueError(f"atomic noise must be {cov.shape}, got {atomic.shape}")
        if np.linalg.eigvalsh(0.5 * (atomic + atomic.conj().T)).min() < -1e-12 * max(1.0, np.abs(atomic).max()):
            raise ValueError("atomic noise covariance must be positive semidefinite")
        cov = cov + atomic
    return cov


@dataclass(frozen=True)
class CorrelatorSpectrum:
    """Spectrum of ``<da^H(t) da(0)>`` with the phase-diffused carrier.

    ``S(w) = 2 Re sum_k weights[k] / (i (w - omega_bar) - rates[k])``; entry 0
    is the zero mode, whose rate is the phase-diffusion constant.
    """

    omega: np.ndarray
    values: np.ndarray
    omega_bar: float
    weights: np.ndarray
    rates: np.ndarray
    phase_diffusion: float
    zero_mode_weight: float

    def evaluate(self, omega, zero_mode_only: bool = False) -> np.ndarray:
        delta = np.asarray(omega, dtype=float) - self.omega_bar
        k = 1 if zero_mode_only else self.weights.size
        terms = self.weights[None, :k] / (1j * delta[:, None] - self.rates[None, :k])
        return 2 * terms.sum(axis=1).real


def _decompose(lmat, condition_bound):
    mu, v = scipy.linalg.eig(lmat)
    v = v / np.linalg.norm(v, axis=0)
    cond = float(np.linalg.cond(v))
    if not np.isfinite(cond) or cond > condition_bound:
        raise NearDefective(f"fluctuation eigenvectors ill-conditioned ({cond:.3g})", condition=cond)
    return mu, v, np.linalg.inv(v)


def correlator_spectrum(fluct: FluctuationMatrix, noise, frequency_grid, solution: LasingSolution,
                        atomic=None, condition_bound: float = DEFAULT_CONDITION_BOUND) -> CorrelatorSpectrum:
    """Stationary field spectrum from the bi-orthogonal decomposition of the fluctuation matrix.

    Non-zero modes contribute stationary Ornstein-Uhlenbeck terms whose weights
    are the noise projected onto left/right eigenpairs.  The zero mode is the
    phase of the carrier; it diffuses with ``D = u0^H Q u0 / (4 I)`` and turns
    the carrier (weight ``I``) into a Lorentzian of half-width ``D``.
    """
    n = fluct.n_modes
    q = doubled_covariance(noise, atomic)
    omega = np.asarray(frequency_grid, dtype=float)
    if not np.any(q):
        zeros = np.zeros_like(omega)
        return CorrelatorSpectrum(omega, zeros, solution.omega_bar, np.zeros(1), np.zeros(1), 0.0, float("nan"))
    zm = zero_mode(fluct, solution)
    mu, v, vinv = _decompose(fluct.l_matrix, condition_bound)
    k0 = int(np.argmin(np.abs(mu)))
    keep = np.array([k for k in range(2 * n) if k != k0], dtype=int)
    mu_p, v_p, uh_p = mu[keep], v[:, keep], vinv[keep, :]
    proj = uh_p @ q @ uh_p.conj().T
    c = proj / (-mu_p[:, None] - mu_p.conj()[None, :])
    low = v_p[n:, :]
    gram = low.conj().T @ low  # gram[k, j] = v_k^low^H v_j^low
    w_perp = np.einsum("jk,kj->j", c, gram)
    u0 = zm.left
    diffusion = float(np.real(u0.conj() @ q @ u0) / (4 * solution.intensity))
    weights = np.concatenate([[solution.intensity], w_perp])
    rates = np.concatenate([[-diffusion], mu_p])
    zmw = float(solution.intensity / np.abs(weights).sum())
    spec = CorrelatorSpectrum(omega, np.empty(0), solution.omega_bar, _frozen(weights.astype(complex)),
                              _frozen(rates.astype(complex)), diffusion, zmw)
    values = spec.evaluate(omega)
    object.__setattr__(spec, "values", _frozen(values))
    return spec


def lorentzian(omega, center, half_width, area, offset):
    return area * half_width / np.pi / ((omega - center) ** 2 + half_width**2) + offset


def fit_lorentzian(omega, values, center_guess: float, width_guess: float | None = None):
    """Least-squares Lorentzian plus constant; returns ``(center, half_width, area, offset)``.

    Without ``width_guess`` the starting width is read off the half-maximum
    crossings of the data.
    """
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)
    peak = values.max()
    base = values.min()
    if width_guess is None:
        above = omega[values >= base + 0.5 * (peak - base)]
        width_guess = max(0.5 * (above[-1] - above[0]), omega[1] - omega[0])
    # fit in centred, width-scaled units so finite-difference steps resolve the line
    scale = peak if peak > 0 else 1.0
    x = (omega - center_guess) / width_guess
    p0 = [0.0, 1.0, (peak - base) * np.pi / scale, base / scale]
    with warnings.catch_warnings():
        # an exact fit leaves the parameter covariance undefined, which is harmless here
        warnings.simplefilter("ignore", OptimizeWarning)
        popt, _ = curve_fit(lorentzian, x, values / scale, p0=p0, maxfev=20000)
    popt = np.array([center_guess + popt[0] * width_guess, abs(popt[1]) * width_guess,
                     popt[2] * scale * width_guess, popt[3] * scale])
    return tuple(float(p) for p in popt)


def spectrum_grid(center: float, half_width: float, span: float = 20.0, n_points: int = 4001):
    """Symmetric grid ``center +/- span * half_width``."""
    return np.linspace(center - span * half_width, center + span * half_width, n_points)


def phase_diffusion_from_trajectory(a_matrix, solution: LasingSolution, medium: GainMedium,
                                    noise: NoiseModel, dt: float, n_steps: int, seed,
                                    lag: int = 1) -> float:
    """Monte-Carlo estimate of the phase-diffusion constant (cross-check only).

    Simulates the linearized real dynamics of ``(Re da, Im da)`` exactly and
    measures the growth of ``Var[phi(t + lag dt) - phi(t)] = 2 D lag dt``
    with ``phi = Im(r^H da) / sqrt(I)`` read off the lasing mode.
    """
    from .seeding import rng_from

    fluct = fluctuation_matrix_from(a_matrix, solution, medium)
    n = fluct.n_modes
    lmat = fluct.l_matrix
    # (da, da*) = T y with y = (Re da, Im da)
    t = np.block([[np.eye(n), 1j * np.eye(n)], [np.eye(n), -1j * np.eye(n)]])
    t_inv = np.linalg.inv(t)
    g = np.real(t_inv @ lmat @ t)
    q = np.real(t_inv @ doubled_covariance(noise) @ t_inv.conj().T)
    q = 0.5 * (q + q.T)
    phi_step, qd = integrated_covariance(g, q, dt)
    w, vecs = np.linalg.eigh(qd)
    factor = vecs * np.sqrt(np.clip(w, 0, None))
    rng = rng_from(seed)
    xi = rng.standard_normal((n_steps, 2 * n)) @ factor.T
    y = np.zeros(2 * n)
    r_hat = solution.right_vector / np.linalg.norm(solution.right_vector)
    phases = np.empty(n_steps + 1)
    phases[0] = 0.0
    scale = np.sqrt(solution.intensity)
    for i in range(n_steps):
        y = phi_step @ y + xi[i]
        da = y[:n] + 1j * y[n:]
        phases[i + 1] = np.imag(np.vdot(r_hat, da)) / scale
    inc = phases[lag:] - phases[:-lag]
    return float(np.var(inc) / (2 * lag * dt))
