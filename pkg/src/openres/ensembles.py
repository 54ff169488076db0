"""Random-matrix inputs: GOE mode spectra, Gaussian channel couplings and
nearest-neighbour spacing diagnostics."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InvalidParameter, NonPositiveFrequency, TooFewModes
from .seeding import rng_from

#: fraction of the spectrum (centred) used to fix the spacing scale
CENTRAL_WINDOW = 0.5


@dataclass(frozen=True)
class ModeSpectrum:
    """Closed-cavity mode frequencies (angular units, ascending).

    ``mean_spacing`` is the mean nearest-neighbour spacing in the central
    part of the spectrum; for sampled spectra it equals the requested scale.
    """

    frequencies: np.ndarray
    carrier: float
    mean_spacing: float
    rwa_threshold: float = 0.1

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float).reshape(-1)
        if freqs.size < 1:
            raise InvalidParameter("spectrum needs at least one mode")
        if not np.all(np.isfinite(freqs)):
            raise InvalidParameter("frequencies must be finite")
        if np.any(np.diff(freqs) < 0):
            raise InvalidParameter("frequencies must be sorted ascending")
        if np.any(freqs <= 0):
            raise NonPositiveFrequency("all mode frequencies must be positive")
        if not self.mean_spacing > 0:
            raise InvalidParameter("mean_spacing must be positive")
        freqs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)

    @classmethod
    def from_frequencies(cls, frequencies, carrier=None, window=1.0):
        """Wrap given frequencies; the spacing is measured in ``window``."""
        freqs = np.sort(np.asarray(frequencies, dtype=float))
        if carrier is None:
            carrier = float(freqs.mean())
        spacing = _window_spacing(freqs, window) if freqs.size > 1 else 1.0
        return cls(freqs, float(carrier), spacing)

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    @property
    def bandwidth_ratio(self) -> float:
        return float((self.frequencies[-1] - self.frequencies[0]) / self.carrier)

    @property
    def rwa_valid(self) -> bool:
        """Whether the band is narrow compared with the carrier."""
        return self.bandwidth_ratio < self.rwa_threshold


@dataclass(frozen=True)
class CouplingMatrix:
    """Real mode-channel coupling amplitudes ``W[lambda, m]``.

    Units are sqrt(angular frequency), so ``pi * W @ W.T`` is a rate.
    """

    entries: np.ndarray

    def __post_init__(self):
        w = np.array(self.entries, dtype=float, ndmin=2)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise InvalidParameter(f"coupling must be an N x M matrix with N, M >= 1, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidParameter("coupling entries must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "entries", w)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0]

    @property
    def channel_count(self) -> int:
        return self.entries.shape[1]

    def rotated(self, orthogonal) -> "CouplingMatrix":
        """Channel mixing ``W -> W @ O``."""
        return CouplingMatrix(self.entries @ np.asarray(orthogonal, dtype=float))


class Reference(str, enum.Enum):
    WIGNER = "wigner"
    POISSON = "poisson"


def wigner_cdf(s):
    """CDF of the GOE Wigner surmise ``(pi/2) s exp(-pi s^2/4)``."""
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, -np.expm1(-np.pi * s**2 / 4), 0.0)


def poisson_cdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, -np.expm1(-s), 0.0)


_CDFS = {Reference.WIGNER: wigner_cdf, Reference.POISSON: poisson_cdf}


@dataclass(frozen=True)
class SpacingStatistics:
    spacings: np.ndarray
    ks_statistic: float
    pvalue: float
    reference: Reference
    ks_contrast: float
    contrast_pvalue: float

    @property
    def ks_wigner(self) -> float:
        return self.ks_statistic if self.reference is Reference.WIGNER else self.ks_contrast

    @property
    def ks_poisson(self) -> float:
        return self.ks_statistic if self.reference is Reference.POISSON else self.ks_contrast


def _window_slice(n: int, window: float) -> slice:
    if not 0 < window <= 1:
        raise InvalidParameter("window must be in (0, 1]")
    lo = int(np.floor(n * (1 - window) / 2))
    return slice(lo, n - lo)


def _window_spacing(values: np.ndarray, window: float) -> float:
    sel = values[_window_slice(values.size, window)]
    if sel.size < 2:
        sel = values
    return float(np.mean(np.diff(sel)))


def sample_goe_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Real symmetric matrix, off-diagonal variance 1, diagonal variance 2."""
    x = rng.standard_normal((n, n))
    return (x + x.T) / np.sqrt(2.0)


def sample_goe_spectrum(n_modes: int, mean_spacing: float, carrier: float, seed,
                        rwa_threshold: float = 0.1) -> ModeSpectrum:
    """Draw a GOE spectrum centred on ``carrier`` with central spacing ``mean_spacing``.

    Eigenvalues are centred on their mean and scaled so that the mean
    nearest-neighbour spacing over the central half equals ``mean_spacing``.
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidParameter(f"n_modes must be a positive integer, got {n_modes}")
    if not mean_spacing > 0:
        raise InvalidParameter(f"mean_spacing must be positive, got {mean_spacing}")
    if not carrier > 0:
        raise InvalidParameter(f"carrier must be positive, got {carrier}")
    n_modes = int(n_modes)
    rng = rng_from(seed)
    eig = np.linalg.eigvalsh(sample_goe_matrix(n_modes, rng))
    eig = eig - eig.mean()
    if n_modes > 1:
        eig = eig * (mean_spacing / _window_spacing(eig, CENTRAL_WINDOW))
    freqs = carrier + eig
    if freqs[0] <= 0:
        raise NonPositiveFrequency(
            f"carrier {carrier} is below the spectral half-width {-eig[0]:.6g}")
    return ModeSpectrum(freqs, float(carrier), float(mean_spacing), rwa_threshold)


def coupling_variance(coupling_parameter, mean_spacing: float) -> np.ndarray:
    """Entry variance per channel, ``x * mean_spacing / (2 pi^2)``.

    With this normalization the ensemble-mean amplitude decay rate is
    ``sum(x) * mean_spacing / (2 pi)``, the Weisskopf width.
    """
    x = np.atleast_1d(np.asarray(coupling_parameter, dtype=float))
    return x * mean_spacing / (2 * np.pi**2)


def sample_coupling(n_modes: int, n_channels: int, coupling_parameter, mean_spacing: float,
                    seed) -> CouplingMatrix:
    """Independent zero-mean Gaussian couplings with per-channel variance."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidParameter(f"n_modes must be a positive integer, got {n_modes}")
    if int(n_channels) != n_channels or n_channels < 1:
        raise InvalidParameter(f"n_channels must be a positive integer, got {n_channels}")
    if not mean_spacing > 0:
        raise InvalidParameter(f"mean_spacing must be positive, got {mean_spacing}")
    x = np.atleast_1d(np.asarray(coupling_parameter, dtype=float))
    if x.size == 1:
        x = np.full(int(n_channels), x[0])
    if x.size != n_channels:
        raise InvalidParameter(f"need {n_channels} coupling parameters, got {x.size}")
    if not np.all(x > 0):
        raise InvalidParameter("coupling parameters must be > 0 (omit channels for a closed cavity)")
    rng = rng_from(seed)
    sigma = np.sqrt(coupling_variance(x, mean_spacing))
    return CouplingMatrix(rng.standard_normal((int(n_modes), int(n_channels))) * sigma)


def ks_against(spacings, reference: Reference = Reference.WIGNER) -> SpacingStatistics:
    """KS statistics of unit-mean spacings against Wigner and Poisson."""
    s = np.asarray(spacings, dtype=float)
    reference = Reference(reference)
    other = Reference.POISSON if reference is Reference.WIGNER else Reference.WIGNER
    main = stats.kstest(s, _CDFS[reference])
    contrast = stats.kstest(s, _CDFS[other])
    return SpacingStatistics(s, float(main.statistic), float(main.pvalue), reference,
                             float(contrast.statistic), float(contrast.pvalue))


def normalized_spacings(spectrum: ModeSpectrum, window: float = CENTRAL_WINDOW) -> np.ndarray:
    sel = spectrum.frequencies[_window_slice(spectrum.n_modes, window)]
    if sel.size < 3:
        raise TooFewModes(f"{sel.size} modes in window, need at least 3")
    s = np.diff(sel)
    return s / s.mean()


def spacing_statistics(spectrum: ModeSpectrum, window: float = CENTRAL_WINDOW,
                       reference: Reference = Reference.WIGNER) -> SpacingStatistics:
    return ks_against(normalized_spacings(spectrum, window), reference)
