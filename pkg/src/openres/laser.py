"""Single-line lasing above threshold with uniform saturable gain."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .effective import ResonanceSet, _frozen, petermann_factor
from .errors import BelowThreshold, InvalidParameter, NearDegenerateLasingMode, NegativeIntensity


@dataclass(frozen=True)
class GainMedium:
    """Two-level gain medium after adiabatic elimination of the atoms.

    ``pump_strength`` S, ``atom_number`` N, atom-field coupling ``g`` and
    the polarization / inversion decay rates.
    """

    pump_strength: float
    atom_number: float
    coupling: float
    gamma_perp: float
    gamma_par: float
    adiabatic_factor: float = 10.0

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise InvalidParameter("; ".join(problems))

    def violations(self):
        out = []
        if not self.pump_strength >= 0:
            out.append("pump_strength must be >= 0")
        if not self.atom_number >= 1:
            out.append("atom_number must be >= 1")
        for name in ("coupling", "gamma_perp", "gamma_par"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0")
        return out

    @property
    def unsaturated_gain(self) -> float:
        return 2 * self.pump_strength * self.atom_number * self.coupling**2 / self.gamma_perp

    @property
    def saturation_intensity(self) -> float:
        return self.gamma_par * self.gamma_perp / (4 * self.coupling**2)

    def with_pump(self, pump_strength: float) -> "GainMedium":
        return replace(self, pump_strength=pump_strength)

    def adiabatic_warning(self, max_width: float) -> str | None:
        """Message if the atomic rates are not well above the field decay rates."""
        if min(self.gamma_perp, self.gamma_par) < self.adiabatic_factor * max_width:
            return (f"atomic decay rates ({self.gamma_perp:g}, {self.gamma_par:g}) are not "
                    f"{self.adiabatic_factor:g}x above the largest field decay rate {max_width:g}")
        return None


def gain(medium: GainMedium, intensity: float) -> float:
    """Saturated gain ``G0 / (1 + I / I_sat)``."""
    if intensity < 0:
        raise NegativeIntensity(f"intensity must be >= 0, got {intensity}")
    return medium.unsaturated_gain / (1 + intensity / medium.saturation_intensity)


def gain_slope(medium: GainMedium, intensity: float) -> float:
    """``dG/dI = -G^2 / (G0 I_sat)``."""
    g = gain(medium, intensity)
    return -g * g / (medium.unsaturated_gain * medium.saturation_intensity)


def lasing_threshold(res: ResonanceSet, medium: GainMedium) -> float:
    """Pump strength at which the unsaturated gain equals the smallest decay rate."""
    gamma_min = float(res.gamma.min())
    return gamma_min * medium.gamma_perp / (2 * medium.atom_number * medium.coupling**2)


@dataclass(frozen=True)
class LasingSolution:
    mode_index: int
    omega_bar: float
    gain_star: float
    intensity: float
    amplitude: np.ndarray
    left_vector: np.ndarray
    right_vector: np.ndarray
    petermann: float
    residual: float
    warnings: tuple = ()

    @property
    def n_modes(self) -> int:
        return self.amplitude.size

    def to_dict(self):
        return {
            "mode_index": int(self.mode_index),
            "omega_bar": float(self.omega_bar),
            "gain_star": float(self.gain_star),
            "intensity": float(self.intensity),
            "petermann": float(self.petermann),
            "amplitude": [[float(z.real), float(z.imag)] for z in self.amplitude],
        }


def steady_state_matrix(a_matrix, omega_bar: float, gain_value: float) -> np.ndarray:
    """``M = -1j (Omega - omega_bar) - gamma + G``, the rotating-frame generator with gain."""
    a = np.asarray(a_matrix, dtype=complex)
    n = a.shape[0]
    return a + (1j * omega_bar + gain_value) * np.eye(n)


def fix_phase(v) -> np.ndarray:
    """Rotate so the first largest-modulus component is real positive."""
    v = np.asarray(v, dtype=complex)
    mod = np.abs(v)
    # moduli equal up to rounding count as ties, resolved by position
    k = int(np.argmax(mod >= mod.max() * (1 - 1e-9)))
    return v * (abs(v[k]) / v[k])


def select_lasing_mode(res: ResonanceSet, degeneracy_tol: float = 1e-6) -> int:
    """Narrowest resonance; ties broken by lower frequency.

    Raises :class:`NearDegenerateLasingMode` when the two smallest widths are
    within ``degeneracy_tol * mean_spacing``.
    """
    gamma = res.gamma
    order = np.lexsort((res.omega, gamma))
    if gamma.size > 1:
        spacing = res.mean_spacing if np.isfinite(res.mean_spacing) else 1.0
        if gamma[order[1]] - gamma[order[0]] < degeneracy_tol * spacing:
            raise NearDegenerateLasingMode(
                f"two narrowest widths {gamma[order[0]]:.6g}, {gamma[order[1]]:.6g} are degenerate")
    return int(order[0])


def steady_state(res: ResonanceSet, medium: GainMedium, a_matrix=None,
                 degeneracy_tol: float = 1e-6) -> LasingSolution:
    """Lasing steady state on the narrowest resonance.

    ``a_matrix`` (the dynamical matrix) is optional and only used to report
    the residual of the steady-state equation.
    """
    k = select_lasing_mode(res, degeneracy_tol)
    gamma_k = float(res.gamma[k])
    g0 = medium.unsaturated_gain
    if not gamma_k > 0:
        raise InvalidParameter("lasing mode must have a positive decay rate")
    if g0 <= gamma_k:
        raise BelowThreshold(
            f"unsaturated gain {g0:.6g} does not exceed smallest decay rate {gamma_k:.6g}",
            pump=medium.pump_strength, threshold=lasing_threshold(res, medium))
    omega_bar = float(res.omega[k])
    intensity = medium.saturation_intensity * (g0 / gamma_k - 1)
    r = res.right_vectors[:, k]
    l = res.left_vectors[:, k]
    r_hat = fix_phase(r / np.linalg.norm(r))
    # keep l^H r = 1 after rephasing r
    l = l * (np.vdot(l, r_hat).conj() / abs(np.vdot(l, r_hat)) ** 2)
    amplitude = np.sqrt(intensity) * r_hat
    petermann = petermann_factor(l, r_hat)
    residual = float("nan")
    if a_matrix is not None:
        m = steady_state_matrix(a_matrix, omega_bar, gamma_k)
        scale = np.linalg.norm(m, 2) * np.linalg.norm(amplitude)
        residual = float(np.linalg.norm(m @ amplitude) / scale) if scale > 0 else 0.0
    notes = []
    msg = medium.adiabatic_warning(float(res.gamma.max()))
    if msg:
        notes.append(msg)
    return LasingSolution(k, omega_bar, gamma_k, float(intensity), _frozen(amplitude),
                          _frozen(l), _frozen(r_hat), petermann, residual, tuple(notes))
