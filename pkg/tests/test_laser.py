import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openres.effective import build_damping, build_dynamical, resonances
from openres.ensembles import CouplingMatrix, ModeSpectrum
from openres.errors import (BelowThreshold, InvalidParameter, NearDegenerateLasingMode,
                            NegativeIntensity)
from openres.laser import (GainMedium, fix_phase, gain, gain_slope, lasing_threshold,
                           steady_state, steady_state_matrix)

MEDIUM = GainMedium(pump_strength=1.0, atom_number=1e4, coupling=0.1, gamma_perp=50.0, gamma_par=40.0)


def single_mode(w=0.4, omega=100.0):
    spec = ModeSpectrum([omega], omega, 1.0)
    damp = build_damping(CouplingMatrix([[w]]))
    dyn = build_dynamical(spec, damp)
    return dyn, resonances(dyn, mean_spacing=1.0)


def test_unsaturated_gain():
    assert gain(MEDIUM, 0.0) == pytest.approx(2 * 1.0 * 1e4 * 0.01 / 50.0, rel=1e-15)


def test_half_gain_at_saturation_intensity():
    i_sat = 40.0 * 50.0 / (4 * 0.01)
    assert MEDIUM.saturation_intensity == pytest.approx(i_sat)
    assert gain(MEDIUM, i_sat) == pytest.approx(MEDIUM.unsaturated_gain / 2)


@given(st.floats(0, 1e8), st.floats(1e-6, 1e8))
def test_gain_is_strictly_decreasing(i, di):
    assert gain(MEDIUM, i + di) < gain(MEDIUM, i)


def test_gain_vanishes_at_infinite_intensity():
    assert gain(MEDIUM, 1e30) < 1e-20
    with pytest.raises(NegativeIntensity):
        gain(MEDIUM, -1.0)


def test_gain_slope_matches_finite_difference():
    for i in (0.0, 10.0, 1e4):
        h = 1e-3 * (1 + i)
        fd = (gain(MEDIUM, i + h) - gain(MEDIUM, max(i - h, 0))) / (i + h - max(i - h, 0))
        assert gain_slope(MEDIUM, i) == pytest.approx(fd, rel=1e-5)
    assert gain_slope(MEDIUM, 0.0) == pytest.approx(-MEDIUM.unsaturated_gain / MEDIUM.saturation_intensity)


def test_medium_validation():
    with pytest.raises(InvalidParameter):
        GainMedium(1.0, 1e4, 0.1, -1.0, 1.0)
    assert MEDIUM.adiabatic_warning(1.0) is None
    assert "not" in MEDIUM.adiabatic_warning(10.0)


def test_single_mode_threshold():
    w = 0.4
    _, res = single_mode(w)
    assert lasing_threshold(res, MEDIUM) == pytest.approx(np.pi * w**2 * 50.0 / (2 * 1e4 * 0.01), rel=1e-12)


def test_threshold_quadruples_when_coupling_doubles(system):
    _, single = single_mode(0.4)
    _, doubled = single_mode(0.8)
    assert lasing_threshold(doubled, MEDIUM) == pytest.approx(4 * lasing_threshold(single, MEDIUM), rel=1e-12)
    # with several modes only the damping matrix quadruples; widths follow in the weak-coupling limit
    spec, coup, _, _, res = system(10, 2, 1e-3, seed=3)
    res2 = resonances(build_dynamical(spec, build_damping(CouplingMatrix(2 * coup.entries))))
    assert lasing_threshold(res2, MEDIUM) == pytest.approx(4 * lasing_threshold(res, MEDIUM), rel=1e-2)


def test_threshold_uses_narrowest_resonance(system):
    _, _, _, dyn, res = system(30, 1, 1.0, seed=1)
    gamma_min = (-np.linalg.eigvals(dyn.a_matrix).real).min()
    assert lasing_threshold(res, MEDIUM) == pytest.approx(gamma_min * 50.0 / (2 * 1e4 * 0.01), rel=1e-10)


def test_single_mode_fixed_point():
    dyn, res = single_mode(0.4)
    gamma = np.pi * 0.16
    medium = MEDIUM.with_pump(2 * lasing_threshold(res, MEDIUM))
    assert medium.unsaturated_gain == pytest.approx(2 * gamma)
    sol = steady_state(res, medium, a_matrix=dyn.a_matrix)
    assert sol.intensity == pytest.approx(medium.saturation_intensity, rel=1e-12)
    assert sol.amplitude[0] == pytest.approx(np.sqrt(medium.saturation_intensity))
    assert sol.amplitude[0].imag == 0
    assert sol.omega_bar == 100.0
    assert sol.petermann == pytest.approx(1.0, abs=1e-15)
    assert sol.gain_star == pytest.approx(gain(medium, sol.intensity), rel=1e-12)


def test_below_threshold():
    _, res = single_mode(0.4)
    with pytest.raises(BelowThreshold) as info:
        steady_state(res, MEDIUM.with_pump(0.99 * lasing_threshold(res, MEDIUM)))
    assert info.value.threshold == pytest.approx(lasing_threshold(res, MEDIUM))


def test_two_mode_closed_form():
    # W = (w, w): one bright and one dark combination, widths {2 pi w^2, 0} when degenerate
    w, w1, w2 = 0.3, 10.0, 10.4
    dyn = build_dynamical(ModeSpectrum([w1, w2], 10.2, 0.4), build_damping(CouplingMatrix([[w], [w]])))
    g = np.pi * w * w
    # A = -i diag(w1, w2) - g [[1,1],[1,1]]; eigenvalues by the quadratic formula
    tr = -1j * (w1 + w2) - 2 * g
    det = (-1j * w1 - g) * (-1j * w2 - g) - g * g
    disc = np.sqrt(tr * tr - 4 * det)
    nus = np.array([(tr + disc) / 2, (tr - disc) / 2])
    k = int(np.argmax(nus.real))
    nu = nus[k]
    r = np.array([g, -1j * w1 - g - nu])
    r = fix_phase(r / np.linalg.norm(r))
    res = resonances(dyn, mean_spacing=0.4)
    medium = MEDIUM.with_pump(3 * lasing_threshold(res, MEDIUM))
    sol = steady_state(res, medium, a_matrix=dyn.a_matrix)
    assert sol.gain_star == pytest.approx(-nu.real, abs=1e-10)
    assert sol.omega_bar == pytest.approx(-nu.imag, abs=1e-10)
    i = medium.saturation_intensity * (medium.unsaturated_gain / -nu.real - 1)
    assert sol.intensity == pytest.approx(i, rel=1e-10)
    assert np.allclose(sol.amplitude, np.sqrt(i) * r, atol=1e-8 * np.sqrt(i))
    # widths sum to the trace 2 pi w^2; the narrow one goes to zero as w2 -> w1
    assert -nus.real.sum() == pytest.approx(2 * g)


def test_near_degenerate_lasing_mode():
    spec = ModeSpectrum([10.0, 11.0], 10.5, 1.0)
    dyn = build_dynamical(spec, build_damping(CouplingMatrix([[0.3, 0.0], [0.0, 0.3]])))
    res = resonances(dyn, mean_spacing=1.0)
    with pytest.raises(NearDegenerateLasingMode):
        steady_state(res, MEDIUM.with_pump(3 * lasing_threshold(res, MEDIUM)))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 20), m=st.integers(1, 4), seed=st.integers(0, 10**6),
       ratio=st.floats(1.01, 50.0))
def test_steady_state_invariants(system, n, m, seed, ratio):
    _, _, _, dyn, res = system(n, m, 1.0, seed)
    medium = MEDIUM.with_pump(ratio * lasing_threshold(res, MEDIUM))
    sol = steady_state(res, medium, a_matrix=dyn.a_matrix)
    m_mat = steady_state_matrix(dyn.a_matrix, sol.omega_bar, sol.gain_star)
    assert np.linalg.norm(m_mat @ sol.amplitude) <= 1e-8 * np.linalg.norm(m_mat, 2) * np.linalg.norm(sol.amplitude)
    assert sol.residual <= 1e-8
    assert np.sum(np.abs(sol.amplitude) ** 2) == pytest.approx(sol.intensity, rel=1e-12)
    mod = np.abs(sol.amplitude)
    k = int(np.argmax(mod >= mod.max() * (1 - 1e-9)))
    assert sol.amplitude[k].imag == 0 and sol.amplitude[k].real > 0
    assert np.vdot(sol.left_vector, sol.right_vector) == pytest.approx(1, abs=1e-10)
    assert sol.petermann == pytest.approx(res.petermann[sol.mode_index], rel=1e-10)
    assert sol.gain_star == pytest.approx(gain(medium, sol.intensity), rel=1e-10)


def test_intensity_grows_linearly_with_pump(system):
    _, _, _, _, res = system(12, 2, 1.0, seed=5)
    s_th = lasing_threshold(res, MEDIUM)
    ratios = np.array([1.0 + 1e-9, 1.5, 2.0, 4.0, 8.0])
    i = np.array([steady_state(res, MEDIUM.with_pump(r * s_th)).intensity for r in ratios])
    assert np.all(np.diff(i) > 0)
    assert i[0] < 1e-6 * MEDIUM.saturation_intensity
    assert np.allclose(i, MEDIUM.saturation_intensity * (ratios - 1), rtol=1e-9, atol=1e-9)


@given(phi=st.floats(0, 2 * np.pi))
def test_gauge_covariance(phi):
    _, _, _, dyn2, res2 = _cached()
    medium = MEDIUM.with_pump(3 * lasing_threshold(res2, MEDIUM))
    sol = steady_state(res2, medium, a_matrix=dyn2.a_matrix)
    m_mat = steady_state_matrix(dyn2.a_matrix, sol.omega_bar, sol.gain_star)
    rotated = np.exp(1j * phi) * sol.amplitude
    assert np.linalg.norm(m_mat @ rotated) <= 1e-8 * np.linalg.norm(m_mat, 2) * np.linalg.norm(rotated)
    assert np.allclose(fix_phase(rotated), sol.amplitude, atol=1e-12 * np.sqrt(sol.intensity))
    assert np.sum(np.abs(rotated) ** 2) == pytest.approx(sol.intensity)


_CACHE = {}


def _cached():
    if "sys" not in _CACHE:
        from conftest import make_system
        _CACHE["sys"] = make_system(8, 2, 1.0, seed=21)
    return _CACHE["sys"]


def test_lasing_solution_serialization(system):
    _, _, _, dyn, res = system(5, 1, 1.0, seed=2)
    sol = steady_state(res, MEDIUM.with_pump(2 * lasing_threshold(res, MEDIUM)))
    d = sol.to_dict()
    assert set(d) == {"mode_index", "omega_bar", "gain_star", "intensity", "petermann", "amplitude"}
    amp = np.array([complex(*p) for p in d["amplitude"]])
    assert np.array_equal(amp, sol.amplitude)
