import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ortho_group

from openres.effective import resonances_of
from openres.ensembles import (CouplingMatrix, ModeSpectrum, Reference, coupling_variance,
                               ks_against, normalized_spacings, sample_coupling,
                               sample_goe_matrix, sample_goe_spectrum, spacing_statistics,
                               wigner_cdf)
from openres.errors import InvalidParameter, NonPositiveFrequency, TooFewModes
from openres.seeding import rng_from, stage_seed, substream


def independent_goe_spacings(n, realizations, seed):
    """Reference spacings: GOE matrices built entry by entry, dense eigensolve."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(realizations):
        h = np.empty((n, n))
        for i in range(n):
            h[i, i] = rng.normal(scale=np.sqrt(2.0))
            for j in range(i + 1, n):
                h[i, j] = h[j, i] = rng.normal()
        e = np.linalg.eigvalsh(h)[n // 4: n - n // 4]
        s = np.diff(e)
        out.append(s / s.mean())
    return np.concatenate(out)


def test_single_mode_sits_on_carrier():
    spec = sample_goe_spectrum(1, 1.0, 100.0, seed=7)
    assert spec.frequencies.tolist() == [100.0]
    assert spec.n_modes == 1


def test_same_seed_is_bitwise_identical():
    a = sample_goe_spectrum(50, 0.3, 1e3, seed=42)
    b = sample_goe_spectrum(50, 0.3, 1e3, seed=42)
    assert a.frequencies.tobytes() == b.frequencies.tobytes()
    c = sample_goe_spectrum(50, 0.3, 1e3, seed=43)
    assert a.frequencies.tobytes() != c.frequencies.tobytes()


def test_central_spacing_matches_request():
    spec = sample_goe_spectrum(101, 0.25, 1e3, seed=3)
    central = spec.frequencies[25:76]
    assert np.mean(np.diff(central)) == pytest.approx(0.25, rel=1e-12)
    assert spec.mean_spacing == 0.25
    assert np.all(np.diff(spec.frequencies) > 0)


def test_rotating_wave_flag():
    assert sample_goe_spectrum(20, 1.0, 1e4, seed=0).rwa_valid
    narrow = sample_goe_spectrum(20, 1.0, 20.0, seed=0)
    assert not narrow.rwa_valid


@pytest.mark.parametrize("kwargs", [dict(n_modes=0), dict(mean_spacing=0.0), dict(mean_spacing=-1.0),
                                    dict(carrier=0.0)])
def test_goe_rejects_bad_parameters(kwargs):
    args = dict(n_modes=5, mean_spacing=1.0, carrier=100.0, seed=0) | kwargs
    with pytest.raises(InvalidParameter):
        sample_goe_spectrum(**args)


def test_goe_rejects_small_carrier():
    with pytest.raises(NonPositiveFrequency):
        sample_goe_spectrum(100, 1.0, 5.0, seed=0)


def test_goe_matrix_is_exactly_symmetric_with_2_to_1_variances():
    rng = rng_from(5)
    h = sample_goe_matrix(400, rng)
    assert np.array_equal(h, h.T)
    off = h[np.triu_indices(400, 1)]
    assert np.var(np.diag(h)) / np.var(off) == pytest.approx(2.0, rel=0.15)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 2**32 - 1))
def test_goe_spectrum_is_orthogonally_invariant(n, seed):
    rng = rng_from(seed)
    h = sample_goe_matrix(n, rng)
    o = ortho_group.rvs(n, random_state=seed % 2**31) if n > 1 else np.eye(1)
    e1 = np.linalg.eigvalsh(h)
    e2 = np.linalg.eigvalsh(o @ h @ o.T)
    assert np.allclose(e1, e2, rtol=0, atol=1e-10 * np.abs(e1).max())


def test_coupling_rejects_closed_channel():
    with pytest.raises(InvalidParameter):
        sample_coupling(10, 1, 0.0, 1.0, seed=0)
    with pytest.raises(InvalidParameter):
        sample_coupling(10, 2, [1.0, -1.0], 1.0, seed=0)


def test_coupling_variance_law_of_large_numbers():
    x = np.array([1.0, 0.3, 2.5])
    spacing = 0.7
    draws = [sample_coupling(200, 3, x, spacing, seed=s).entries for s in range(600)]
    w = np.concatenate(draws)  # 1.2e5 draws per channel
    expected = coupling_variance(x, spacing)
    assert np.allclose(w.var(axis=0), expected, rtol=0.05)
    assert np.allclose(expected, x * spacing / (2 * np.pi**2))


def test_coupling_is_deterministic():
    a = sample_coupling(30, 4, 1.0, 1.0, seed=9).entries
    b = sample_coupling(30, 4, 1.0, 1.0, seed=9).entries
    assert a.tobytes() == b.tobytes()


def test_coupling_matrix_guards():
    with pytest.raises(InvalidParameter):
        CouplingMatrix(np.array([[np.nan]]))
    w = CouplingMatrix([[1.0, 2.0]])
    assert (w.n_modes, w.channel_count) == (1, 2)


@pytest.mark.slow
def test_mean_width_is_weisskopf_like():
    # mean amplitude decay rate = M * spacing / (2 pi) for x = 1
    m = 3
    widths = []
    for s in range(60):
        seq = substream(s, 0)
        spec = sample_goe_spectrum(500, 1.0, 1e4, stage_seed(seq, "spectrum"))
        coup = sample_coupling(500, m, 1.0, 1.0, stage_seed(seq, "coupling"))
        widths.append(resonances_of(spec, coup).gamma.mean())
    assert np.mean(widths) == pytest.approx(m / (2 * np.pi), rel=0.15)


def test_equally_spaced_spectrum_ks_is_fixed_number():
    spec = ModeSpectrum.from_frequencies([1.0, 2.0, 3.0, 4.0, 5.0])
    stats = spacing_statistics(spec, window=1.0)
    assert np.allclose(stats.spacings, 1.0)
    f1 = 1 - np.exp(-np.pi / 4)
    assert stats.ks_statistic == pytest.approx(max(f1, 1 - f1), abs=1e-12)
    assert stats.reference is Reference.WIGNER


def test_too_few_modes_in_window():
    spec = ModeSpectrum.from_frequencies([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(TooFewModes):
        spacing_statistics(spec, window=0.5)
    with pytest.raises(TooFewModes):
        spacing_statistics(ModeSpectrum.from_frequencies([1.0, 2.0]), window=1.0)


def test_spacings_have_unit_mean():
    spec = sample_goe_spectrum(300, 2.0, 1e4, seed=1)
    s = normalized_spacings(spec, 0.5)
    assert abs(s.mean() - 1) < 1e-9


def test_pooled_goe_spacings_prefer_wigner_over_poisson():
    pooled = independent_goe_spacings(120, 100, seed=2)
    assert pooled.size >= 5000
    stats = ks_against(pooled)
    assert stats.ks_wigner < stats.ks_poisson
    poisson = ks_against(np.random.default_rng(0).exponential(size=5000))
    assert poisson.ks_poisson < poisson.ks_wigner


def test_wigner_cdf_properties():
    s = np.linspace(0, 6, 2001)
    f = wigner_cdf(s)
    assert f[0] == 0 and f[-1] == pytest.approx(1, abs=1e-12)
    assert np.all(np.diff(f) >= 0)
    # unit mean: integral of the survival function
    assert np.trapezoid(1 - f, s) == pytest.approx(1.0, abs=1e-6)
