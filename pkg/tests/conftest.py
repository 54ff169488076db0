import numpy as np
import pytest

from openres.effective import build_damping, build_dynamical, resonances
from openres.ensembles import sample_coupling, sample_goe_spectrum
from openres.seeding import stage_seed, substream


def make_system(n_modes, n_channels, x, seed, spacing=1.0, carrier=None):
    """(spectrum, coupling, damping, dynamical, resonances) of one realization."""
    carrier = carrier or 10.0 * n_modes * spacing + 100.0
    seq = substream(seed, 0)
    spec = sample_goe_spectrum(n_modes, spacing, carrier, stage_seed(seq, "spectrum"))
    coup = sample_coupling(n_modes, n_channels, x, spacing, stage_seed(seq, "coupling"))
    damp = build_damping(coup)
    dyn = build_dynamical(spec, damp)
    return spec, coup, damp, dyn, resonances(dyn, mean_spacing=spacing)


@pytest.fixture(scope="session")
def system():
    return make_system


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture(scope="session")
def criterion():
    """Record one pass/fail line per acceptance criterion; the line is printed at the end."""

    def record(number, title, ok, detail):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
