"""Run drivers behind the CLI subcommands."""
from __future__ import annotations

import datetime
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..effective import build_damping, build_dynamical, resonances
from ..ensembles import sample_coupling, sample_goe_spectrum, spacing_statistics
from ..errors import BelowThreshold, NearDefective, NearDegenerateLasingMode, OpenResError
from ..fluctuations import (correlator_spectrum, field_noise, fit_lorentzian,
                            fluctuation_matrix_from, linewidth, spectrum_grid, zero_mode)
from ..langevin import (estimate_covariance, lyapunov_residual, noise_from_coupling, propagate,
                        steady_covariance)
from ..laser import GainMedium, lasing_threshold, steady_state
from ..seeding import stage_seed, substream
from .config import RunConfig
from .io import complex_matrix, write_csv, write_json


@dataclass
class Realization:
    """Sampled inputs and resonances of one ensemble member."""

    index: int
    spectrum: object
    coupling: object
    damping: object
    dynamical: object
    resonances: object


def build_realization(cfg: RunConfig, index: int, coupling_rotation=None) -> Realization:
    seq = substream(cfg.ensemble.master_seed, index)
    spec = sample_goe_spectrum(cfg.n_modes, cfg.mean_spacing, cfg.carrier, stage_seed(seq, "spectrum"))
    coup = sample_coupling(cfg.n_modes, cfg.n_channels, cfg.channel_x, cfg.mean_spacing,
                           stage_seed(seq, "coupling"))
    if coupling_rotation is not None:
        coup = coup.rotated(coupling_rotation)
    damp = build_damping(coup)
    dyn = build_dynamical(spec, damp)
    res = resonances(dyn, condition_bound=cfg.numerics.condition_bound,
                     mean_spacing=cfg.mean_spacing)
    return Realization(index, spec, coup, damp, dyn, res)


def medium_for(cfg: RunConfig, res) -> GainMedium:
    m = cfg.medium
    medium = GainMedium(m.pump_strength, m.atom_number, m.coupling, m.gamma_perp, m.gamma_par)
    if m.pump_ratio is not None:
        medium = medium.with_pump(m.pump_ratio * lasing_threshold(res, medium))
    return medium


@dataclass
class LaserResult:
    realization: Realization
    medium: GainMedium
    solution: object
    report: object
    spectrum: object
    zero_mode: object
    fitted_half_width: float


def simulate_realization(cfg: RunConfig, index: int, coupling_rotation=None) -> LaserResult:
    """Full laser pipeline for one realization; errors propagate."""
    real = build_realization(cfg, index, coupling_rotation)
    medium = medium_for(cfg, real.resonances)
    sol = steady_state(real.resonances, medium, a_matrix=real.dynamical.a_matrix,
                       degeneracy_tol=cfg.numerics.degeneracy_tol)
    fluct = fluctuation_matrix_from(real.dynamical.a_matrix, sol, medium)
    zm = zero_mode(fluct, sol)
    base = linewidth(sol)
    grid = spectrum_grid(sol.omega_bar, base.linewidth, cfg.numerics.spectrum_span,
                         cfg.numerics.spectrum_points)
    spec = correlator_spectrum(fluct, field_noise(real.damping), grid, sol,
                               condition_bound=cfg.numerics.condition_bound)
    report = linewidth(sol, zero_mode_weight=spec.zero_mode_weight)
    fitted = fit_lorentzian(grid, spec.values, sol.omega_bar)[1]
    return LaserResult(real, medium, sol, report, spec, zm, fitted)


def _prepare(cfg: RunConfig) -> Path:
    cfg.validate()
    out = Path(cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(out: Path, cfg: RunConfig, command: str, extra=None) -> Path:
    payload = {
        "command": command,
        "config": cfg.to_dict(),
        "master_seed": cfg.ensemble.master_seed,
        "versions": {"openres": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        payload.update(extra)
    return write_json(out / "manifest.json", payload)


def run_spectrum(cfg: RunConfig) -> dict:
    """Resonances and level spacings of realization 0."""
    out = _prepare(cfg)
    real = build_realization(cfg, 0)
    res = real.resonances
    files = {"resonances": write_csv(out / "resonances.csv", ["mode_index", "omega_k", "gamma_k", "K_k"],
                                     res.as_rows())}
    spacing_rows = []
    ks = {}
    try:
        st = spacing_statistics(real.spectrum, cfg.numerics.spacing_window)
    except OpenResError:
        st = None
    if st is not None:
        spacing_rows = [(i, s) for i, s in enumerate(st.spacings)]
        ks = {"ks_wigner": st.ks_wigner, "ks_poisson": st.ks_poisson}
    files["spacings"] = write_csv(out / "spacings.csv", ["index", "spacing"], spacing_rows)
    summary = {"overlap_ratio": res.overlap_ratio, "rwa_valid": real.spectrum.rwa_valid, **ks}
    files["manifest"] = write_manifest(out, cfg, "spectrum", {"summary": summary})
    return files


def run_dynamics(cfg: RunConfig) -> dict:
    """Langevin trajectory of realization 0 and its stationary covariance."""
    out = _prepare(cfg)
    real = build_realization(cfg, 0)
    d = cfg.dynamics
    noise = noise_from_coupling(real.damping, d.ordering)
    seq = stage_seed(substream(cfg.ensemble.master_seed, 0), "dynamics")
    traj = propagate(real.dynamical, noise, np.zeros(cfg.n_modes), d.dt, d.n_steps, seq)
    est = estimate_covariance(traj.amplitudes, burn_in=d.burn_in, n_batches=d.n_batches)
    lyap = steady_covariance(real.dynamical, noise)
    payload = {
        "matrix": complex_matrix(est.matrix),
        "n_samples": est.n_samples,
        "standard_error": est.standard_error,
        "elementwise_error": complex_matrix(est.elementwise_error),
        "lyapunov": complex_matrix(lyap),
        "lyapunov_residual": lyapunov_residual(real.dynamical, noise, lyap),
        "max_z_vs_lyapunov": float(est.z_scores(lyap).max()),
        "ordering": d.ordering,
    }
    files = {"covariance": write_json(out / "covariance.json", payload)}
    if d.write_trajectory:
        header = ["t"] + [f"{p}_a{i + 1}" for i in range(cfg.n_modes) for p in ("re", "im")]
        rows = ([t] + [v for z in a for v in (z.real, z.imag)]
                for t, a in zip(traj.times, traj.amplitudes))
        files["trajectory"] = write_csv(out / "trajectory.csv", header, rows)
    files["manifest"] = write_manifest(out, cfg, "dynamics")
    return files


def run_laser(cfg: RunConfig) -> dict:
    """Lasing state, linewidth and field spectrum of realization 0.

    Raises :class:`BelowThreshold` when the pump is too weak.
    """
    out = _prepare(cfg)
    result = simulate_realization(cfg, 0)
    files = {
        "lasing": write_json(out / "lasing.json", result.solution.to_dict()),
        "linewidth": write_json(out / "linewidth.json", result.report.to_dict()),
        "spectrum": write_csv(out / "spectrum.csv", ["omega", "S_real"],
                              zip(result.spectrum.omega, result.spectrum.values)),
    }
    files["manifest"] = write_manifest(out, cfg, "laser", {
        "warnings": list(result.solution.warnings),
        "fitted_half_width": result.fitted_half_width,
        "zero_mode_residual": result.zero_mode.residual,
    })
    return files


RECORD_FIELDS = ["seed_index", "status", "gamma_min", "omega_bar", "intensity", "K", "linewidth"]
# per-realization failures kept as data
DATA_ERRORS = (NearDefective, NearDegenerateLasingMode, BelowThreshold, OpenResError)


def _record(cfg: RunConfig, index: int):
    try:
        r = simulate_realization(cfg, index)
    except DATA_ERRORS as exc:
        return {"seed_index": index, "status": type(exc).__name__, "gamma_min": float("nan"),
                "omega_bar": float("nan"), "intensity": float("nan"), "K": float("nan"),
                "linewidth": float("nan")}
    s = r.solution
    return {"seed_index": index, "status": "ok", "gamma_min": s.gain_star,
            "omega_bar": s.omega_bar, "intensity": s.intensity, "K": s.petermann,
            "linewidth": r.report.linewidth}


def _records_chunk(args):
    cfg, indices = args
    return [_record(cfg, i) for i in indices]


QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass
class EnsembleSummary:
    records: list
    errors: dict = field(default_factory=dict)
    aggregates: dict = field(default_factory=dict)

    @property
    def ok_records(self):
        return [r for r in self.records if r["status"] == "ok"]

    @classmethod
    def from_records(cls, records) -> "EnsembleSummary":
        records = sorted(records, key=lambda r: r["seed_index"])
        errors = {}
        for r in records:
            if r["status"] != "ok":
                errors[r["status"]] = errors.get(r["status"], 0) + 1
        summary = cls(records, dict(sorted(errors.items())))
        summary.aggregates = summary.aggregate()
        return summary

    def aggregate(self) -> dict:
        ok = self.ok_records
        agg = {"n_realizations": len(self.records), "n_records": len(ok),
               "n_errored": len(self.records) - len(ok)}
        for key in ("K", "linewidth", "gamma_min", "intensity"):
            values = np.array([r[key] for r in ok], dtype=float)
            if values.size:
                agg[key] = {"mean": float(values.mean()), "median": float(np.median(values)),
                            "quantiles": {str(q): float(np.quantile(values, q)) for q in QUANTILES}}
        return agg


def collect_records(cfg: RunConfig, workers: int | None = None):
    n = cfg.ensemble.n_realizations
    workers = workers or cfg.ensemble.workers
    if workers <= 1:
        return [_record(cfg, i) for i in range(n)]
    chunks = [(cfg, list(range(n))[w::workers]) for w in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_records_chunk, chunks))
    records = [r for part in parts for r in part]
    return sorted(records, key=lambda r: r["seed_index"])


def run_ensemble(cfg: RunConfig, workers: int | None = None):
    """Laser pipeline over ``n_realizations`` substreams; returns (summary, files)."""
    out = _prepare(cfg)
    summary = EnsembleSummary.from_records(collect_records(cfg, workers))
    files = {
        "records": write_csv(out / "ensemble.csv", RECORD_FIELDS,
                             ([r[k] for k in RECORD_FIELDS] for r in summary.records)),
        "summary": write_json(out / "summary.json",
                              {"aggregates": summary.aggregates, "errors": summary.errors}),
    }
    files["manifest"] = write_manifest(out, cfg, "ensemble",
                                       {"workers": workers or cfg.ensemble.workers})
    return summary, files
