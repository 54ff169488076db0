"""Run configuration loaded from JSON."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..langevin import Ordering

FORMATS = {"csv", "json"}


@dataclass
class MediumConfig:
    pump_strength: float = 0.0
    atom_number: float = 1e4
    coupling: float = 0.1
    gamma_perp: float = 50.0
    gamma_par: float = 50.0
    # if set, the pump is this multiple of each realization's threshold
    pump_ratio: float | None = None


@dataclass
class DynamicsConfig:
    dt: float = 0.5
    n_steps: int = 100_000
    ordering: str = "symmetric"
    burn_in: int = 1000
    n_batches: int = 50
    write_trajectory: bool = False


@dataclass
class EnsembleConfig:
    n_realizations: int = 1
    master_seed: int = 0
    workers: int = 1


@dataclass
class OutputConfig:
    directory: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "json"])


@dataclass
class NumericsConfig:
    condition_bound: float = 1e8
    degeneracy_tol: float = 1e-6
    spacing_window: float = 0.5
    spectrum_span: float = 20.0
    spectrum_points: int = 2001


@dataclass
class RunConfig:
    n_modes: int = 20
    n_channels: int = 2
    coupling_x: list = field(default_factory=lambda: [1.0])
    mean_spacing: float = 1.0
    carrier: float = 1000.0
    medium: MediumConfig = field(default_factory=MediumConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    @property
    def channel_x(self) -> np.ndarray:
        x = np.atleast_1d(np.asarray(self.coupling_x, dtype=float))
        return np.full(self.n_channels, x[0]) if x.size == 1 else x

    def violations(self) -> list[str]:
        """Every precondition violated by this configuration."""
        out = []

        def positive(name, value):
            if not (isinstance(value, (int, float)) and value > 0):
                out.append(f"{name} must be > 0, got {value!r}")

        def count(name, value, minimum=1):
            if not (isinstance(value, int) and not isinstance(value, bool) and value >= minimum):
                out.append(f"{name} must be an integer >= {minimum}, got {value!r}")

        count("n_modes", self.n_modes)
        count("n_channels", self.n_channels)
        positive("mean_spacing", self.mean_spacing)
        positive("carrier", self.carrier)
        try:
            x = np.atleast_1d(np.asarray(self.coupling_x, dtype=float))
        except (TypeError, ValueError):
            out.append(f"coupling_x must be numeric, got {self.coupling_x!r}")
        else:
            if isinstance(self.n_channels, int) and x.size not in (1, self.n_channels):
                out.append(f"coupling_x needs 1 or {self.n_channels} values, got {x.size}")
            if not np.all(np.isfinite(x) & (x > 0)):
                out.append("coupling_x values must be finite and > 0")
        if not out:
            # GOE semicircle radius at the requested central spacing
            half_width = 2 * self.n_modes * self.mean_spacing / np.pi
            if self.carrier <= 1.2 * half_width:
                out.append(f"carrier {self.carrier} must exceed 1.2x the spectral half-width "
                           f"{half_width:.6g} to keep all frequencies positive")
        m = self.medium
        if not m.pump_strength >= 0:
            out.append("medium.pump_strength must be >= 0")
        if not m.atom_number >= 1:
            out.append("medium.atom_number must be >= 1")
        positive("medium.coupling", m.coupling)
        positive("medium.gamma_perp", m.gamma_perp)
        positive("medium.gamma_par", m.gamma_par)
        if m.pump_ratio is not None:
            positive("medium.pump_ratio", m.pump_ratio)
        d = self.dynamics
        positive("dynamics.dt", d.dt)
        count("dynamics.n_steps", d.n_steps)
        count("dynamics.burn_in", d.burn_in, 0)
        count("dynamics.n_batches", d.n_batches, 2)
        if d.ordering not in {o.value for o in Ordering}:
            out.append(f"dynamics.ordering must be one of {[o.value for o in Ordering]}")
        if isinstance(d.n_steps, int) and isinstance(d.burn_in, int) and d.burn_in >= d.n_steps:
            out.append("dynamics.burn_in must be smaller than dynamics.n_steps")
        e = self.ensemble
        count("ensemble.n_realizations", e.n_realizations)
        count("ensemble.master_seed", e.master_seed, 0)
        count("ensemble.workers", e.workers)
        bad = set(self.outputs.formats) - FORMATS
        if bad:
            out.append(f"outputs.formats has unknown entries {sorted(bad)}")
        n = self.numerics
        positive("numerics.condition_bound", n.condition_bound)
        if not n.degeneracy_tol >= 0:
            out.append("numerics.degeneracy_tol must be >= 0")
        if not 0 < n.spacing_window <= 1:
            out.append("numerics.spacing_window must be in (0, 1]")
        positive("numerics.spectrum_span", n.spectrum_span)
        count("numerics.spectrum_points", n.spectrum_points, 3)
        return out

    def validate(self) -> "RunConfig":
        problems = self.violations()
        if problems:
            raise ConfigError(problems)
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        sections = {"medium": MediumConfig, "dynamics": DynamicsConfig, "ensemble": EnsembleConfig,
                    "outputs": OutputConfig, "numerics": NumericsConfig}
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        problems = [f"unknown key {k!r}" for k in sorted(unknown)]
        kwargs = {}
        for key, value in data.items():
            if key in unknown:
                continue
            if key in sections:
                if not isinstance(value, dict):
                    problems.append(f"{key} must be an object")
                    continue
                section_fields = {f.name for f in dataclasses.fields(sections[key])}
                problems += [f"unknown key {key}.{k}" for k in sorted(set(value) - section_fields)]
                kwargs[key] = sections[key](**{k: v for k, v in value.items() if k in section_fields})
            else:
                kwargs[key] = value
        if problems:
            raise ConfigError(problems)
        return cls(**kwargs)


def load_config(path, seed=None, out=None, realizations=None) -> RunConfig:
    """Read a JSON config and apply command-line overrides (not yet validated)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    cfg = RunConfig.from_dict(data)
    if seed is not None:
        cfg.ensemble.master_seed = seed
    if out is not None:
        cfg.outputs.directory = str(out)
    if realizations is not None:
        cfg.ensemble.n_realizations = realizations
    return cfg
