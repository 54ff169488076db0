"""Configuration, ensemble orchestration, file output and the command line."""
from .config import RunConfig, load_config
from .runs import (EnsembleSummary, run_dynamics, run_ensemble, run_laser, run_spectrum,
                   simulate_realization)

__all__ = ["RunConfig", "load_config", "EnsembleSummary", "run_spectrum", "run_dynamics",
           "run_laser", "run_ensemble", "simulate_realization"]
