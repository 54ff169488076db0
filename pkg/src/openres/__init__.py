"""Open chaotic resonators with overlapping modes: random-matrix mode
statistics, correlated damping and noise, and the Petermann-broadened
single-line laser."""

__version__ = "0.1.0"
