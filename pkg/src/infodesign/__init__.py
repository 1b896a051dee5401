"""Strategic information design over noisy channels: equilibrium solver,
feasible splitting regions, a two-transmitter power case study, and a
block-coding coordination simulator."""

__version__ = "0.1.0"
