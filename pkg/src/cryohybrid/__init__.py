"""Energy, scaling and control-architecture models for hybrid CMOS/superconductor cryogenic electronics."""

__version__ = "0.1.0"
