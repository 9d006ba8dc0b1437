"""Switch-level simulation of adiabatic and CMOS circuits with energy accounting."""

from .circuits import build_and_gate, build_cmos_shift_register, build_shift_register
from .engine import CHANNEL, RAIL_RETURN, EnergyEvent, EnergyTrace, SimResult, Waveform, simulate
from .netlist import ADIABATIC, CMOS, Netlist, NetlistError, NetlistFault, Node, OutputPort, Rail, Switch
from .sweep import SweepPoint, adiabatic_band, alternating_stimulus, energy_sweep, fit_loglog_slope, log_frequencies

__all__ = [
    "ADIABATIC", "CMOS", "CHANNEL", "RAIL_RETURN",
    "EnergyEvent", "EnergyTrace", "Netlist", "NetlistError", "NetlistFault", "Node", "OutputPort",
    "Rail", "SimResult", "SweepPoint", "Switch", "Waveform",
    "adiabatic_band", "alternating_stimulus", "build_and_gate", "build_cmos_shift_register",
    "build_shift_register", "energy_sweep", "fit_loglog_slope", "log_frequencies", "simulate",
]
