"""Behavioral semiconductor-to-superconductor conversion elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SfetModel:
    """Superconducting FET: a gate voltage beyond threshold suppresses the critical current."""

    critical_current_nominal: float = 100e-6
    gate_threshold: float = 2.5
    critical_current_suppressed: Optional[float] = None  # defaults to half of nominal

    def __post_init__(self):
        if self.critical_current_nominal <= 0:
            raise ValueError("nominal critical current must be > 0")
        if self.gate_threshold <= 0:
            raise ValueError("gate threshold must be > 0")
        if self.critical_current_suppressed is None:
            object.__setattr__(self, "critical_current_suppressed", 0.5 * self.critical_current_nominal)
        if not 0 <= self.critical_current_suppressed < self.critical_current_nominal:
            raise ValueError("suppressed critical current must lie in [0, nominal)")


def sfet_output(gate_voltage: float, m: SfetModel) -> float:
    if abs(gate_voltage) >= m.gate_threshold:
        return m.critical_current_suppressed
    return m.critical_current_nominal


@dataclass(frozen=True)
class SfqPulse:
    amplitude: float = 1e-3  # V
    width: float = 2e-12  # s
    line_impedance: float = 15.0  # ohm

    def __post_init__(self):
        if self.amplitude <= 0 or self.width <= 0 or self.line_impedance <= 0:
            raise ValueError("pulse amplitude, width and line impedance must be > 0")

    @property
    def flux(self) -> float:
        return self.amplitude * self.width

    @property
    def energy(self) -> float:
        return self.amplitude**2 / self.line_impedance * self.width


@dataclass(frozen=True)
class Transmission:
    pulse: Optional[SfqPulse]  # None when blocked
    factor: float
    incident: float
    transmitted: float
    dissipated: float

    @property
    def blocked(self) -> bool:
        return self.pulse is None


def sfq_transmit(pulse: SfqPulse, transistor_on: bool, r_on: float) -> Transmission:
    """Pass a pulse through a series transistor into a matched line.

    On: amplitude scales by Z0 / (Z0 + r_on). Off: nothing passes. The
    energy not transmitted is counted as dissipated.
    """
    if r_on < 0:
        raise ValueError("r_on must be >= 0")
    incident = pulse.energy
    if not transistor_on:
        return Transmission(None, 0.0, incident, 0.0, incident)
    factor = pulse.line_impedance / (pulse.line_impedance + r_on)
    out = SfqPulse(pulse.amplitude * factor, pulse.width, pulse.line_impedance)
    transmitted = out.energy
    return Transmission(out, factor, incident, transmitted, incident - transmitted)


def pass_gate(v_in: float, on: bool) -> Optional[float]:
    """Semiconductor pass gate as a switch: the input voltage when on, open (None) when off."""
    return v_in if on else None
