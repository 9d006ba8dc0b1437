"""Closed-form per-gate energy, power, leakage and refrigeration formulas.

Everything here is a pure function of plain values. The adiabatic charging
model is the quasi-static one: a capacitance C charged through a channel
resistance R by a linear ramp of duration t dissipates C^2 V^2 R / t in the
channel, clamped to the conventional 1/2 C V^2 when the ramp is too fast
(t <= 2RC, where the two expressions meet).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

ROOM_TEMPERATURE = 300.0
GATE_DELAYS_PER_CLOCK = 500
BOLTZMANN = 1.38e-23

# Refrigerator efficiencies back-solved from the ~1000x (4 K) and ~1e6x (15 mK)
# wall-plug multipliers: eta = (300 / T) / multiplier.
DEFAULT_EFFICIENCY = {4.0: 0.075, 0.015: 0.02}


@dataclass(frozen=True)
class TransistorProcess:
    capacitance: float = 1e-15  # F per driven node
    on_resistance: float = 3e3  # ohm
    swing: float = 1.0  # V, V_H - V_L
    on_off_ratio: float = 1e8
    gate_leak_fraction: float = 0.5
    label: str = "default"

    def __post_init__(self):
        # C = 0 is tolerated here (zero-load corner case); scenario parsing
        # enforces the strict C > 0 invariant.
        if self.capacitance < 0:
            raise ValueError("capacitance must be >= 0")
        if self.on_resistance <= 0:
            raise ValueError("on_resistance must be > 0")
        if self.swing <= 0:
            raise ValueError("swing must be > 0")
        if self.on_off_ratio < 1:
            raise ValueError("on_off_ratio must be >= 1")
        if not 0.0 <= self.gate_leak_fraction <= 1.0:
            raise ValueError("gate_leak_fraction must lie in [0, 1]")

    @property
    def rc(self) -> float:
        return self.on_resistance * self.capacitance

    @property
    def on_current(self) -> float:
        return self.swing / self.on_resistance

    @property
    def off_current(self) -> float:
        return self.on_current / self.on_off_ratio

    def cooled(self, source_drain_reduction: float) -> "TransistorProcess":
        """Return the process with only the source-drain share of leakage reduced.

        Gate leakage is temperature independent, so a balanced process
        (gate_leak_fraction = 0.5) can gain at most 2x from cooling alone.
        """
        if source_drain_reduction < 1:
            raise ValueError("reduction factor must be >= 1")
        g = self.gate_leak_fraction
        total = g + (1.0 - g) / source_drain_reduction
        return TransistorProcess(
            capacitance=self.capacitance,
            on_resistance=self.on_resistance,
            swing=self.swing,
            on_off_ratio=self.on_off_ratio / total,
            gate_leak_fraction=g / total,
            label=f"{self.label} (cooled)",
        )


@dataclass(frozen=True)
class DevicePoint:
    energy_per_op: float  # J
    propagation_delay: float  # s
    clock_rate: float  # Hz
    area_units: float = 1.0

    def __post_init__(self):
        if self.energy_per_op <= 0 or self.propagation_delay <= 0 or self.clock_rate <= 0:
            raise ValueError("energy, delay and clock rate must be positive")

    @classmethod
    def from_delay(cls, energy_per_op: float, propagation_delay: float, area_units: float = 1.0):
        return cls(
            energy_per_op,
            propagation_delay,
            1.0 / (GATE_DELAYS_PER_CLOCK * propagation_delay),
            area_units,
        )

    @classmethod
    def from_clock(cls, energy_per_op: float, clock_rate: float, area_units: float = 1.0):
        return cls(
            energy_per_op,
            1.0 / (GATE_DELAYS_PER_CLOCK * clock_rate),
            clock_rate,
            area_units,
        )

    def power(self, n_gates: int) -> float:
        return n_gates * self.clock_rate * self.energy_per_op


RQL_POINT = DevicePoint.from_clock(0.1e-18, 1.6e9, area_units=10_000.0)
CMOS_POINT = DevicePoint.from_clock(40e-18, 4e9, area_units=1.0)


@dataclass(frozen=True)
class ThermalStage:
    temperature: float  # K
    efficiency: float = 1.0  # fraction of Carnot
    heat_load: float = 0.0  # W dissipated at this stage
    name: str = ""

    def __post_init__(self):
        if not 0 < self.temperature:
            raise ValueError("temperature must be > 0 K")
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.heat_load < 0:
            raise ValueError("heat_load must be >= 0")


@dataclass(frozen=True)
class ClockSpec:
    frequency: float
    v_low: float = 0.0
    v_high: float = 1.0
    phase_count: int = 4

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        if self.v_high <= self.v_low:
            raise ValueError("v_high must exceed v_low")
        if self.phase_count != 4:
            raise ValueError("only four-phase clocks are supported")

    @property
    def ramp_time(self) -> float:
        return 1.0 / (4.0 * self.frequency)

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    @property
    def swing(self) -> float:
        return self.v_high - self.v_low


def ramp_energy(capacitance: float, resistance: float, delta_v: float, ramp_time: float) -> float:
    """Channel dissipation for moving a node by ``delta_v`` over ``ramp_time``."""
    if ramp_time <= 0:
        raise ValueError("ramp time must be > 0")
    dv2 = delta_v * delta_v
    conventional = 0.5 * capacitance * dv2
    adiabatic = capacitance * capacitance * dv2 * resistance / ramp_time
    return min(conventional, adiabatic)


def cmos_transition_energy(p: TransistorProcess) -> float:
    return 0.5 * p.capacitance * p.swing**2


def adiabatic_ramp_energy(p: TransistorProcess, ramp_time: float) -> float:
    return ramp_energy(p.capacitance, p.on_resistance, p.swing, ramp_time)


def static_power(p: TransistorProcess, duty: float) -> float:
    """Off-state leakage power of one gate node: V * I_off * duty."""
    if not 0.0 <= duty <= 1.0:
        raise ValueError("duty must lie in [0, 1]")
    return p.swing * p.off_current * duty


def refrigeration_multiplier(stage: ThermalStage) -> float:
    """Wall-plug watts per watt dissipated at ``stage`` (300/T divided by efficiency)."""
    t = stage.temperature
    if t > ROOM_TEMPERATURE:
        raise ValueError(f"stage at {t} K is above {ROOM_TEMPERATURE} K; nothing to refrigerate")
    if t == ROOM_TEMPERATURE:
        return 1.0
    return (ROOM_TEMPERATURE / t) / stage.efficiency


def wall_plug_power(stages: Sequence[ThermalStage]) -> float:
    if not stages:
        raise ValueError("at least one stage is required")
    temps = [s.temperature for s in stages]
    if temps[0] > ROOM_TEMPERATURE:
        raise ValueError("stage temperatures must not exceed 300 K")
    for hot, cold in zip(temps, temps[1:]):
        if cold >= hot:
            raise ValueError(f"stage temperatures must strictly decrease ({hot} K then {cold} K)")
    return sum(s.heat_load * refrigeration_multiplier(s) for s in stages)


def default_efficiency(temperature: float) -> float:
    """Back-solved efficiency at 4 K and 15 mK; 1.0 elsewhere."""
    for t, eta in DEFAULT_EFFICIENCY.items():
        if abs(temperature - t) <= 1e-9 * max(1.0, t):
            return eta
    return 1.0


def landauer_limit(temperature: float) -> float:
    """Minimum energy kT ln 2 to erase one bit at ``temperature``."""
    return BOLTZMANN * temperature * math.log(2.0)
