"""Adiabatic SRAM cell: power down, switch, power up.

The cell is a cross-coupled inverter pair on a floating supply. Writing it
adiabatically ramps the supply down (discharging whichever storage node is
high), flips the now-unpowered pair, then ramps the supply back up. The
comparison is an overpower write that forces both nodes through the full
swing against the powered cell.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..device_models import ClockSpec, TransistorProcess, ramp_energy


@dataclass
class SramCell:
    value: int = 0
    residual: float = 0.0  # V left on the floating supply when powered down

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError("SRAM value must be 0 or 1")
        if self.residual < 0:
            raise ValueError("residual must be >= 0")

    def tap(self) -> int:
        return self.value


@dataclass(frozen=True)
class SramUpdate:
    power_down: float
    switch: float
    power_up: float
    overpower: float
    changed: bool

    @property
    def adiabatic(self) -> float:
        return self.power_down + self.switch + self.power_up


def sram_update(cell: SramCell, new_value: int, p: TransistorProcess, clock: ClockSpec) -> SramUpdate:
    if new_value not in (0, 1):
        raise ValueError("SRAM value must be 0 or 1")
    if cell.residual >= p.swing:
        raise ValueError("residual must be below the supply swing")
    t = clock.ramp_time
    c, r = p.capacitance, p.on_resistance
    v = p.swing
    changed = new_value != cell.value
    down = ramp_energy(c, r, v - cell.residual, t)
    up = ramp_energy(c, r, v - cell.residual, t)
    # with residual charge on the collapsed supply, the two storage nodes swap through it
    switch = 2 * ramp_energy(c, r, cell.residual, t) if changed and cell.residual > 0 else 0.0
    overpower = c * v * v if changed else 0.0
    cell.value = new_value
    return SramUpdate(down, switch, up, overpower, changed)
