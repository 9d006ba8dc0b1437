"""Tapped control-signal grid and its four-step adiabatic update protocol.

Each cell stores a control voltage on a capacitor plate behind an access
transistor; rows select, columns carry data. An update cycle

1. drives every column to the value the cell in the target row is believed
   to hold (the external shadow copy), with all access transistors off;
2. turns the row on, which moves no charge when the shadow copy is right;
3. ramps the columns to the new values, charging the cells adiabatically;
4. turns the row off and returns the columns to their idle level.

A stale shadow entry makes step 2 snap the cell to the column voltage,
which is recorded as a non-adiabatic event and a violation.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..device_models import ramp_energy
from ..gatesim.engine import CHANNEL, RAIL_RETURN, EnergyEvent, EnergyTrace

ANALOG_LIMIT = 1.0  # V, spin-qubit DC gate range


class TapKind(str, enum.Enum):
    DIGITAL = "digital"
    ANALOG = "analog"
    SFET_GATE = "sfet_gate"


class Stage(str, enum.Enum):
    IDLE = "idle"
    COLUMNS_DRIVEN = "columns_driven"
    ROW_ASSERTED = "row_asserted"
    WRITTEN = "written"


class ProtocolError(RuntimeError):
    """An update step was requested out of order."""


@dataclass
class CellGrid:
    rows: int
    cols: int
    cell_capacitance: float = 1e-15
    column_capacitance: float = 1e-15
    access_gate_capacitance: float = 1e-15  # per cell, loads the row line
    tap_capacitance: float = 0.0  # control-signal load hanging off each cell
    on_resistance: float = 3e3
    v_data: tuple = (0.0, 1.0)
    v_row: tuple = (0.0, 2.0)
    threshold: float = 0.5
    sfet_drive_limit: float = 5.0
    tap_kinds: Optional[List[List[TapKind]]] = None
    voltages: np.ndarray = field(init=False)
    column_voltage: np.ndarray = field(init=False)
    active_row: Optional[int] = field(init=False, default=None)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("grid dimensions must be >= 0")
        for name in ("cell_capacitance", "column_capacitance", "on_resistance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.access_gate_capacitance < 0 or self.tap_capacitance < 0:
            raise ValueError("capacitances must be >= 0")
        lo, hi = self.v_data
        rlo, rhi = self.v_row
        if hi <= lo or rhi <= rlo:
            raise ValueError("swings need V_H > V_L")
        # access devices must be definitively on for every data level and off at the row low level
        if rhi - hi < self.threshold:
            raise ValueError("row high level must exceed the data high level by at least one threshold")
        if lo - rlo < 0:
            raise ValueError("row low level must not exceed the data low level")
        if self.tap_kinds is None:
            self.tap_kinds = [[TapKind.DIGITAL] * self.cols for _ in range(self.rows)]
        else:
            self.tap_kinds = [[TapKind(k) for k in row] for row in self.tap_kinds]
            if len(self.tap_kinds) != self.rows or any(len(r) != self.cols for r in self.tap_kinds):
                raise ValueError("tap_kinds must be rows x cols")
        self.voltages = np.full((self.rows, self.cols), lo, dtype=float)
        self.column_voltage = np.full(self.cols, lo, dtype=float)

    @property
    def row_line_capacitance(self) -> float:
        return self.cols * self.access_gate_capacitance

    def access_state(self) -> np.ndarray:
        """True where the access transistor conducts (only the asserted row)."""
        on = np.zeros((self.rows, self.cols), dtype=bool)
        if self.active_row is not None:
            on[self.active_row, :] = True
        return on

    def verify_reference_state(self) -> bool:
        return not self.access_state().any() and bool(np.all(self.column_voltage == self.v_data[0]))

    def tap(self, row: int, col: int) -> float:
        return float(self.voltages[row, col])

    def check_value(self, row: int, col: int, value: float) -> Optional[str]:
        kind = self.tap_kinds[row][col]
        if kind is TapKind.DIGITAL and value not in self.v_data:
            return f"cell ({row},{col}) is digital; {value!r} V is not one of {self.v_data}"
        if kind is TapKind.ANALOG and not -ANALOG_LIMIT <= value <= ANALOG_LIMIT:
            return f"cell ({row},{col}) is analog; {value!r} V is outside +/-{ANALOG_LIMIT} V"
        if kind is TapKind.SFET_GATE and abs(value) > self.sfet_drive_limit:
            return f"cell ({row},{col}) drives an SFET gate; {value!r} V exceeds {self.sfet_drive_limit} V"
        return None

    def snapshot_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "kind", "volts"])
        for r in range(self.rows):
            for c in range(self.cols):
                w.writerow([r, c, self.tap_kinds[r][c].value, repr(float(self.voltages[r, c]))])
        return buf.getvalue()


@dataclass(frozen=True)
class StepRecord:
    step: str
    row: int
    energy: float
    violations: int


@dataclass
class UpdateSession:
    """One external controller's view of a grid: the shadow copy plus protocol state."""

    grid: CellGrid
    ramp_time: float
    shadow: np.ndarray = None
    stage: Stage = Stage.IDLE
    target_row: Optional[int] = None
    trace: EnergyTrace = field(default_factory=EnergyTrace)
    violation_count: int = 0
    transcript: List[StepRecord] = field(default_factory=list)
    _tick: int = 0

    def __post_init__(self):
        if self.ramp_time <= 0:
            raise ValueError("ramp_time must be > 0")
        if self.shadow is None:
            self.shadow = self.grid.voltages.copy()
        else:
            self.shadow = np.array(self.shadow, dtype=float)
            if self.shadow.shape != self.grid.voltages.shape:
                raise ValueError("shadow copy must match the grid shape")

    @property
    def consistent(self) -> bool:
        return bool(np.array_equal(self.shadow, self.grid.voltages))

    def _require(self, stage: Stage, action: str):
        if self.stage is not stage:
            raise ProtocolError(f"cannot {action} in stage {self.stage.value} (needs {stage.value})")

    def _ramp(self, label: str, c: float, dv: float) -> float:
        if dv == 0 or c == 0:
            return 0.0
        g = self.grid
        e = ramp_energy(c, g.on_resistance, dv, self.ramp_time)
        full = 0.5 * c * dv * dv
        t = self._tick * self.ramp_time
        self.trace.events.append(EnergyEvent(t, self._tick, label, CHANNEL, e, True))
        if full > e:
            self.trace.events.append(EnergyEvent(t, self._tick, label, RAIL_RETURN, full - e, True))
        return e

    def _finish(self, step: str, energy: float, violations: int = 0):
        self.transcript.append(StepRecord(step, self.target_row, energy, violations))
        self._tick += 1

    def _move_columns(self, target: np.ndarray) -> float:
        g = self.grid
        e = 0.0
        for c in range(g.cols):
            e += self._ramp(f"col{c}", g.column_capacitance, float(target[c] - g.column_voltage[c]))
        g.column_voltage = target.astype(float).copy()
        return e

    def drive_columns(self, row: int) -> "UpdateSession":
        self._require(Stage.IDLE, "drive columns")
        g = self.grid
        if not 0 <= row < g.rows:
            raise IndexError(f"row {row} out of range 0..{g.rows - 1}")
        self.target_row = row
        e = self._move_columns(self.shadow[row])
        self.stage = Stage.COLUMNS_DRIVEN
        self._finish("drive_columns", e)
        return self

    def assert_row(self) -> "UpdateSession":
        self._require(Stage.COLUMNS_DRIVEN, "assert the row")
        g = self.grid
        r = self.target_row
        e = self._ramp(f"row{r}", g.row_line_capacitance, g.v_row[1] - g.v_row[0])
        g.active_row = r
        violations = 0
        t = self._tick * self.ramp_time
        for c in range(g.cols):
            dv = float(g.column_voltage[c] - g.voltages[r, c])
            if dv != 0:
                joules = 0.5 * (g.cell_capacitance + g.tap_capacitance) * dv * dv
                self.trace.events.append(EnergyEvent(t, self._tick, f"cell{r},{c}", CHANNEL, joules, False))
                e += joules
                violations += 1
                g.voltages[r, c] = g.column_voltage[c]
        self.violation_count += violations
        self.stage = Stage.ROW_ASSERTED
        self._finish("assert_row", e, violations)
        return self

    def write_columns(self, new_values: Sequence[float]) -> "UpdateSession":
        self._require(Stage.ROW_ASSERTED, "write columns")
        g = self.grid
        r = self.target_row
        vals = np.array([float(v) for v in new_values])
        if len(vals) != g.cols:
            raise ValueError(f"expected {g.cols} column values, got {len(vals)}")
        problems = [msg for c, v in enumerate(vals) if (msg := g.check_value(r, c, v))]
        if problems:
            raise ValueError("; ".join(problems))
        e = 0.0
        for c in range(g.cols):
            e += self._ramp(f"cell{r},{c}", g.cell_capacitance + g.tap_capacitance, float(vals[c] - g.voltages[r, c]))
        e += self._move_columns(vals)
        g.voltages[r, :] = vals
        self.shadow[r, :] = vals
        self.stage = Stage.WRITTEN
        self._finish("write_columns", e)
        return self

    def release_row(self) -> "UpdateSession":
        self._require(Stage.WRITTEN, "release the row")
        g = self.grid
        r = self.target_row
        e = self._ramp(f"row{r}", g.row_line_capacitance, g.v_row[0] - g.v_row[1])
        g.active_row = None
        e += self._move_columns(np.full(g.cols, g.v_data[0]))
        self.stage = Stage.IDLE
        self._finish("release_row", e)
        self.target_row = None
        return self

    def update_row(self, row: int, new_values: Sequence[float]) -> "UpdateSession":
        """All four steps in order."""
        return self.drive_columns(row).assert_row().write_columns(new_values).release_row()

    def transcript_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "row", "joules", "violations"])
        for rec in self.transcript:
            w.writerow([rec.step, rec.row, repr(rec.energy), rec.violations])
        return buf.getvalue()
