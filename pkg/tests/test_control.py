import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cryohybrid.control import (
    CellGrid,
    ProtocolError,
    SfetModel,
    SfqPulse,
    SramCell,
    Stage,
    TapKind,
    UpdateSession,
    pass_gate,
    sfet_output,
    sfq_transmit,
    sram_update,
)
from cryohybrid.device_models import ClockSpec, TransistorProcess
from cryohybrid.gatesim import CHANNEL

T = 3e-9  # 1000 RC with the default 1 fF / 3 kOhm


def quad(c, dv, t=T, r=3e3):
    """Adiabatic ramp dissipation, written out independently of the package."""
    return min(0.5 * c * dv * dv, c * c * dv * dv * r / t)


def test_column_drive_energy_100_columns():
    g = CellGrid(2, 100)
    s = UpdateSession(g, T, shadow=np.ones((2, 100)))
    s.drive_columns(0)
    assert s.trace.total(CHANNEL) == pytest.approx(100e-18, rel=1e-9)
    assert all(e.adiabatic for e in s.trace.events)
    assert s.stage is Stage.COLUMNS_DRIVEN


def test_empty_grid_advances():
    g = CellGrid(1, 0)
    s = UpdateSession(g, T)
    s.drive_columns(0)
    assert s.trace.total() == 0.0 and s.stage is Stage.COLUMNS_DRIVEN


def test_consistent_cycle_has_no_violations_and_restores_reference():
    g = CellGrid(3, 4)
    s = UpdateSession(g, T)
    s.drive_columns(1).assert_row()
    assert s.violation_count == 0
    on = g.access_state()
    assert on[1].all() and not on[[0, 2]].any()
    s.write_columns([1.0, 0.0, 1.0, 1.0]).release_row()
    assert g.verify_reference_state()
    assert s.consistent
    assert list(g.voltages[1]) == [1.0, 0.0, 1.0, 1.0]


def test_stale_cell_is_one_violation():
    g = CellGrid(1, 3)
    s = UpdateSession(g, T)
    s.shadow[0, 1] = 1.0  # controller wrongly believes the cell is high
    s.drive_columns(0).assert_row()
    assert s.violation_count == 1
    bad = [e for e in s.trace.events if not e.adiabatic]
    assert len(bad) == 1 and bad[0].joules == pytest.approx(0.5e-15, rel=1e-12)


def test_write_identical_values_costs_nothing_extra():
    g = CellGrid(1, 3)
    s = UpdateSession(g, T)
    s.drive_columns(0).assert_row()
    before = s.trace.total()
    s.write_columns([0.0, 0.0, 0.0])
    assert s.trace.total() == before


def test_flip_one_cell_is_one_adiabatic_cell_event():
    g = CellGrid(1, 3)
    s = UpdateSession(g, T)
    s.drive_columns(0).assert_row()
    n = len(s.trace.events)
    s.write_columns([0.0, 1.0, 0.0])
    cell_events = [e for e in s.trace.events[n:] if e.node.startswith("cell") and e.location == CHANNEL]
    assert len(cell_events) == 1
    assert cell_events[0].adiabatic
    assert cell_events[0].joules == pytest.approx(quad(1e-15, 1.0), rel=1e-12)


def test_analog_write_passes_through():
    g = CellGrid(1, 2, tap_kinds=[[TapKind.ANALOG, TapKind.DIGITAL]])
    s = UpdateSession(g, T)
    s.update_row(0, [0.35, 1.0])
    assert g.tap(0, 0) == 0.35


def test_out_of_range_rejected_before_mutation():
    g = CellGrid(1, 2, tap_kinds=[["analog", "digital"]])
    s = UpdateSession(g, T)
    s.drive_columns(0).assert_row()
    before = (g.voltages.copy(), s.shadow.copy(), len(s.trace.events))
    for vals in ([1.5, 0.0], [0.0, 0.5], [0.0]):
        with pytest.raises(ValueError):
            s.write_columns(vals)
    assert np.array_equal(g.voltages, before[0]) and np.array_equal(s.shadow, before[1])
    assert len(s.trace.events) == before[2]
    assert s.stage is Stage.ROW_ASSERTED


def test_stage_order_enforced():
    s = UpdateSession(CellGrid(1, 1), T)
    with pytest.raises(ProtocolError):
        s.assert_row()
    s.drive_columns(0).assert_row()
    with pytest.raises(ProtocolError):
        s.release_row()  # skipping the write
    with pytest.raises(ProtocolError):
        s.drive_columns(0)


def test_back_to_back_cycles_identical_ledgers():
    g = CellGrid(2, 5)
    s = UpdateSession(g, T)
    vals = [1.0, 0.0, 1.0, 0.0, 1.0]
    s.update_row(0, vals)
    snap = g.voltages.copy()
    cycles = []
    for _ in range(2):
        n = len(s.trace.events)
        s.update_row(0, vals)
        cycles.append([(e.node, e.location, e.joules, e.adiabatic) for e in s.trace.events[n:]])
        assert np.array_equal(g.voltages, snap)
    assert cycles[0] == cycles[1]
    assert [r.energy for r in s.transcript[4:8]] == [r.energy for r in s.transcript[8:12]]


def test_full_row_energy_matches_analytic_sum():
    g = CellGrid(2, 6, access_gate_capacitance=0.5e-15, column_capacitance=2e-15, tap_capacitance=0.25e-15)
    s = UpdateSession(g, T)
    old = [0.0] * 6
    new = [1.0, 0.0, 1.0, 1.0, 0.0, 1.0]
    s.update_row(1, new)
    row = 2 * quad(6 * 0.5e-15, 2.0)
    cols = sum(quad(2e-15, a - b) for a, b in zip(new, old)) * 2  # up to new, back to idle
    cells = sum(quad(1.25e-15, a - b) for a, b in zip(new, old))
    assert s.trace.total(CHANNEL) == pytest.approx(row + cols + cells, rel=0.01)


def test_swing_configuration_checked():
    with pytest.raises(ValueError):
        CellGrid(1, 1, v_row=(0.0, 1.2))
    with pytest.raises(ValueError):
        CellGrid(1, 1, v_row=(0.5, 2.0))


@settings(max_examples=30, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(1, 5),
    st.lists(st.tuples(st.integers(0, 3), st.lists(st.booleans(), min_size=5, max_size=5)), min_size=1, max_size=6),
)
def test_protocol_round_trip(rows, cols, updates):
    g = CellGrid(rows, cols)
    s = UpdateSession(g, T)
    for r, bits in updates:
        r %= rows
        s.update_row(r, [float(b) for b in bits[:cols]])
        assert g.verify_reference_state()
        assert s.consistent
    assert s.violation_count == 0
    assert all(e.adiabatic for e in s.trace.events)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.data())
def test_corrupted_shadow_gives_exactly_k_violations(cols, data):
    g = CellGrid(1, cols)
    s = UpdateSession(g, T)
    s.update_row(0, [1.0] * cols)
    k_cols = data.draw(st.sets(st.integers(0, cols - 1)))
    for c in k_cols:
        s.shadow[0, c] = 0.0
    n = len(s.trace.events)
    s.drive_columns(0).assert_row()
    bad = [e for e in s.trace.events[n:] if not e.adiabatic]
    assert len(bad) == len(k_cols) == s.violation_count
    assert all(e.joules == pytest.approx(0.5e-15) for e in bad)


# SRAM

P = TransistorProcess()


def test_sram_unchanged_value_power_cycle_only():
    cell = SramCell(1)
    u = sram_update(cell, 1, P, ClockSpec(1 / (4 * T)))
    assert not u.changed and u.switch == 0.0 and u.overpower == 0.0
    assert u.adiabatic == pytest.approx(2 * quad(1e-15, 1.0))
    assert cell.tap() == 1


def test_sram_ratio_at_1000_rc():
    u = sram_update(SramCell(0), 1, P, ClockSpec(1 / (4 * T)))
    assert u.adiabatic / u.overpower == pytest.approx(0.002, rel=1e-9)


@given(st.floats(2.01, 1e6))
def test_sram_adiabatic_below_overpower(k):
    t = k * P.rc
    u = sram_update(SramCell(0), 1, P, ClockSpec(1 / (4 * t)))
    assert u.adiabatic < u.overpower
    assert u.adiabatic / u.overpower == pytest.approx(min(1.0, 2 / k), rel=1e-9)


def test_sram_residual_adds_switch_energy():
    u = sram_update(SramCell(0, residual=0.1), 1, P, ClockSpec(1 / (4 * T)))
    assert u.switch == pytest.approx(2 * quad(1e-15, 0.1))
    assert u.power_down == pytest.approx(quad(1e-15, 0.9))


# conversion elements


def test_sfet_threshold_symmetric():
    m = SfetModel()
    assert sfet_output(0.0, m) == m.critical_current_nominal
    assert sfet_output(2.5, m) == m.critical_current_suppressed
    assert sfet_output(-3.0, m) == m.critical_current_suppressed
    with pytest.raises(ValueError):
        SfetModel(critical_current_suppressed=200e-6)


def test_sfq_divider():
    p = SfqPulse()
    on = sfq_transmit(p, True, 15.0)
    assert on.factor == 0.5
    assert on.pulse.amplitude == pytest.approx(0.5e-3)
    assert sfq_transmit(p, False, 15.0).blocked
    assert sfq_transmit(p, True, 0.0).factor == 1.0
    assert p.energy == pytest.approx(1e-6 / 15 * 2e-12)


@given(st.floats(0, 1e4), st.booleans(), st.floats(1e-5, 1e-2))
def test_sfq_energy_conserved(r_on, on, amp):
    t = sfq_transmit(SfqPulse(amplitude=amp), on, r_on)
    assert math.isclose(t.transmitted + t.dissipated, t.incident, rel_tol=1e-15)
    assert t.dissipated >= 0


def test_pass_gate():
    assert pass_gate(0.3, True) == 0.3
    assert pass_gate(0.3, False) is None
