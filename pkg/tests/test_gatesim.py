import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cryohybrid.device_models import ClockSpec, TransistorProcess, static_power
from cryohybrid.gatesim import (
    CHANNEL,
    RAIL_RETURN,
    Netlist,
    NetlistError,
    NetlistFault,
    Rail,
    adiabatic_band,
    build_and_gate,
    build_cmos_shift_register,
    build_shift_register,
    energy_sweep,
    fit_loglog_slope,
    log_frequencies,
    simulate,
)
from oracles import delay_line, power_law_slope, shift_register_cycle_energy

P = TransistorProcess()
CLK = ClockSpec(4e6)
BITS = [1, 0, 1, 1, 0, 0, 1, 0]


def waveform_energy(res, net):
    """1/2 C dV^2 summed over every recorded voltage step of every node."""
    caps = np.array([net.nodes[n].capacitance for n in res.waveform.node_names])
    dv = np.diff(res.waveform.voltages, axis=0)
    return float((0.5 * caps * dv**2).sum())


def output_bits(res, port, first_slot, n):
    got = dict(res.waveform.samples[port])
    return [got.get(first_slot + 4 * k) for k in range(n)]


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_shift_register_is_a_pure_delay(n):
    res = simulate(build_shift_register(n, P), CLK, {"in": BITS}, len(BITS) + n // 4 + 2)
    # an input bit is valid at slot 4c+1; stage n holds it n slots later
    slots = [4 * c + 1 + n for c in range(len(BITS))]
    got = dict(res.waveform.samples["out"])
    assert [got[s] for s in slots] == delay_line(BITS, 0)


def test_single_stage_one_phase_later():
    res = simulate(build_shift_register(1, P), CLK, {"in": [1]}, 2)
    assert res.waveform.valid("out") == [(2, 1)]


def test_eight_stages_delay_two_cycles():
    res = simulate(build_shift_register(8, P), CLK, {"in": BITS}, len(BITS) + 3)
    valid = res.waveform.valid("out")
    assert valid[0][0] == 1 + 8
    assert [b for _, b in valid] == BITS


@pytest.mark.parametrize("bit", [0, 1])
def test_loopback_rotates_with_period_four_phases(bit):
    res = simulate(build_shift_register(4, P, loopback=True), CLK, {"in": [bit]}, 6)
    valid = res.waveform.valid("out")
    assert [s for s, _ in valid] == [5, 9, 13, 17, 21]
    assert all(b == bit for _, b in valid)
    assert res.trace.non_adiabatic() == []


def test_loopback_needs_whole_cycles():
    with pytest.raises(ValueError):
        build_shift_register(3, P, loopback=True)
    with pytest.raises(ValueError):
        build_shift_register(0, P)


@pytest.mark.parametrize("a,b", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_and_truth_table(a, b):
    res = simulate(build_and_gate(P), CLK, {"a": [a] * 3, "b": [b] * 3}, 3)
    assert res.waveform.bits("y") == [a & b] * 3


def test_and_output_dc_for_zeros_ac_for_ones():
    zeros = simulate(build_and_gate(P), CLK, {"a": [0] * 4, "b": [0] * 4}, 4)
    assert np.all(zeros.waveform.node("y") == 0.0)
    ones = simulate(build_and_gate(P), CLK, {"a": [1] * 4, "b": [1] * 4}, 4)
    y = ones.waveform.node("y")
    assert y.max() == 1.0 and y.min() == 0.0
    # high and low once per cycle
    rises = int(np.sum(np.diff(y) > 0.5))
    assert rises == 4


def test_shift_register_energy_matches_analytic_sum():
    n_cycles = 14
    res = simulate(build_shift_register(8, P), CLK, {"in": [(c + 1) % 2 for c in range(n_cycles)]}, n_cycles)
    per_cycle = res.trace.per_cycle(n_cycles)[-4:]
    expected = shift_register_cycle_energy(8, P.capacitance, P.on_resistance, P.swing, CLK.frequency)
    assert np.allclose(per_cycle, expected, rtol=0.05)


def test_cmos_transition_is_half_cv2():
    res = simulate(build_cmos_shift_register(4, P), CLK, {"in": BITS}, 12)
    assert res.trace.events
    for e in res.trace.events:
        assert e.location == CHANNEL and not e.adiabatic
        assert e.joules == pytest.approx(0.5 * P.capacitance * P.swing**2, rel=1e-12)
    assert res.trace.total(RAIL_RETURN) == 0.0


def test_cmos_shift_register_delay():
    res = simulate(build_cmos_shift_register(4, P), CLK, {"in": BITS}, len(BITS) + 2)
    assert output_bits(res, "out", 8, len(BITS)) == BITS


def test_all_zero_cmos_dissipates_nothing():
    res = simulate(build_cmos_shift_register(4, P), CLK, {"in": [0] * 6}, 6)
    assert res.trace.total(CHANNEL) == 0.0


def test_all_zero_adiabatic_dissipates_only_complement_ramps():
    res = simulate(build_shift_register(4, P), CLK, {"in": [0] * 6}, 6)
    assert res.trace.non_adiabatic() == []
    assert all(e.node.endswith("_n") for e in res.trace.events)


def test_energy_conservation_against_waveform():
    for net, stim in [
        (build_shift_register(5, P), {"in": BITS}),
        (build_and_gate(P), {"a": [1, 0, 1, 1], "b": [1, 1, 0, 1]}),
        (build_cmos_shift_register(4, P), {"in": BITS}),
    ]:
        res = simulate(net, CLK, stim, 10)
        assert res.trace.total() == pytest.approx(waveform_energy(res, net), rel=1e-6)


def test_channel_share_tends_to_two_rc_over_t():
    t = 1000 * P.rc
    clk = ClockSpec(1.0 / (4 * t))
    res = simulate(build_shift_register(4, P), clk, {"in": [1, 0] * 4}, 8)
    share = res.trace.total(CHANNEL) / res.trace.total()
    assert share == pytest.approx(2 * P.rc / t, rel=0.05)


def test_output_independent_of_frequency():
    stim = {"in": BITS}
    ref = simulate(build_shift_register(6, P), CLK, stim, 12).waveform.samples["out"]
    for f in (1e3, 1e6, 1e9, 1e11):
        assert simulate(build_shift_register(6, P), ClockSpec(f), stim, 12).waveform.samples["out"] == ref


def test_halving_frequency_halves_energy():
    net = build_shift_register(4, P)
    stim = {"in": [1, 0] * 5}
    e1 = simulate(net, ClockSpec(40e6), stim, 10).trace.total(CHANNEL)
    e2 = simulate(net, ClockSpec(20e6), stim, 10).trace.total(CHANNEL)
    assert e2 / e1 == pytest.approx(0.5, rel=0.02)


def test_doubling_voltage_quadruples_energy():
    stim = {"in": [1, 0] * 5}
    for build in (lambda: build_shift_register(4, P), lambda: build_cmos_shift_register(4, P)):
        e1 = simulate(build(), ClockSpec(4e6, 0.0, 1.0), stim, 10).trace.total()
        e2 = simulate(build(), ClockSpec(4e6, 0.0, 2.0), stim, 10).trace.total()
        assert e2 == pytest.approx(4 * e1, rel=1e-12)


def test_shorted_rails_are_a_fault():
    net = Netlist("cmos")
    net.rails["vdd"] = Rail("high")
    net.rails["gnd"] = Rail("low")
    net.add_signal("x", 1e-15, dual_rail=False)
    net.inputs["en"] = "x"
    net.connect("x", "vdd", 1e3, ("en", True))
    net.connect("x", "gnd", 1e3, ("en", True))
    with pytest.raises(NetlistFault):
        simulate(net, CLK, {"en": [1]}, 1)


def test_validation_collects_problems():
    net = Netlist("2lal")
    net.add_signal("a", 0.0)
    net.connect("a", "nowhere", 1e3, ("ghost", True))
    with pytest.raises(NetlistError) as err:
        net.validate()
    msg = str(err.value)
    assert "capacitance" in msg and "nowhere" in msg and "ghost" in msg


def test_unknown_stimulus_port():
    with pytest.raises(NetlistError):
        simulate(build_shift_register(2, P), CLK, {"x": [1]}, 1)


def test_trace_csv_columns():
    res = simulate(build_shift_register(1, P), CLK, {"in": [1]}, 1)
    lines = res.trace.to_csv().splitlines()
    assert lines[0] == "time,event,location,joules,adiabatic_flag"
    assert len(lines) == len(res.trace.events) + 1


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([0, 1, None]), min_size=1, max_size=8), st.integers(1, 9))
def test_random_stimulus_delay_and_conservation(bits, n):
    net = build_shift_register(n, P)
    res = simulate(net, CLK, {"in": bits}, len(bits) + n // 4 + 2)
    got = dict(res.waveform.samples["out"])
    assert [got[4 * c + 1 + n] for c in range(len(bits))] == bits
    assert res.trace.total() == pytest.approx(waveform_energy(res, net), rel=1e-6)
    assert res.trace.non_adiabatic() == []


# sweep

FREQS = log_frequencies(1e3, 1e10, 5)


@pytest.fixture(scope="module")
def sweeps():
    return (
        energy_sweep(build_shift_register(8, P), P, FREQS),
        energy_sweep(build_cmos_shift_register(8, P), P, FREQS),
    )


def test_mid_band_slopes(sweeps):
    adiabatic, cmos = sweeps
    band = adiabatic_band(adiabatic, P)
    assert fit_loglog_slope(adiabatic, band) == pytest.approx(-2.0, abs=0.15)
    assert fit_loglog_slope(cmos, band) == pytest.approx(-1.0, abs=0.15)


def test_dynamic_slope_low_band(sweeps):
    adiabatic, _ = sweeps
    assert fit_loglog_slope(adiabatic, (1e4, 1e7), component="dynamic") == pytest.approx(-2.0, abs=0.15)


def test_low_frequency_floor_is_static(sweeps):
    adiabatic, cmos = sweeps
    floor = static_power(P, 0.5)
    assert adiabatic[0].power == pytest.approx(floor, rel=1e-3)
    assert adiabatic[0].power < adiabatic[-1].power


def test_sweep_matches_oracle_slopes(sweeps):
    adiabatic, _ = sweeps
    band = [pt for pt in adiabatic if 1e5 <= pt.frequency <= 1e8]
    assert power_law_slope([pt.period for pt in band], [pt.dynamic for pt in band]) == pytest.approx(-2.0, abs=1e-6)


def test_sweep_input_checks():
    net = build_shift_register(1, P)
    with pytest.raises(ValueError):
        energy_sweep(net, P, [2e6, 1e6])
    with pytest.raises(ValueError):
        energy_sweep(net, P, [0.0, 1e6])


def test_fit_synthetic_power_laws():
    ts = [1e-9, 1e-8, 1e-7, 1e-6]
    assert fit_loglog_slope([(1 / t, t**2) for t in ts], (1e5, 1e10)) == pytest.approx(2.0, abs=1e-9)
    assert fit_loglog_slope([(1 / t, t) for t in ts], (1e5, 1e10)) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        fit_loglog_slope([(1 / t, t) for t in ts], (1e8, 1e10))
