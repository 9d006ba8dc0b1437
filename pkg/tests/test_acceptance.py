"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single PASS/FAIL line; the lines are also gathered
into an "acceptance criteria" section of the pytest summary.
Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import csv
import itertools
import math
import time

import numpy as np
import pytest

from cryohybrid.cli import main
from cryohybrid.commands import COMMANDS, run_command
from cryohybrid.control import CellGrid, UpdateSession
from cryohybrid.device_models import ClockSpec, ThermalStage, TransistorProcess, ramp_energy, refrigeration_multiplier, static_power
from cryohybrid.fpga import (ClbFunction, ConfigBuffer, Fabric, SequencePlan, clb_outputs, configure, evaluate,
                             ripple_adder_2bit, run_sequence)
from cryohybrid.gatesim import CHANNEL, build_shift_register, simulate
from cryohybrid.scenario import load_scenario
from cryohybrid.stream import StorePlan, build_chain, load_store, run_pipeline

from oracles import carnot_multiplier, power_law_slope, rc_ramp_dissipation, shift_register_cycle_energy

RESULTS = {}


def report(n, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  AC{n:<2} {title}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def read_csv_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(ln for ln in fh if not ln.startswith("#")))


def test_ac01_schedule_reproduction(tmp_path):
    t0 = time.perf_counter()
    code = main(["plan", "table1", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    rows = read_csv_rows(tmp_path / "plan.csv")
    # (gate count, clock, dynamic power, static power) of the published schedule
    expected = {
        ("Baseline", "RQL"): (1e6, 1.6e9, 160e-6, None),
        ("Baseline", "CMOS"): (1e3, 4e9, 160e-6, None),
        ("Scaling Step 1", "CATC"): (1e4, 400e6, 160e-6, 16.7e-9),
        ("Scaling Step 2", "CATC"): (1e6, 40e6, 160e-6, 1.67e-6),
        ("Scaling Step 3", "CATC"): (1e8, 4e6, 160e-6, 167e-6),
    }
    got = {(r["section"], r["technology"]): r for r in rows}
    worst = 0.0
    ok = code == 0 and set(expected) <= set(got)
    for key, cells in expected.items():
        if key not in got:
            continue
        r = got[key]
        measured = (float(r["gate_count"]), float(r["clock_hz"]), float(r["dynamic_power_w"]),
                    None if r["static_power_w"] == "n/a" else float(r["static_power_w"]))
        for want, have in zip(cells, measured):
            if want is None:
                ok &= have is None
            else:
                err = abs(have - want) / want
                worst = max(worst, err)
                ok &= err <= 0.01
    ok &= elapsed < 1.0
    report(1, "Scaling schedule reproduction", ok, f"worst cell error {worst:.3%}, runtime {elapsed:.3f} s")


def test_ac02_power_frequency_shape():
    s = load_scenario("table1")
    assert (s.sweep.f_min, s.sweep.f_max) == (1e3, 1e9)
    t0 = time.perf_counter()
    art = run_command(s, "sweep")
    elapsed = time.perf_counter() - t0
    lo, hi = art.summary_value("band_lo_hz"), art.summary_value("band_hi_hz")
    rows = art.tables[0].rows
    curve = {tech: [(r[0], r[4]) for r in rows if r[1] == tech] for tech in ("2LAL", "CMOS")}
    band = {tech: [(f, pw) for f, pw in c if lo <= f <= hi] for tech, c in curve.items()}
    # independent least-squares fit against clock period
    slope_a = power_law_slope([1 / f for f, _ in band["2LAL"]], [pw for _, pw in band["2LAL"]])
    slope_c = power_law_slope([1 / f for f, _ in band["CMOS"]], [pw for _, pw in band["CMOS"]])
    floor = curve["2LAL"][0][1]
    static = static_power(s.process, s.sweep.duty)
    ratio = max(c[1] / a[1] for a, c in zip(curve["2LAL"], curve["CMOS"]))
    ok = (
        abs(slope_a + 2) <= 0.15
        and abs(art.summary_value("adiabatic_slope") + 2) <= 0.15
        and abs(slope_c + 1) <= 0.1
        and abs(art.summary_value("cmos_slope") + 1) <= 0.1
        and abs(floor - static) / static <= 0.05
        and ratio >= 100
        and elapsed < 30
    )
    report(2, "Power versus frequency shape", ok,
           f"band {lo:.3g}-{hi:.3g} Hz, 2LAL slope {slope_a:.3f}, CMOS slope {slope_c:.3f}, "
           f"floor/static {floor / static:.4f}, max ratio {ratio:.0f}, runtime {elapsed:.2f} s")


def test_ac03_adiabatic_formula_oracle():
    c, r, v = 1e-15, 3e3, 1.0
    rc = r * c
    errs = {}
    for k in (100, 1000):
        numeric = rc_ramp_dissipation(c, r, v, k * rc)
        errs[k] = (numeric - ramp_energy(c, r, v, k * rc)) / ramp_energy(c, r, v, k * rc)
    fraction = rc_ramp_dissipation(c, r, v, 1000 * rc) / (0.5 * c * v * v)
    ok = all(abs(e) <= 0.01 for e in errs.values()) and abs(fraction - 0.002) <= 0.01 * 0.002
    report(3, "Adiabatic formula oracle", ok,
           f"deviation {errs[100]:+.6%} at 100RC, {errs[1000]:+.6%} at 1000RC; "
           f"1000RC energy {fraction:.5%} of CV^2/2 ({1 - fraction:.2%} reduction)")


def test_ac04_refrigeration_anchors():
    m4 = refrigeration_multiplier(ThermalStage(4.0, 0.075))
    m15 = refrigeration_multiplier(ThermalStage(0.015, 0.02))
    ideal = refrigeration_multiplier(ThermalStage(4.0, 1.0))
    ok = (
        abs(m4 - 1000) <= 10
        and abs(m15 - 1e6) <= 1e4
        and ideal == 75.0
        and m4 == pytest.approx(carnot_multiplier(4.0, 0.075), rel=1e-12)
        and m15 == pytest.approx(carnot_multiplier(0.015, 0.02), rel=1e-12)
    )
    report(4, "Refrigeration anchors", ok, f"4 K {m4:.6g}x, 15 mK {m15:.6g}x, ideal 4 K {ideal!r}x")


def test_ac05_pipeline():
    t0 = time.perf_counter()
    plan = StorePlan(word_width=2000, depth=500, clock=4e6)
    stages = build_chain(plan, [10, 10])
    rng = np.random.default_rng(2024)
    words = rng.integers(0, 2, (500, 2000), dtype=np.uint8)
    stream, rep = run_pipeline(load_store(plan, words), stages, 500 * 100)
    elapsed = time.perf_counter() - t0
    shape = [(b.width, b.clock) for b in rep.boundaries]
    exact_bw = all(b.measured_bandwidth == 8_000_000_000 for b in rep.boundaries)
    bit_exact = stream.size >= 1_000_000 and np.array_equal(stream, words.reshape(-1))
    ok = shape == [(2000, 4e6), (200, 40e6), (20, 400e6)] and exact_bw and bit_exact and elapsed < 10
    bws = ", ".join(f"{b.name} {float(b.measured_bandwidth):.6g}" for b in rep.boundaries)
    report(5, "Pipeline", ok, f"bit/s {bws}; {stream.size} bits bit-exact={bit_exact}; runtime {elapsed:.2f} s")


def test_ac06_protocol_properties():
    rng = np.random.default_rng(6)
    updates = 0
    nonadiabatic = 0
    reference = True
    while updates < 1000:
        g = CellGrid(int(rng.integers(1, 9)), int(rng.integers(1, 17)),
                     cell_capacitance=float(rng.uniform(0.5e-15, 5e-15)),
                     column_capacitance=float(rng.uniform(0.5e-15, 5e-15)))
        s = UpdateSession(g, 3e-9)
        for _ in range(50):
            row = int(rng.integers(g.rows))
            s.update_row(row, np.where(rng.integers(0, 2, g.cols) == 1, 1.0, 0.0))
            updates += 1
        nonadiabatic += len(s.trace.non_adiabatic())
        reference &= g.verify_reference_state() and s.consistent
    clean = nonadiabatic == 0 and reference

    corrupt_ok = True
    checked = 0
    for trial in range(50):
        cols = int(rng.integers(1, 17))
        c_cell = float(rng.uniform(0.5e-15, 5e-15))
        g = CellGrid(3, cols, cell_capacitance=c_cell)
        s = UpdateSession(g, 3e-9)
        row = int(rng.integers(3))
        s.update_row(row, np.where(rng.integers(0, 2, cols) == 1, 1.0, 0.0))
        k = int(rng.integers(0, cols + 1))
        picked = rng.choice(cols, k, replace=False)
        for col in picked:
            s.shadow[row, col] = 1.0 - s.shadow[row, col]
        expected = sorted(0.5 * c_cell * (g.voltages[row, col] - s.shadow[row, col]) ** 2 for col in picked)
        n = len(s.trace.events)
        s.drive_columns(row).assert_row()
        bad = sorted(e.joules for e in s.trace.events[n:] if not e.adiabatic)
        corrupt_ok &= len(bad) == k and np.allclose(bad, expected, rtol=1e-12, atol=0)
        checked += k
    ok = clean and corrupt_ok
    report(6, "Protocol properties", ok,
           f"{updates} clean updates -> {nonadiabatic} non-adiabatic events, reference state {reference}; "
           f"{checked} corrupted entries -> matching CV^2/2 events {corrupt_ok}")


def _default_buffer(rotation_clock):
    fab = Fabric(3, 3)
    adder = ripple_adder_2bit().bits
    buf = ConfigBuffer(fab.config_length, rotation_clock=rotation_clock)
    buf.load([fab.encode({}, {}), adder, adder, fab.encode({}, {})])
    return fab, buf


def test_ac07_controller_timing():
    plan = SequencePlan.with_defaults(calibration=2e-6, readout=1e-6)
    fab, buf = _default_buffer(4e6)
    rep = run_sequence(plan, buf, fab)
    fab, slow = _default_buffer(4e3)
    slow_rep = run_sequence(plan, slow, fab)
    ok = (
        rep.rotation_time == 250e-9
        and math.isclose(rep.overhead, 750e-9, rel_tol=1e-12)
        and rep.mutual_exclusion_ok
        and rep.passed
        and rep.budget == 100e-6
        and not slow_rep.passed
        and slow_rep.violations
    )
    report(7, "Controller timing", ok,
           f"rotation {rep.rotation_time * 1e9:.6g} ns, overhead {rep.overhead * 1e9:.6g} ns, "
           f"mutual exclusion {rep.mutual_exclusion_ok}, passed {rep.passed}; "
           f"4 kHz variant flagged: {not slow_rep.passed}")


def test_ac08_fabric_correctness():
    truth = {
        ClbFunction.AND: lambda a, b: (a and b, a and b),
        ClbFunction.OR: lambda a, b: (a or b, a or b),
        ClbFunction.NOT: lambda a, b: (not a, not b),
        ClbFunction.HALF_ADDER: lambda a, b: (a != b, a and b),
    }
    tables_ok = all(
        clb_outputs(fn, a, b) == tuple(int(x) for x in ref(a, b))
        for fn, ref in truth.items()
        for a, b in itertools.product((0, 1), repeat=2)
    )
    layout = ripple_adder_2bit()
    cf = configure(layout.fabric, layout.bits)
    adder_ok = all(layout.unpack(evaluate(cf, layout.pack(a, b))) == a + b for a in range(4) for b in range(4))

    fab, buf = _default_buffer(4e6)
    buf.set_mode("run")
    buf.rotate()  # expose the adder
    before = [evaluate(configure(fab, buf.exposed_config), layout.pack(a, b)) for a in range(4) for b in range(4)]
    for _ in range(4):
        buf.rotate()
    after = [evaluate(configure(fab, buf.exposed_config), layout.pack(a, b)) for a in range(4) for b in range(4)]
    round_trip = before == after and buf.exposed_label == "initialization"
    ok = tables_ok and adder_ok and round_trip
    report(8, "Fabric correctness", ok,
           f"CLB truth tables {tables_ok}, adder 16/16 {adder_ok}, rotate x4 invariant {round_trip}")


def test_ac09_gatesim_analytic_agreement():
    p = TransistorProcess()
    n_cycles = 14
    stim = {"in": [(c + 1) % 2 for c in range(n_cycles)]}
    worst = 0.0
    waves = []
    for f in (4e3, 40e3, 400e3, 4e6):
        res = simulate(build_shift_register(8, p), ClockSpec(f, 0.0, p.swing), stim, n_cycles)
        per_cycle = res.trace.per_cycle(n_cycles, CHANNEL)[-4:]
        analytic = shift_register_cycle_energy(8, p.capacitance, p.on_resistance, p.swing, f)
        worst = max(worst, float(np.max(np.abs(per_cycle - analytic) / analytic)))
        waves.append(res.waveform.samples)
    identical = all(w == waves[0] for w in waves)
    ok = worst <= 0.05 and identical
    report(9, "Gate-sim/analytic agreement", ok,
           f"worst per-cycle error {worst:.4%} over 4 kHz-4 MHz, waveforms identical {identical}")


def test_ac10_determinism(tmp_path):
    codes = []
    for run in ("a", "b"):
        for cmd in COMMANDS:
            codes.append(main([cmd, "table1", "--out", str(tmp_path / run)]))
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = names == sorted(p.name for p in (tmp_path / "b").iterdir()) and all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names
    )
    ok = same and set(codes) == {0}
    report(10, "Determinism", ok, f"{len(names)} CSV artifacts from {len(COMMANDS)} commands byte-identical: {same}")
