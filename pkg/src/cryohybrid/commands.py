"""Subcommands: each turns a Scenario into tables, a summary and violations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .device_models import (
    DEFAULT_EFFICIENCY,
    ClockSpec,
    refrigeration_multiplier,
    static_power,
    wall_plug_power,
)
from .scaling import ScalingPolicy, baseline, leakage_floor_step, plan
from .scenario import MissingSection, Scenario
from .units import format_count, format_eng

COMMANDS = ("plan", "sweep", "fridge", "grid", "pipeline", "controller", "simulate")

# checks that cannot be decided from the scenario alone
RUNTIME_CHECKED = (
    "fabric combinational loops (controller)",
    "decoherence budget (controller)",
    "shadow-copy consistency (grid)",
    "bandwidth and bit-exact reassembly (pipeline)",
    "rail short circuits and non-adiabatic events (simulate)",
)


class UnknownCommand(ValueError):
    pass


@dataclass
class Table:
    name: str
    columns: List[str]
    rows: List[List[Any]]
    text_format: Dict[str, Callable[[Any], str]] = field(default_factory=dict)


@dataclass
class Artifacts:
    command: str
    scenario: str
    metadata: List[Tuple[str, Any]]
    tables: List[Table]
    summary: List[Tuple[str, Any]]
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary_value(self, key: str):
        return dict(self.summary)[key]


def _metadata(s: Scenario, command: str) -> List[Tuple[str, Any]]:
    policy = s.policy or ScalingPolicy()
    meta: List[Tuple[str, Any]] = [
        ("tool", f"cryohybrid {__version__}"),
        ("command", command),
        ("scenario", s.name),
    ]
    for t, eta in DEFAULT_EFFICIENCY.items():
        meta.append((f"eta_default_{format_eng(t, 'K').replace(' ', '')}", eta))
    meta.append(("eta_default_other", 1.0))
    meta.append(("sfq_attenuation", "Z0/(Z0+R_on)"))
    meta.append(("complexity_factor", policy.complexity_factor))
    meta.append(("leakage_basis", policy.leakage_basis()))
    meta.append(("runtime_checked", "; ".join(RUNTIME_CHECKED)))
    return meta


def run_plan(s: Scenario) -> Artifacts:
    s.require("process")
    pts = s.require("device_points")
    policy = s.require("policy")
    for name in ("rql", "cmos"):
        if name not in pts:
            raise MissingSection(f"scenario {s.name!r} has no [devices.{name}] entry")
    if "rql" not in s.gate_counts:
        raise MissingSection("[devices.rql] needs gate_count to size the baseline")
    base = baseline(s.gate_counts["rql"], pts["rql"], pts["cmos"], s.process)
    sched = plan(policy, base, s.process)
    rows = []
    for section, st in sched.rows:
        rows.append([section, st.technology.value, st.gate_count, st.clock_rate, st.dynamic_power,
                     st.static_power, st.area_estimate])
    fmt = {
        "gate_count": format_count,
        "clock_hz": lambda v: format_eng(v, "Hz"),
        "dynamic_power_w": lambda v: format_eng(v, "W"),
        "static_power_w": lambda v: "n/a" if v is None else format_eng(v, "W"),
        "area_units": lambda v: format_count(round(v)),
    }
    table = Table("schedule", ["section", "technology", "gate_count", "clock_hz", "dynamic_power_w",
                               "static_power_w", "area_units"], rows, fmt)
    summary = [
        ("steps", len(sched.steps)),
        ("stop_reason", sched.stop_reason.value),
        ("leakage_floor_step", leakage_floor_step(policy, base, s.process)),
        ("static_power_per_gate_w", static_power(s.process, policy.duty)),
    ]
    return Artifacts("plan", s.name, _metadata(s, "plan"), [table], summary)


def run_sweep(s: Scenario) -> Artifacts:
    from .gatesim import (adiabatic_band, build_cmos_shift_register, build_shift_register, energy_sweep,
                          fit_loglog_slope, log_frequencies)

    p = s.require("process")
    cfg = s.require("sweep")
    freqs = log_frequencies(cfg.f_min, cfg.f_max, cfg.points_per_decade)
    curves = {
        "2LAL": energy_sweep(build_shift_register(cfg.stages, p), p, freqs, cfg.duty),
        "CMOS": energy_sweep(build_cmos_shift_register(cfg.stages, p), p, freqs, cfg.duty),
    }
    rows = []
    for i, f in enumerate(freqs):
        for tech, curve in curves.items():
            pt = curve[i]
            rows.append([f, tech, pt.dynamic, pt.static, pt.power, pt.energy_per_cycle])
    table = Table("curves", ["frequency_hz", "technology", "dynamic_w", "static_w", "power_w", "energy_per_cycle_j"],
                  rows)
    summary: List[Tuple[str, Any]] = [("stages", cfg.stages), ("points", len(freqs))]
    violations = []
    try:
        band = adiabatic_band(curves["2LAL"], p)
        summary += [
            ("band_lo_hz", band[0]),
            ("band_hi_hz", band[1]),
            ("adiabatic_slope", fit_loglog_slope(curves["2LAL"], band)),
            ("cmos_slope", fit_loglog_slope(curves["CMOS"], band)),
        ]
    except ValueError as e:
        summary.append(("band", f"unavailable: {e}"))
    ratios = [c.power / a.power for a, c in zip(curves["2LAL"], curves["CMOS"])]
    k = int(np.argmax(ratios))
    summary += [
        ("floor_w", curves["2LAL"][0].power),
        ("static_power_w", static_power(p, cfg.duty)),
        ("max_ratio", ratios[k]),
        ("max_ratio_hz", freqs[k]),
    ]
    return Artifacts("sweep", s.name, _metadata(s, "sweep"), [table], summary, violations)


def run_fridge(s: Scenario) -> Artifacts:
    stages = s.require("stages")
    rows = []
    for st, defaulted in zip(stages, s.efficiency_defaulted):
        m = refrigeration_multiplier(st)
        rows.append([st.name, st.temperature, st.efficiency, "default" if defaulted else "scenario", st.heat_load, m,
                     st.heat_load * m])
    fmt = {
        "temperature_k": lambda v: format_eng(v, "K"),
        "heat_load_w": lambda v: format_eng(v, "W"),
        "multiplier": lambda v: f"{v:,.4g}",
        "wall_plug_w": lambda v: format_eng(v, "W"),
    }
    table = Table("stages", ["stage", "temperature_k", "efficiency", "efficiency_source", "heat_load_w",
                             "multiplier", "wall_plug_w"], rows, fmt)
    total = wall_plug_power(stages)
    summary = [("total_heat_load_w", sum(st.heat_load for st in stages)), ("total_wall_plug_w", total)]
    return Artifacts("fridge", s.name, _metadata(s, "fridge"), [table], summary)


def run_grid(s: Scenario) -> Artifacts:
    from .control.grid import CellGrid, UpdateSession

    cfg = s.require("grid")
    g = CellGrid(cfg.rows, cfg.cols, **cfg.grid_kwargs)
    rng = np.random.default_rng(cfg.data_seed)
    session = UpdateSession(g, cfg.ramp_time)
    lo, hi = g.v_data
    rows = []
    for u in range(cfg.updates):
        row = int(rng.integers(g.rows))
        values = np.where(rng.integers(0, 2, g.cols) == 1, hi, lo)
        if u == 0 and cfg.corrupt:
            for c in rng.choice(g.cols, cfg.corrupt, replace=False):
                session.shadow[row, c] = hi if session.shadow[row, c] == lo else lo
        start = len(session.transcript)
        session.update_row(row, values)
        for rec in session.transcript[start:]:
            rows.append([u, rec.step, rec.row, rec.energy, rec.violations])
    transcript = Table("transcript", ["update", "step", "row", "energy_j", "violations"], rows)
    events = Table("trace", ["time", "event", "location", "joules", "adiabatic_flag"],
                   [[e.time, e.node, e.location, e.joules, int(e.adiabatic)] for e in session.trace.events])
    nonadiabatic = session.trace.non_adiabatic()
    reference = g.verify_reference_state()
    summary = [
        ("updates", cfg.updates),
        ("non_adiabatic_events", len(nonadiabatic)),
        ("non_adiabatic_joules", sum(e.joules for e in nonadiabatic)),
        ("violations", session.violation_count),
        ("reference_state", reference),
        ("total_joules", session.trace.total()),
    ]
    violations = []
    if session.violation_count:
        violations.append(f"{session.violation_count} stale shadow entries caused non-adiabatic charge sharing")
    if not reference:
        violations.append("grid did not return to its reference state")
    return Artifacts("grid", s.name, _metadata(s, "grid"), [transcript, events], summary, violations)


def run_pipeline_command(s: Scenario) -> Artifacts:
    from .stream.pipeline import StorePlan, build_chain, load_store, run_pipeline

    cfg = s.require("pipeline")
    sp = StorePlan(cfg.word_width, cfg.depth, cfg.clock, cfg.loopback)
    stages = build_chain(sp, cfg.ratios)
    fanout = math.prod(cfg.ratios)
    ticks = cfg.output_ticks or cfg.depth * fanout
    rng = np.random.default_rng(cfg.payload_seed)
    words = rng.integers(0, 2, (cfg.depth, cfg.word_width), dtype=np.uint8)
    store = load_store(sp, words)
    if ticks > cfg.depth * fanout and not cfg.loopback:
        raise MissingSection(f"pipeline.output_ticks {ticks} exceeds the {cfg.depth * fanout} ticks a non-looped store holds")
    stream, rep = run_pipeline(store, stages, ticks)
    n_words = -(-ticks // fanout)
    expected = words[np.arange(n_words) % cfg.depth].reshape(-1)[: stream.size]
    bit_exact = bool(np.array_equal(stream, expected))
    rows = [[b.name, b.width, b.clock, b.nominal_bandwidth, float(b.measured_bandwidth), b.gate_ops]
            for b in rep.boundaries]
    table = Table("boundaries", ["boundary", "width_bits", "clock_hz", "nominal_bit_s", "measured_bit_s", "gate_ops"],
                  rows, {"clock_hz": lambda v: format_eng(v, "Hz"), "nominal_bit_s": lambda v: format_eng(v, "b/s"),
                         "measured_bit_s": lambda v: format_eng(v, "b/s")})
    mismatched = [b.name for b in rep.boundaries if b.measured_bandwidth != b.nominal_bandwidth]
    summary = [
        ("bits_streamed", int(stream.size)),
        ("bit_exact", bit_exact),
        ("latency_s", float(rep.latency)),
        ("latency_bound_s", float(rep.latency_bound)),
        ("latency_within_bound", rep.latency_within_bound),
        ("receivers", rep.receivers),
        ("receivers_without_mux", rep.receivers_without_mux),
        ("duration_s", float(rep.duration)),
    ]
    violations = []
    if not bit_exact:
        violations.append("output stream does not reassemble the stored payload")
    if not rep.latency_within_bound:
        violations.append("latency exceeds its bound")
    if mismatched:
        violations.append(f"measured bandwidth differs from nominal at {', '.join(mismatched)}")
    return Artifacts("pipeline", s.name, _metadata(s, "pipeline"), [table], summary, violations)


def run_controller(s: Scenario) -> Artifacts:
    from .fpga.buffer import DEFAULT_MODES, ConfigBuffer
    from .fpga.fabric import Fabric
    from .fpga.sequence import RUN, SequencePlan, run_sequence
    from .stream.microwave import FeedbackChannel, FeedbackEvent

    cfg = s.require("controller")
    fabric = Fabric(cfg.rows, cfg.cols)
    buf = ConfigBuffer(fabric.config_length, cfg.rotation_clock, cfg.load_clock)
    load_time = buf.load(cfg.bits, DEFAULT_MODES)
    for label, bits in cfg.spare_bits.items():
        buf.add_spare(label, bits)
    seq = SequencePlan(cfg.durations, rql_clock=cfg.rql_clock, decoherence_budget=cfg.budget, branches=cfg.branches)
    channel = FeedbackChannel()
    for t, target in cfg.events:
        channel.inject(FeedbackEvent(t, target=target))
    rep = run_sequence(seq, buf, fabric, channel if cfg.events else None)
    rows = [[iv.event, iv.mode, iv.start, iv.duration, round(iv.duration * rep.rql_clock) if iv.event == RUN else 0,
             iv.note] for iv in rep.timeline]
    table = Table("timeline", ["event", "mode", "start_s", "duration_s", "rql_cycles", "note"], rows,
                  {"start_s": lambda v: format_eng(v, "s"), "duration_s": lambda v: format_eng(v, "s")})
    summary = [
        ("config_bits", fabric.config_length),
        ("load_time_s", load_time),
        ("rotation_time_s", rep.rotation_time),
        ("rotations", rep.rotations),
        ("overhead_s", rep.overhead),
        ("budget_s", rep.budget),
        ("mutual_exclusion", rep.mutual_exclusion_ok),
        ("passed", rep.passed),
    ]
    violations = list(rep.violations) + list(rep.config_errors)
    if not rep.mutual_exclusion_ok:
        violations.append("a buffer rotation overlaps a superconducting run")
    return Artifacts("controller", s.name, _metadata(s, "controller"), [table], summary, violations)


def run_simulate(s: Scenario) -> Artifacts:
    from .gatesim import (ADIABATIC, CHANNEL, NetlistFault, alternating_stimulus, build_and_gate,
                          build_cmos_shift_register, build_shift_register, simulate)

    p = s.require("process")
    cfg = s.require("simulate")
    if cfg.circuit == "shift_register":
        net = build_shift_register(cfg.stages, p, cfg.loopback)
    elif cfg.circuit == "and_gate":
        net = build_and_gate(p)
    else:
        net = build_cmos_shift_register(cfg.stages, p)
    stim = dict(alternating_stimulus(net, cfg.cycles))
    unknown = sorted(set(cfg.stimulus) - set(net.inputs))
    if unknown:
        raise MissingSection(f"simulate.stimulus names ports {unknown} not on the {cfg.circuit} (ports {sorted(net.inputs)})")
    for port, seq in cfg.stimulus.items():
        stim[port] = list(seq) + [None] * max(0, cfg.cycles - len(seq))
    clock = ClockSpec(cfg.frequency, 0.0, p.swing)
    violations = []
    try:
        res = simulate(net, clock, stim, cfg.cycles)
    except NetlistFault as e:
        return Artifacts("simulate", s.name, _metadata(s, "simulate"), [], [("fault", str(e))], [str(e)])
    samples = []
    for port in sorted(res.waveform.samples):
        for slot, v in res.waveform.samples[port]:
            samples.append([port, slot, "" if v is None else v])
    waves = Table("samples", ["port", "slot", "value"], samples)
    trace = Table("trace", ["time", "event", "location", "joules", "adiabatic_flag"],
                  [[e.time, e.node, e.location, e.joules, int(e.adiabatic)] for e in res.trace.events])
    per_cycle = res.trace.per_cycle(cfg.cycles, CHANNEL)
    nonadiabatic = res.trace.non_adiabatic()
    summary = [
        ("circuit", cfg.circuit),
        ("frequency_hz", cfg.frequency),
        ("cycles", cfg.cycles),
        ("gate_count", net.gate_count),
        ("channel_joules", res.trace.total(CHANNEL)),
        ("channel_joules_last_cycle", float(per_cycle[-1])),
        ("non_adiabatic_events", len(nonadiabatic)),
    ]
    if net.family == ADIABATIC and nonadiabatic:
        violations.append(f"{len(nonadiabatic)} non-adiabatic events in an adiabatic circuit")
    return Artifacts("simulate", s.name, _metadata(s, "simulate"), [waves, trace], summary, violations)


_RUNNERS = {
    "plan": run_plan,
    "sweep": run_sweep,
    "fridge": run_fridge,
    "grid": run_grid,
    "pipeline": run_pipeline_command,
    "controller": run_controller,
    "simulate": run_simulate,
}


def run_command(scenario: Scenario, command: str) -> Artifacts:
    try:
        runner = _RUNNERS[command]
    except KeyError:
        raise UnknownCommand(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}") from None
    return runner(scenario)
