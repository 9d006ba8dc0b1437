"""Scenario files: one TOML document describing every experiment.

Physical quantities are strings with explicit units ("1 fF", "3 kohm",
"160 uW"); dimensionless numbers are plain TOML numbers. Parsing collects
every problem it finds and raises them together.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .device_models import DevicePoint, ThermalStage, TransistorProcess, default_efficiency
from .scaling import ScalingPolicy
from .units import UnitError, parse_quantity

_MISSING = object()
CIRCUITS = ("shift_register", "and_gate", "cmos_shift_register")


class ScenarioError(ValueError):
    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


class MissingSection(KeyError):
    pass


@dataclass
class SweepConfig:
    f_min: float
    f_max: float
    points_per_decade: int = 5
    stages: int = 8
    duty: float = 0.5


@dataclass
class SimulateConfig:
    circuit: str
    stages: int
    frequency: float
    cycles: int
    stimulus: Dict[str, List[Optional[int]]]
    loopback: bool = False


@dataclass
class GridConfig:
    rows: int
    cols: int
    ramp_time: float
    updates: int
    data_seed: int
    corrupt: int
    grid_kwargs: Dict[str, Any]


@dataclass
class PipelineConfig:
    word_width: int
    depth: int
    clock: float
    ratios: List[int]
    loopback: bool
    payload_seed: int
    output_ticks: Optional[int]


@dataclass
class ControllerConfig:
    rows: int
    cols: int
    configs: List[str]
    rotation_clock: float
    load_clock: float
    rql_clock: float
    budget: float
    durations: Dict[str, float]
    branches: Dict[str, str]
    events: List[Tuple[float, Optional[str]]]
    spares: Dict[str, str]
    bits: List[Tuple[int, ...]] = field(default_factory=list)
    spare_bits: Dict[str, Tuple[int, ...]] = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    process: TransistorProcess
    device_points: Dict[str, DevicePoint] = field(default_factory=dict)
    gate_counts: Dict[str, int] = field(default_factory=dict)
    stages: List[ThermalStage] = field(default_factory=list)
    efficiency_defaulted: List[bool] = field(default_factory=list)
    policy: Optional[ScalingPolicy] = None
    sweep: Optional[SweepConfig] = None
    simulate: Optional[SimulateConfig] = None
    grid: Optional[GridConfig] = None
    pipeline: Optional[PipelineConfig] = None
    controller: Optional[ControllerConfig] = None
    outputs: Dict[str, str] = field(default_factory=dict)

    def require(self, section: str):
        value = getattr(self, section, None)
        if value in (None, [], {}):
            label = {"device_points": "devices"}.get(section, section)
            raise MissingSection(f"scenario {self.name!r} has no [{label}] section")
        return value


class _Reader:
    def __init__(self):
        self.errors: List[str] = []

    def err(self, path: str, msg: str):
        self.errors.append(f"{path}: {msg}")

    def table(self, doc: dict, key: str, path: str = "") -> Optional[dict]:
        v = doc.get(key)
        if v is None:
            return None
        if not isinstance(v, dict):
            self.err(path + key, "expected a table")
            return None
        return v

    def quantity(self, sec: dict, key: str, unit: str, path: str, default=_MISSING, positive=False, nonneg=False):
        where = f"{path}.{key}"
        if key not in sec:
            if default is _MISSING:
                self.err(where, f"required quantity ({unit}) is missing")
                return None
            return default
        try:
            v = parse_quantity(sec[key], unit)
        except UnitError as e:
            self.err(where, str(e))
            return None
        if positive and not v > 0:
            self.err(where, f"must be > 0, got {sec[key]!r}")
        if nonneg and v < 0:
            self.err(where, f"must be >= 0, got {sec[key]!r}")
        return v

    def number(self, sec: dict, key: str, path: str, default=_MISSING, integer=False, lo=None, hi=None):
        where = f"{path}.{key}"
        if key not in sec:
            if default is _MISSING:
                self.err(where, "required value is missing")
                return None
            return default
        v = sec[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.err(where, f"expected a number, got {v!r}")
            return None
        if integer and not (isinstance(v, int) or float(v).is_integer()):
            self.err(where, f"expected an integer, got {v!r}")
            return None
        if integer:
            v = int(v)
        if lo is not None and v < lo:
            self.err(where, f"must be >= {lo}, got {v!r}")
        if hi is not None and v > hi:
            self.err(where, f"must be <= {hi}, got {v!r}")
        return v

    def build(self, where: str, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except (ValueError, TypeError) as e:
            self.err(where, str(e))
            return None


def _unknown_keys(r: _Reader, sec: dict, allowed, path: str):
    for k in sec:
        if k not in allowed:
            r.err(f"{path}.{k}", "unknown key")


def _resolve_config(r: _Reader, fabric, ref, where: str):
    """Bits for a named layout ("adder", "passthrough") or a hex configuration string."""
    from .fpga.fabric import ConfigError, from_hex, ripple_adder_2bit

    if not isinstance(ref, str):
        r.err(where, "expected a layout name or hex string")
        return None
    if ref == "adder":
        layout = ripple_adder_2bit()
        if layout.fabric != fabric:
            r.err(where, f"the adder layout needs a {layout.fabric.rows} x {layout.fabric.cols} fabric")
            return None
        return tuple(int(ch) for ch in layout.bits)
    if ref == "passthrough":
        return tuple(int(ch) for ch in fabric.encode({}, {}))
    try:
        return from_hex(ref, fabric.config_length)
    except ConfigError as e:
        r.err(where, str(e))
        return None


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    if not text.strip():
        raise ScenarioError(["line 1, column 1: syntax error: empty scenario file"])
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError([f"syntax error: {e}"]) from None
    r = _Reader()
    known = {"process", "devices", "stages", "policy", "sweep", "simulate", "grid", "pipeline", "controller", "outputs", "name"}
    for k in doc:
        if k not in known:
            r.err(k, "unknown section")
    name = doc.get("name", name)

    ps = r.table(doc, "process") or {}
    process = None
    if "process" not in doc:
        r.err("process", "section is required")
    else:
        _unknown_keys(r, ps, {"capacitance", "on_resistance", "swing", "on_off_ratio", "gate_leak_fraction", "label"}, "process")
        c = r.quantity(ps, "capacitance", "F", "process", positive=True)
        ron = r.quantity(ps, "on_resistance", "ohm", "process", positive=True)
        v = r.quantity(ps, "swing", "V", "process", positive=True)
        ratio = r.number(ps, "on_off_ratio", "process", lo=1)
        glf = r.number(ps, "gate_leak_fraction", "process", default=0.5, lo=0, hi=1)
        if None not in (c, ron, v, ratio, glf) and c > 0 and ron > 0 and v > 0:
            process = r.build("process", TransistorProcess, c, ron, v, float(ratio), float(glf), str(ps.get("label", "scenario")))

    scen_devices: Dict[str, DevicePoint] = {}
    gate_counts: Dict[str, int] = {}
    devs = r.table(doc, "devices") or {}
    for dname, d in devs.items():
        path = f"devices.{dname}"
        if not isinstance(d, dict):
            r.err(path, "expected a table")
            continue
        _unknown_keys(r, d, {"energy_per_op", "clock_rate", "propagation_delay", "area_units", "gate_count"}, path)
        e = r.quantity(d, "energy_per_op", "J", path, positive=True)
        area = r.number(d, "area_units", path, default=1.0, lo=0)
        if "clock_rate" in d:
            f = r.quantity(d, "clock_rate", "Hz", path, positive=True)
            point = r.build(path, DevicePoint.from_clock, e, f, float(area)) if None not in (e, f) else None
        else:
            tpd = r.quantity(d, "propagation_delay", "s", path, positive=True)
            point = r.build(path, DevicePoint.from_delay, e, tpd, float(area)) if None not in (e, tpd) else None
        if point is not None:
            scen_devices[dname] = point
        if "gate_count" in d:
            n = r.number(d, "gate_count", path, integer=True, lo=1)
            if n is not None:
                gate_counts[dname] = n

    stages: List[ThermalStage] = []
    defaulted: List[bool] = []
    raw_stages = doc.get("stages", [])
    if not isinstance(raw_stages, list):
        r.err("stages", "expected an array of tables ([[stages]])")
        raw_stages = []
    for i, s in enumerate(raw_stages):
        path = f"stages[{i}]"
        _unknown_keys(r, s, {"name", "temperature", "efficiency", "heat_load"}, path)
        t = r.quantity(s, "temperature", "K", path, positive=True)
        q = r.quantity(s, "heat_load", "W", path, default=0.0, nonneg=True)
        if t is None:
            continue
        eta = r.number(s, "efficiency", path, default=default_efficiency(t), lo=0, hi=1)
        st = r.build(path, ThermalStage, t, float(eta), q, str(s.get("name", f"stage{i}")))
        if st is not None:
            stages.append(st)
            defaulted.append("efficiency" not in s)
    for a, b in zip(stages, stages[1:]):
        if b.temperature >= a.temperature:
            r.err("stages", f"temperatures must strictly decrease ({a.temperature:g} K then {b.temperature:g} K)")
    if stages and stages[0].temperature > 300:
        r.err("stages", "first stage is above 300 K")

    policy = None
    pol = r.table(doc, "policy")
    if pol is not None:
        _unknown_keys(r, pol, {"alpha", "complexity_factor", "power_budget", "area_cap", "max_steps", "duty", "leak_devices_per_gate"}, "policy")
        defaults = ScalingPolicy()
        kw = dict(
            alpha=r.number(pol, "alpha", "policy", default=defaults.alpha),
            complexity_factor=r.number(pol, "complexity_factor", "policy", default=defaults.complexity_factor),
            power_budget=r.quantity(pol, "power_budget", "W", "policy", default=defaults.power_budget, positive=True),
            area_cap=r.number(pol, "area_cap", "policy", default=defaults.area_cap),
            max_steps=r.number(pol, "max_steps", "policy", default=defaults.max_steps, integer=True, lo=0),
            duty=r.number(pol, "duty", "policy", default=defaults.duty, lo=0, hi=1),
            leak_devices_per_gate=r.number(pol, "leak_devices_per_gate", "policy", default=defaults.leak_devices_per_gate),
        )
        if None not in kw.values():
            policy = r.build("policy", ScalingPolicy, **kw)

    sweep = None
    sw = r.table(doc, "sweep")
    if sw is not None:
        _unknown_keys(r, sw, {"f_min", "f_max", "points_per_decade", "stages", "duty"}, "sweep")
        lo = r.quantity(sw, "f_min", "Hz", "sweep", positive=True)
        hi = r.quantity(sw, "f_max", "Hz", "sweep", positive=True)
        ppd = r.number(sw, "points_per_decade", "sweep", default=5, integer=True, lo=1)
        n = r.number(sw, "stages", "sweep", default=8, integer=True, lo=2)
        duty = r.number(sw, "duty", "sweep", default=0.5, lo=0, hi=1)
        if lo is not None and hi is not None and hi <= lo:
            r.err("sweep", "f_max must exceed f_min")
        if n is not None and n % 2:
            r.err("sweep.stages", "must be even (the CMOS reference register needs pairs)")
        if None not in (lo, hi, ppd, n, duty):
            sweep = SweepConfig(lo, hi, ppd, n, duty)

    simulate = None
    sim = r.table(doc, "simulate")
    if sim is not None:
        _unknown_keys(r, sim, {"circuit", "stages", "frequency", "cycles", "stimulus", "loopback"}, "simulate")
        circuit = sim.get("circuit", "shift_register")
        if circuit not in CIRCUITS:
            r.err("simulate.circuit", f"must be one of {CIRCUITS}")
        n = r.number(sim, "stages", "simulate", default=8, integer=True, lo=1)
        f = r.quantity(sim, "frequency", "Hz", "simulate", positive=True)
        cycles = r.number(sim, "cycles", "simulate", default=12, integer=True, lo=1)
        stim_raw = sim.get("stimulus", {})
        stim: Dict[str, List[Optional[int]]] = {}
        if not isinstance(stim_raw, dict):
            r.err("simulate.stimulus", "expected a table of port = [bits]")
        else:
            for port, seq in stim_raw.items():
                if not isinstance(seq, list) or any(x not in (0, 1, -1) or isinstance(x, bool) for x in seq):
                    r.err(f"simulate.stimulus.{port}", "expected a list of 0, 1 or -1 (no data)")
                    continue
                stim[port] = [None if x == -1 else int(x) for x in seq]
        if None not in (n, f, cycles) and circuit in CIRCUITS:
            simulate = SimulateConfig(circuit, n, f, cycles, stim, bool(sim.get("loopback", False)))

    grid = None
    g = r.table(doc, "grid")
    if g is not None:
        _unknown_keys(r, g, {"rows", "cols", "cell_capacitance", "column_capacitance", "access_gate_capacitance",
                             "tap_capacitance", "on_resistance", "ramp_time", "v_data", "v_row", "threshold",
                             "updates", "data_seed", "corrupt"}, "grid")
        rows = r.number(g, "rows", "grid", integer=True, lo=1)
        cols = r.number(g, "cols", "grid", integer=True, lo=0)
        kw = {}
        for key in ("cell_capacitance", "column_capacitance", "access_gate_capacitance", "tap_capacitance"):
            if key in g:
                kw[key] = r.quantity(g, key, "F", "grid", nonneg=True)
        if "on_resistance" in g:
            kw["on_resistance"] = r.quantity(g, "on_resistance", "ohm", "grid", positive=True)
        if "threshold" in g:
            kw["threshold"] = r.quantity(g, "threshold", "V", "grid", nonneg=True)
        for key in ("v_data", "v_row"):
            if key in g:
                pair = g[key]
                if not isinstance(pair, list) or len(pair) != 2:
                    r.err(f"grid.{key}", "expected [low, high] voltages")
                else:
                    kw[key] = tuple(r.quantity({"v": x}, "v", "V", f"grid.{key}") for x in pair)
        ramp = r.quantity(g, "ramp_time", "s", "grid", positive=True)
        updates = r.number(g, "updates", "grid", default=16, integer=True, lo=0)
        seed = r.number(g, "data_seed", "grid", default=0, integer=True, lo=0)
        corrupt = r.number(g, "corrupt", "grid", default=0, integer=True, lo=0)
        if cols is not None and corrupt is not None and corrupt > cols:
            r.err("grid.corrupt", f"cannot corrupt more than the {cols} cells of a row")
        flat = [rows, cols, ramp, updates, seed, corrupt] + list(kw.values())
        if all(x is not None for x in flat) and all(None not in v for v in kw.values() if isinstance(v, tuple)):
            from .control.grid import CellGrid

            if r.build("grid", CellGrid, rows, cols, **kw) is not None:
                grid = GridConfig(rows, cols, ramp, updates, seed, corrupt, kw)

    pipeline = None
    pl = r.table(doc, "pipeline")
    if pl is not None:
        _unknown_keys(r, pl, {"word_width", "depth", "clock", "ratios", "loopback", "payload_seed", "output_ticks"}, "pipeline")
        w = r.number(pl, "word_width", "pipeline", default=2000, integer=True, lo=1)
        depth = r.number(pl, "depth", "pipeline", integer=True, lo=1)
        clk = r.quantity(pl, "clock", "Hz", "pipeline", positive=True)
        ratios = pl.get("ratios", [10, 10])
        if not isinstance(ratios, list) or any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in ratios):
            r.err("pipeline.ratios", "expected a list of positive integers")
            ratios = None
        seed = r.number(pl, "payload_seed", "pipeline", default=0, integer=True, lo=0)
        ticks = r.number(pl, "output_ticks", "pipeline", default=None, integer=True, lo=1) if "output_ticks" in pl else None
        if None not in (w, depth, clk, ratios, seed):
            from .stream.pipeline import StorePlan, build_chain

            sp = r.build("pipeline", StorePlan, w, depth, clk, bool(pl.get("loopback", False)))
            if sp is not None and r.build("pipeline.ratios", build_chain, sp, ratios) is not None:
                pipeline = PipelineConfig(w, depth, clk, ratios, sp.loopback, seed, ticks)

    controller = None
    ct = r.table(doc, "controller")
    if ct is not None:
        _unknown_keys(r, ct, {"rows", "cols", "configs", "rotation_clock", "load_clock", "rql_clock",
                              "decoherence_budget", "durations", "branches", "events", "spares"}, "controller")
        rows = r.number(ct, "rows", "controller", integer=True, lo=1)
        cols = r.number(ct, "cols", "controller", integer=True, lo=1)
        configs = ct.get("configs")
        if not isinstance(configs, list) or len(configs) != 4 or not all(isinstance(c, str) for c in configs):
            r.err("controller.configs", "expected four configuration names or hex strings")
            configs = None
        rot = r.quantity(ct, "rotation_clock", "Hz", "controller", default=4e6, positive=True)
        load = r.quantity(ct, "load_clock", "Hz", "controller", default=4e6, positive=True)
        rql = r.quantity(ct, "rql_clock", "Hz", "controller", default=5e9, positive=True)
        budget = r.quantity(ct, "decoherence_budget", "s", "controller", default=100e-6, positive=True)
        durations = {}
        dsec = r.table(ct, "durations", "controller.") or {}
        for mode in ("calibration", "initialization", "arithmetic", "readout"):
            default = {"initialization": 5e-6, "arithmetic": 100e-6}.get(mode, _MISSING)
            durations[mode] = r.quantity(dsec, mode, "s", "controller.durations", default=default, nonneg=True)
        for extra in dsec:
            if extra not in durations:
                durations[extra] = r.quantity(dsec, extra, "s", "controller.durations", nonneg=True)
        branches = r.table(ct, "branches", "controller.") or {}
        spares = r.table(ct, "spares", "controller.") or {}
        events = []
        for i, ev in enumerate(ct.get("events", [])):
            t = r.quantity(ev, "time", "s", f"controller.events[{i}]", nonneg=True)
            if t is not None:
                events.append((t, ev.get("target")))
        if events != sorted(events, key=lambda e: e[0]):
            r.err("controller.events", "events must be listed in time order")
        targets = set(durations) | set(spares)
        for src, dst in branches.items():
            if dst not in targets:
                r.err(f"controller.branches.{src}", f"target {dst!r} is neither a mode nor a spare configuration")
        for t, tgt in events:
            if tgt is not None and tgt not in targets:
                r.err("controller.events", f"target {tgt!r} is neither a mode nor a spare configuration")
        for s in spares:
            if s not in durations:
                r.err(f"controller.spares.{s}", "spare configuration needs a run duration in [controller.durations]")
        bits = []
        spare_bits = {}
        if rows is not None and cols is not None:
            from .fpga.fabric import Fabric

            fab = Fabric(rows, cols)
            for i, ref in enumerate(configs or []):
                b = _resolve_config(r, fab, ref, f"controller.configs[{i}]")
                if b is not None:
                    bits.append(b)
            for label, ref in spares.items():
                b = _resolve_config(r, fab, ref, f"controller.spares.{label}")
                if b is not None:
                    spare_bits[label] = b
        if None not in (rows, cols, configs, rot, load, rql, budget) and None not in durations.values() and len(bits) == 4:
            controller = ControllerConfig(rows, cols, configs, rot, load, rql, budget, durations, dict(branches), events,
                                          dict(spares), bits, spare_bits)

    outputs = {}
    out = r.table(doc, "outputs")
    if out is not None:
        _unknown_keys(r, out, {"dir", "format"}, "outputs")
        if "format" in out and out["format"] not in ("csv", "text"):
            r.err("outputs.format", "must be csv or text")
        outputs = {k: str(v) for k, v in out.items()}

    if r.errors:
        raise ScenarioError(r.errors)
    return Scenario(name, process, scen_devices, gate_counts, stages, defaulted, policy, sweep, simulate, grid, pipeline, controller, outputs)


def bundled_scenarios() -> List[str]:
    pkg = resources.files("cryohybrid") / "scenarios"
    return sorted(p.name for p in pkg.iterdir() if p.name.endswith(".scenario"))


def read_scenario_text(ref: str) -> Tuple[str, str]:
    """Text and display name for a path, or for the name of a bundled scenario."""
    path = Path(ref)
    if path.is_file():
        return path.read_text(encoding="utf-8"), path.stem
    name = path.name if path.name.endswith(".scenario") else path.name + ".scenario"
    res = resources.files("cryohybrid") / "scenarios" / name
    if res.is_file():
        return res.read_text(encoding="utf-8"), name[: -len(".scenario")]
    raise FileNotFoundError(f"no scenario file {ref!r} (bundled: {', '.join(bundled_scenarios())})")


def load_scenario(ref: str) -> Scenario:
    text, name = read_scenario_text(ref)
    return parse_scenario(text, name)
