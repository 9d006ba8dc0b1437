"""Quasi-static switch-level simulation with per-event energy accounting.

Time advances one clock ramp (a quarter period) at a time. At the start of
each ramp every switch samples its controls; the conducting switches split
the circuit into components. Each component either

* contains one rail: nodes not already at the rail voltage snap to it
  (a non-adiabatic event, 1/2 C dV^2 in the channel), then follow the rail
  through its ramp, dissipating the adiabatic ramp energy in the channels
  and returning the rest of the signal energy 1/2 C dV^2 to the supply;
* contains no rail: nodes at unequal voltages share charge (non-adiabatic);
* contains two or more rails: a short, reported as a NetlistFault.

Snapping can change controls of other switches, so the start-of-ramp
resolution repeats until nothing moves (this is what lets DC-rail CMOS
logic settle within a slot).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..device_models import ClockSpec, ramp_energy
from .netlist import Netlist, NetlistError, NetlistFault, Rail

CHANNEL = "channel"
RAIL_RETURN = "rail_return"


class EnergyEvent(NamedTuple):
    time: float
    slot: int
    node: str
    location: str
    joules: float
    adiabatic: bool


@dataclass
class EnergyTrace:
    events: List[EnergyEvent] = field(default_factory=list)

    def total(self, location: Optional[str] = None) -> float:
        return sum(e.joules for e in self.events if location is None or e.location == location)

    @property
    def totals(self) -> Dict[str, float]:
        return {CHANNEL: self.total(CHANNEL), RAIL_RETURN: self.total(RAIL_RETURN)}

    def per_cycle(self, n_cycles: int, location: str = CHANNEL) -> np.ndarray:
        out = np.zeros(n_cycles)
        for e in self.events:
            if e.location == location:
                out[e.slot // 4] += e.joules
        return out

    def non_adiabatic(self) -> List[EnergyEvent]:
        return [e for e in self.events if not e.adiabatic]

    def extend(self, other: "EnergyTrace"):
        self.events.extend(other.events)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "event", "location", "joules", "adiabatic_flag"])
        for e in self.events:
            w.writerow([repr(e.time), e.node, e.location, repr(e.joules), int(e.adiabatic)])
        return buf.getvalue()


@dataclass
class Waveform:
    node_names: List[str]
    times: np.ndarray
    slots: np.ndarray
    kinds: List[str]  # "start", "relax" or "ramp" per recorded state
    voltages: np.ndarray  # (states, nodes)
    samples: Dict[str, List[Tuple[int, Optional[int]]]]

    def node(self, name: str) -> np.ndarray:
        return self.voltages[:, self.node_names.index(name)]

    def bits(self, port: str) -> List[Optional[int]]:
        return [v for _, v in self.samples[port]]

    def valid(self, port: str) -> List[Tuple[int, int]]:
        """(slot, bit) pairs where the port carried data."""
        return [(s, v) for s, v in self.samples[port] if v is not None]


@dataclass
class SimResult:
    waveform: Waveform
    trace: EnergyTrace
    clock: ClockSpec
    n_cycles: int


def _rail_voltage(rail: Rail, slot: int, clock: ClockSpec, end: bool) -> float:
    if rail.kind == "high":
        return clock.v_high
    if rail.kind == "low":
        return clock.v_low
    d = (slot - rail.phase) % 4
    high = d in (0, 1) if end else d in (1, 2)
    return clock.v_high if high else clock.v_low


class _Union:
    def __init__(self):
        self.parent: Dict[str, str] = {}

    def find(self, x: str) -> str:
        p = self.parent.setdefault(x, x)
        while p != self.parent[p]:
            self.parent[p] = self.parent[self.parent[p]]
            p = self.parent[p]
        self.parent[x] = p
        return p

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def simulate(
    netlist: Netlist,
    clock: ClockSpec,
    stimulus: Mapping[str, Sequence[Optional[int]]],
    n_cycles: int,
) -> SimResult:
    """Run ``n_cycles`` full clock cycles (four ramps each).

    ``stimulus`` maps each input port to one value per cycle (0, 1 or None
    for "no data"); cycles past the end of a sequence carry None.
    """
    netlist.validate()
    for port in stimulus:
        if port not in netlist.inputs:
            raise NetlistError(f"stimulus for unknown input port {port!r}")
    names = list(netlist.nodes)
    idx = {n: i for i, n in enumerate(names)}
    cap = np.array([netlist.nodes[n].capacitance for n in names])
    hi, lo = clock.v_high, clock.v_low
    mid = 0.5 * (hi + lo)
    tol = 1e-12 * clock.swing
    v = np.array([hi if netlist.nodes[n].initial_high else lo for n in names], dtype=float)
    t_ramp = clock.ramp_time
    rails = netlist.rails
    stim = {p: list(seq) for p, seq in stimulus.items()}

    events: List[EnergyEvent] = []
    times, slots, kinds, states = [0.0], [0], ["start"], [v.copy()]
    samples: Dict[str, List[Tuple[int, Optional[int]]]] = {p: [] for p in netlist.outputs}

    def control_high(name: str, slot: int) -> Optional[bool]:
        i = idx.get(name)
        if i is not None:
            return bool(v[i] > mid)
        rail = rails.get(name)
        if rail is not None:
            return _rail_voltage(rail, slot, clock, end=False) > mid
        seq = stim.get(name, ())
        cycle = slot // 4
        val = seq[cycle] if cycle < len(seq) else None
        return None if val is None else bool(val)

    def resolve(slot: int):
        u = _Union()
        on = []
        for sw in netlist.switches:
            if all(control_high(c, slot) is want for c, want in sw.controls):
                on.append(sw)
                u.union(sw.a, sw.b)
        groups: Dict[str, Tuple[List[str], List[str], list]] = {}
        for sw in on:
            root = u.find(sw.a)
            g = groups.setdefault(root, ([], [], []))
            g[2].append(sw)
        for term in list(u.parent):
            g = groups.get(u.find(term))
            if g is None:
                continue
            (g[0] if term in rails else g[1]).append(term)
        return list(groups.values())

    for s in range(4 * n_cycles):
        j = s % 4
        t0 = s * t_ramp
        for _ in range(len(names) + 2):
            comps = resolve(s)
            moved = False
            for rail_names, node_names, _sws in comps:
                if len(rail_names) > 1:
                    raise NetlistFault(
                        f"slot {s}: rails {sorted(rail_names)} shorted through {sorted(node_names)}"
                    )
                ids = [idx[n] for n in node_names]
                if rail_names:
                    vr = _rail_voltage(rails[rail_names[0]], s, clock, end=False)
                    for i in ids:
                        dv = v[i] - vr
                        if abs(dv) > tol:
                            events.append(EnergyEvent(t0, s, names[i], CHANNEL, 0.5 * cap[i] * dv * dv, False))
                            v[i] = vr
                            moved = True
                elif len(ids) > 1:
                    vs = v[ids]
                    if vs.max() - vs.min() > tol:
                        cs = cap[ids]
                        vf = float(np.dot(cs, vs) / cs.sum())
                        for i in ids:
                            dv = v[i] - vf
                            if abs(dv) > tol:
                                events.append(EnergyEvent(t0, s, names[i], CHANNEL, 0.5 * cap[i] * dv * dv, False))
                            v[i] = vf
                        moved = True
            if not moved:
                break
            times.append(t0)
            slots.append(s)
            kinds.append("relax")
            states.append(v.copy())
        else:
            raise NetlistFault(f"slot {s}: switch network did not settle")

        for port, out in netlist.outputs.items():
            if out.sample_slot == j:
                pos, neg = netlist.signals[out.signal]
                p_hi = v[idx[pos]] > mid
                if neg is None:
                    samples[port].append((s, int(p_hi)))
                else:
                    n_hi = v[idx[neg]] > mid
                    samples[port].append((s, 1 if p_hi and not n_hi else 0 if n_hi and not p_hi else None))

        ramped = False
        for rail_names, node_names, sws in comps:
            if not rail_names or not node_names:
                continue
            rail = rails[rail_names[0]]
            start = _rail_voltage(rail, s, clock, end=False)
            end = _rail_voltage(rail, s, clock, end=True)
            dv = end - start
            if dv == 0:
                continue
            ids = [idx[n] for n in node_names]
            shares = _ramp_shares(node_names, rail_names[0], sws, cap[ids], dv, t_ramp)
            for i, e in zip(ids, shares):
                full = 0.5 * cap[i] * dv * dv
                events.append(EnergyEvent(t0, s, names[i], CHANNEL, e, True))
                if full - e > 0:
                    events.append(EnergyEvent(t0, s, names[i], RAIL_RETURN, full - e, True))
                v[i] = end
            ramped = True
        if ramped:
            times.append(t0 + t_ramp)
            slots.append(s)
            kinds.append("ramp")
            states.append(v.copy())

    wave = Waveform(
        node_names=names,
        times=np.array(times),
        slots=np.array(slots),
        kinds=kinds,
        voltages=np.array(states),
        samples=samples,
    )
    return SimResult(wave, EnergyTrace(events), clock, n_cycles)


def _ramp_shares(node_names, rail, switches, caps, dv, t_ramp) -> List[float]:
    """Per-node channel energy while a component follows a ramping rail.

    In the slow-ramp limit every node draws current C_k dV/dt; the power
    in the resistor network is i^T Z i with Z the inverse of the
    conductance matrix grounded at the rail. Node k is charged its share
    c_k (Z c)_k, clamped at the conventional 1/2 C dV^2.
    """
    pos = {n: k for k, n in enumerate(node_names)}
    n = len(node_names)
    g = np.zeros((n, n))
    for sw in switches:
        cond = 1.0 / sw.r_on
        a, b = pos.get(sw.a), pos.get(sw.b)
        if a is not None and b is not None:
            if a == b:
                continue
            g[a, a] += cond
            g[b, b] += cond
            g[a, b] -= cond
            g[b, a] -= cond
        elif a is not None and sw.b == rail:
            g[a, a] += cond
        elif b is not None and sw.a == rail:
            g[b, b] += cond
    if n == 1:
        return [ramp_energy(caps[0], 1.0 / g[0, 0], dv, t_ramp)]
    zc = np.linalg.solve(g, caps)
    raw = dv * dv / t_ramp * caps * zc
    return [float(min(0.5 * c * dv * dv, e)) for c, e in zip(caps, raw)]
