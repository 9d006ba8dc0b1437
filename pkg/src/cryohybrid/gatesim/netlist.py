"""Switch-level netlists for four-phase adiabatic and DC-rail CMOS circuits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

ADIABATIC = "2lal"
CMOS = "cmos"


class NetlistError(ValueError):
    """Structural problem found while validating a netlist."""


class NetlistFault(RuntimeError):
    """Electrical fault found during simulation (e.g. two rails shorted together)."""


@dataclass(frozen=True)
class Node:
    capacitance: float
    initial_high: bool = False


@dataclass(frozen=True)
class Rail:
    kind: str  # "clock", "high" or "low"
    phase: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("clock", "high", "low"):
            raise NetlistError(f"unknown rail kind {self.kind!r}")
        if self.kind == "clock" and self.phase not in (0, 1, 2, 3):
            raise NetlistError("clock rails need a phase in 0..3")


# (controlling node, rail or input port; True conducts when it is high, False when low)
Control = Tuple[str, bool]


@dataclass(frozen=True)
class Switch:
    """A transmission gate (or a series stack of them) between two terminals.

    It conducts when every control literal is satisfied; ``r_on`` is the
    total series on-resistance of the stack.
    """

    a: str
    b: str
    controls: Tuple[Control, ...]
    r_on: float

    def __post_init__(self):
        if self.r_on <= 0:
            raise NetlistError("switch on-resistance must be > 0")
        if not self.controls:
            raise NetlistError("switch needs at least one control")


@dataclass(frozen=True)
class OutputPort:
    signal: str
    sample_slot: int  # slot (mod 4) at whose start the signal is valid


@dataclass
class Netlist:
    family: str
    nodes: Dict[str, Node] = field(default_factory=dict)
    rails: Dict[str, Rail] = field(default_factory=dict)
    switches: List[Switch] = field(default_factory=list)
    # signal name -> (true node, complement node or None for single-rail CMOS)
    signals: Dict[str, Tuple[str, Optional[str]]] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)  # port -> signal it drives
    outputs: Dict[str, OutputPort] = field(default_factory=dict)
    gate_count: int = 1
    name: str = ""

    def add_signal(self, name: str, capacitance: float, dual_rail: bool = True, initial_high: bool = False):
        self.nodes[name] = Node(capacitance, initial_high)
        neg = None
        if dual_rail:
            neg = f"{name}_n"
            # adiabatic dual-rail pairs rest with both rails low (no data)
            neg_high = (not initial_high) if self.family == CMOS else False
            self.nodes[neg] = Node(capacitance, neg_high)
        self.signals[name] = (name, neg)
        return name, neg

    def connect(self, a: str, b: str, r_on: float, *controls: Control):
        self.switches.append(Switch(a, b, tuple(controls), r_on))

    def is_terminal(self, name: str) -> bool:
        return name in self.nodes or name in self.rails

    def validate(self) -> None:
        problems = []
        if self.family not in (ADIABATIC, CMOS):
            problems.append(f"unknown circuit family {self.family!r}")
        for name, node in self.nodes.items():
            if node.capacitance <= 0:
                problems.append(f"node {name!r}: capacitance must be > 0")
            if name in self.rails:
                problems.append(f"{name!r} is both a node and a rail")
        signal_nodes = set()
        for sig, (pos, neg) in self.signals.items():
            for n in (pos, neg):
                if n is None:
                    continue
                if n not in self.nodes:
                    problems.append(f"signal {sig!r} refers to undeclared node {n!r}")
                signal_nodes.add(n)
        for port, sig in self.inputs.items():
            if port in self.nodes or port in self.rails:
                problems.append(f"input port {port!r} shadows a node or rail of the same name")
            if sig not in self.signals:
                problems.append(f"input port {port!r} drives undeclared signal {sig!r}")
        for port, out in self.outputs.items():
            if out.signal not in self.signals:
                problems.append(f"output port {port!r} reads undeclared signal {out.signal!r}")
        for i, sw in enumerate(self.switches):
            for t in (sw.a, sw.b):
                if not self.is_terminal(t):
                    problems.append(f"switch {i}: terminal {t!r} does not resolve")
            for ctl, _ in sw.controls:
                if ctl not in signal_nodes and ctl not in self.rails and ctl not in self.inputs:
                    problems.append(f"switch {i}: control {ctl!r} is not a declared signal, rail or input port")
        if problems:
            raise NetlistError("; ".join(problems))

    def signal_of(self, node: str) -> Optional[str]:
        for sig, (pos, neg) in self.signals.items():
            if node in (pos, neg):
                return sig
        return None
