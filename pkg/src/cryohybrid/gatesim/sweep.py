"""Power-per-gate versus clock frequency, and log-log slope fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..device_models import ClockSpec, TransistorProcess, static_power
from .engine import CHANNEL, simulate
from .netlist import Netlist


@dataclass(frozen=True)
class SweepPoint:
    frequency: float
    dynamic: float  # W per gate
    static: float  # W per gate
    energy_per_cycle: float  # J per gate per clock cycle, channel only

    @property
    def power(self) -> float:
        return self.dynamic + self.static

    @property
    def period(self) -> float:
        return 1.0 / self.frequency


def alternating_stimulus(netlist: Netlist, n_cycles: int) -> Dict[str, List[int]]:
    """1010... on every input port, so each data node switches every cycle."""
    return {port: [(c + 1) % 2 for c in range(n_cycles)] for port in netlist.inputs}


def energy_sweep(
    netlist: Netlist,
    p: TransistorProcess,
    frequencies: Sequence[float],
    duty: float = 0.5,
    measure_cycles: int = 4,
    stimulus: Optional[Mapping[str, Sequence[Optional[int]]]] = None,
) -> List[SweepPoint]:
    """Simulate the netlist at each frequency and report steady-state power per gate.

    The first ``gate_count + 2`` cycles fill the pipeline and are discarded;
    the channel energy of the next ``measure_cycles`` cycles is averaged.
    """
    freqs = list(frequencies)
    if not freqs:
        raise ValueError("at least one frequency is required")
    if any(f <= 0 for f in freqs):
        raise ValueError("frequencies must be positive")
    if any(b < a for a, b in zip(freqs, freqs[1:])):
        raise ValueError("frequencies must be sorted ascending")
    if measure_cycles < 1:
        raise ValueError("measure_cycles must be >= 1")
    warmup = netlist.gate_count + 2
    total = warmup + measure_cycles
    stim = alternating_stimulus(netlist, total) if stimulus is None else stimulus
    p_static = static_power(p, duty)
    out = []
    for f in freqs:
        clock = ClockSpec(f, 0.0, p.swing)
        res = simulate(netlist, clock, stim, total)
        e = float(res.trace.per_cycle(total, CHANNEL)[warmup:].sum())
        e_gate = e / (measure_cycles * netlist.gate_count)
        out.append(SweepPoint(f, e_gate * f, p_static, e_gate))
    return out


def log_frequencies(f_lo: float, f_hi: float, per_decade: int = 5) -> List[float]:
    n = int(round(math.log10(f_hi / f_lo) * per_decade)) + 1
    return [float(x) for x in np.logspace(math.log10(f_lo), math.log10(f_hi), n)]


_COMPONENTS = ("power", "dynamic", "static")


def fit_loglog_slope(
    curve: Sequence,
    band: Tuple[float, float],
    component: str = "power",
) -> float:
    """Least-squares slope of log(power) against log(clock period) within ``band`` (Hz, inclusive).

    ``curve`` holds SweepPoints or plain (frequency, power) pairs.
    """
    if component not in _COMPONENTS:
        raise ValueError(f"component must be one of {_COMPONENTS}")
    lo, hi = band
    if lo > hi:
        lo, hi = hi, lo
    xs, ys = [], []
    for pt in curve:
        if isinstance(pt, SweepPoint):
            f, pw = pt.frequency, getattr(pt, component)
        else:
            f, pw = pt
        if lo * (1 - 1e-9) <= f <= hi * (1 + 1e-9):
            if pw <= 0:
                raise ValueError(f"non-positive power {pw!r} at {f!r} Hz cannot be log-fitted")
            xs.append(math.log(1.0 / f))
            ys.append(math.log(pw))
    if len(xs) < 3:
        raise ValueError(f"need at least 3 points in band, got {len(xs)}")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def adiabatic_band(
    curve: Sequence[SweepPoint],
    p: TransistorProcess,
    min_dynamic_to_static: float = 50.0,
    min_ramp_over_rc: float = 100.0,
) -> Tuple[float, float]:
    """Frequency range where dynamic power dominates leakage and ramps are slow.

    Below it leakage flattens the curve; above it ramps approach 2RC and the
    adiabatic formula saturates at the conventional 1/2 CV^2.
    """
    ok = [
        pt.frequency
        for pt in curve
        if pt.dynamic >= min_dynamic_to_static * pt.static
        and 1.0 / (4.0 * pt.frequency) >= min_ramp_over_rc * p.rc
    ]
    if len(ok) < 3:
        raise ValueError("fewer than 3 sweep points fall in the adiabatic band")
    return min(ok), max(ok)
