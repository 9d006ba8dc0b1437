"""Adiabatic scaling schedules for a CATC/superconductor hybrid.

Starting from a baseline in which a fast superconducting (RQL) layer and a
cryo CMOS layer dissipate the same power, each scaling step lowers the
transistor clock by ``alpha`` and multiplies the gate count by ``1/alpha**2``
so the transistor layer's dynamic power stays on budget. The first step also
switches the circuit style from CMOS to CATC, whose gates are
``complexity_factor`` times larger (area and switched capacitance), so that
step grows the gate count by only ``1/(alpha**2 * complexity_factor)``.

Leakage grows with the gate count; the schedule stops at the leakage floor,
where static power reaches the dynamic budget.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from .device_models import DevicePoint, TransistorProcess, static_power


class Technology(str, enum.Enum):
    CMOS = "CMOS"
    CATC = "CATC"
    RQL = "RQL"


class StopReason(str, enum.Enum):
    MAX_STEPS = "max_steps"
    AREA_CAP = "area_cap"
    LEAKAGE_FLOOR = "leakage_floor"


@dataclass(frozen=True)
class ScalingStep:
    step_index: int
    technology: Technology
    gate_count: int
    clock_rate: float
    dynamic_power: float
    static_power: Optional[float]  # None for RQL ("n/a")
    area_estimate: float

    def __post_init__(self):
        if self.gate_count < 1:
            raise ValueError("gate_count must be >= 1")
        if self.clock_rate <= 0:
            raise ValueError("clock_rate must be > 0")
        if self.dynamic_power < 0 or (self.static_power is not None and self.static_power < 0):
            raise ValueError("powers must be >= 0")

    @property
    def energy_per_gate_op(self) -> float:
        return self.dynamic_power / (self.gate_count * self.clock_rate)

    @property
    def leakage_ratio(self) -> float:
        if self.static_power is None:
            return 0.0
        return self.static_power / self.dynamic_power


@dataclass(frozen=True)
class ScalingPolicy:
    alpha: float = 0.1
    complexity_factor: float = 10.0
    power_budget: float = 160e-6
    area_cap: float = 1e10
    max_steps: int = 3
    duty: float = 0.5
    # Leaking device-equivalents charged per CATC gate. One reproduces the
    # 16.7 nW / 1.67 uW / 167 uW leakage column; see leakage_basis().
    leak_devices_per_gate: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.complexity_factor < 1:
            raise ValueError("complexity_factor must be >= 1")
        if self.power_budget <= 0:
            raise ValueError("power_budget must be > 0")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.leak_devices_per_gate <= 0:
            raise ValueError("leak_devices_per_gate must be > 0")

    def leakage_basis(self) -> str:
        return (
            f"static power = N_CATC x {self.leak_devices_per_gate:g} device(s) per gate "
            f"x V x I_off x duty; complexity factor {self.complexity_factor:g} applied to "
            "per-gate switching energy and area only"
        )


@dataclass(frozen=True)
class Baseline:
    rql: ScalingStep
    cmos: ScalingStep


@dataclass
class Schedule:
    baseline: Baseline
    steps: List[ScalingStep]
    stop_reason: StopReason
    policy: ScalingPolicy

    @property
    def rows(self) -> List[Tuple[str, ScalingStep]]:
        """(section, step) pairs in schedule order, RQL layer repeated per section."""
        out = [("Baseline", self.baseline.rql), ("Baseline", self.baseline.cmos)]
        for s in self.steps:
            section = f"Scaling Step {s.step_index}"
            out.append((section, replace(self.baseline.rql, step_index=s.step_index)))
            out.append((section, s))
        return out


def baseline(n_rql: int, rql: DevicePoint, cmos: DevicePoint, p: TransistorProcess) -> Baseline:
    """Baseline hybrid: cryo CMOS gate count chosen to match the RQL layer's power."""
    p_rql = rql.power(n_rql)
    n_cmos = max(1, round(p_rql / (cmos.clock_rate * cmos.energy_per_op)))
    rql_step = ScalingStep(
        step_index=0,
        technology=Technology.RQL,
        gate_count=n_rql,
        clock_rate=rql.clock_rate,
        dynamic_power=p_rql,
        static_power=None,
        area_estimate=n_rql * rql.area_units,
    )
    cmos_step = ScalingStep(
        step_index=0,
        technology=Technology.CMOS,
        gate_count=n_cmos,
        clock_rate=cmos.clock_rate,
        dynamic_power=cmos.power(n_cmos),
        static_power=None,
        area_estimate=n_cmos * cmos.area_units,
    )
    return Baseline(rql_step, cmos_step)


def _scale_count(n: int, factor: float) -> int:
    """n * factor, in exact integer arithmetic when factor is (close to) an integer or its reciprocal."""
    near = round(factor)
    if near >= 1 and math.isclose(factor, near, rel_tol=1e-9):
        return n * near
    inv = 1.0 / factor
    near_inv = round(inv)
    if near_inv >= 1 and math.isclose(inv, near_inv, rel_tol=1e-9) and n % near_inv == 0:
        return n // near_inv
    return max(1, round(n * factor))


def next_step(prev: ScalingStep, policy: ScalingPolicy, p: TransistorProcess, duty: Optional[float] = None) -> ScalingStep:
    if prev.technology is Technology.RQL:
        raise ValueError("the superconducting layer is not scaled adiabatically")
    duty = policy.duty if duty is None else duty
    a = policy.alpha
    growth = 1.0 / (a * a)
    energy_scale = 1.0
    if prev.technology is Technology.CMOS:
        growth /= policy.complexity_factor
        energy_scale = policy.complexity_factor
    n = _scale_count(prev.gate_count, growth)
    f = a * prev.clock_rate
    per_gate_prev = prev.dynamic_power / prev.gate_count
    per_gate = per_gate_prev * a * a * energy_scale
    p_dyn = n * per_gate
    p_static = n * policy.leak_devices_per_gate * static_power(p, duty)
    return ScalingStep(
        step_index=prev.step_index + 1,
        technology=Technology.CATC,
        gate_count=n,
        clock_rate=f,
        dynamic_power=p_dyn,
        static_power=p_static,
        area_estimate=n * policy.complexity_factor,
    )


def plan(policy: ScalingPolicy, base: Baseline, p: TransistorProcess) -> Schedule:
    steps: List[ScalingStep] = []
    prev = base.cmos
    reason = StopReason.MAX_STEPS
    while len(steps) < policy.max_steps:
        step = next_step(prev, policy, p)
        if step.area_estimate > policy.area_cap:
            reason = StopReason.AREA_CAP
            break
        steps.append(step)
        if step.static_power >= step.dynamic_power:
            reason = StopReason.LEAKAGE_FLOOR
            break
        prev = step
    return Schedule(base, steps, reason, policy)


def leakage_floor_step(policy: ScalingPolicy, base: Baseline, p: TransistorProcess) -> int:
    """Closed-form index of the first step whose static power reaches the dynamic budget."""
    first = next_step(base.cmos, policy, p)
    ratio = first.static_power / first.dynamic_power
    if ratio >= 1:
        return 1
    growth = 1.0 / policy.alpha**2
    # ratio * growth**(k-1) >= 1
    k = 1 + math.log(1.0 / ratio) / math.log(growth)
    return max(1, math.ceil(k - 1e-9))


def table1_defaults() -> Tuple[ScalingPolicy, Baseline, TransistorProcess]:
    from .device_models import CMOS_POINT, RQL_POINT

    p = TransistorProcess()
    return ScalingPolicy(), baseline(1_000_000, RQL_POINT, CMOS_POINT, p), p
