"""Timed operating sequence: superconducting runs separated by buffer rotations.

Each mode runs with the RQL clock on, then the clock stops and the buffer
rotates to the next mode. A feedback event that lands inside a run cuts
the run short at the event time and branches to the mode named by the
event (or by the plan's branch table), using as many rotations as the
ring distance requires.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from dataclasses import dataclass, field
from typing import List, Mapping, Optional

from ..stream.microwave import FeedbackChannel
from .buffer import ConfigBuffer
from .fabric import ConfigError, Fabric, configure

RUN = "rql_run"
ROTATE = "rotation"


def _q(x: float) -> Fraction:
    """Exact rational for the decimal a float prints as (1e-06 -> 1/1000000)."""
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class SequencePlan:
    durations: Mapping[str, float]  # s of RQL run per mode; calibration and readout have no default
    modes: tuple = ("calibration", "initialization", "arithmetic", "readout")
    rql_clock: float = 5e9
    decoherence_budget: float = 100e-6
    branches: Mapping[str, str] = field(default_factory=dict)  # mode -> target on feedback

    def __post_init__(self):
        missing = [m for m in self.modes if m not in self.durations]
        if missing:
            raise ValueError(f"run durations missing for {missing}")
        if any(d < 0 for d in self.durations.values()):
            raise ValueError("run durations must be >= 0")
        if self.rql_clock <= 0 or self.decoherence_budget <= 0:
            raise ValueError("rql_clock and decoherence_budget must be > 0")

    @classmethod
    def with_defaults(cls, calibration: float, readout: float, **kw) -> "SequencePlan":
        durations = {"calibration": calibration, "initialization": 5e-6, "arithmetic": 100e-6, "readout": readout}
        durations.update(kw.pop("durations", {}))
        return cls(durations=durations, **kw)


@dataclass(frozen=True)
class Interval:
    event: str  # RUN or ROTATE
    mode: str  # mode running, or mode being exposed
    start: float
    duration: float
    end: float  # kept exact rather than recomputed as start + duration
    note: str = ""


@dataclass
class TimingReport:
    timeline: List[Interval]
    rotation_time: float
    rotations: int
    overhead: float  # s of rotation between quantum operations
    budget: float
    violations: List[str]
    config_errors: List[str]
    rql_clock: float

    @property
    def mutual_exclusion_ok(self) -> bool:
        runs = [iv for iv in self.timeline if iv.event == RUN]
        rots = [iv for iv in self.timeline if iv.event == ROTATE]
        return not any(r.start < q.end and q.start < r.end for r in runs for q in rots)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.config_errors and self.mutual_exclusion_ok

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["event", "mode", "start_s", "duration_s", "rql_cycles", "note"])
        for iv in self.timeline:
            cycles = round(iv.duration * self.rql_clock) if iv.event == RUN else 0
            w.writerow([iv.event, iv.mode, repr(iv.start), repr(iv.duration), cycles, iv.note])
        return buf.getvalue()


def run_sequence(
    plan: SequencePlan,
    buffer: ConfigBuffer,
    fabric: Optional[Fabric] = None,
    feedback: Optional[FeedbackChannel] = None,
) -> TimingReport:
    """Run every mode once in ring order, honouring feedback branches.

    The buffer must be loaded; it is put in run mode and its tap must
    expose the first mode of the plan.
    """
    if buffer.mode != "run":
        buffer.set_mode("run")
    if buffer.exposed_label != plan.modes[0]:
        raise ValueError(f"buffer exposes {buffer.exposed_label!r}, plan starts with {plan.modes[0]!r}")
    timeline: List[Interval] = []
    violations: List[str] = []
    config_errors: List[str] = []
    # exact rational time so adjacent intervals abut exactly
    t = Fraction(0)
    rotations = 0
    budget = plan.decoherence_budget
    rot = buffer.rotation_time
    rot_q = _q(rot)

    def interval(event, mode, start, end, note=""):
        return Interval(event, mode, float(start), float(end - start), float(end), note)
    events = feedback.pending() if feedback else 0
    max_runs = 4 * (len(plan.modes) + events + 1)

    def record_rotation(note: str):
        nonlocal t, rotations
        timeline.append(interval(ROTATE, buffer.exposed_label, t, t + rot_q, note))
        t += rot_q
        rotations += 1
        overhead = rotations * rot
        if rot > budget:
            violations.append(f"rotation at {float(t - rot_q):.6g} s takes {rot:.6g} s, over the {budget:.6g} s budget")
        elif overhead > budget:
            violations.append(f"cumulative overhead {overhead:.6g} s exceeds {budget:.6g} s at {float(t):.6g} s")

    for _ in range(max_runs):
        mode = buffer.exposed_label
        if fabric is not None:
            try:
                configure(fabric, buffer.exposed_config)
            except ConfigError as err:
                config_errors.append(f"{mode}: {err}")
        duration = plan.durations.get(mode)
        if duration is None:
            raise KeyError(f"no run duration for mode {mode!r}")
        event = None
        if feedback is not None and feedback.pending() and _q(feedback.peek().time) < t + _q(duration):
            event = feedback.pop()
        end = max(t, _q(event.time)) if event else t + _q(duration)
        buffer.rql_on = True
        timeline.append(interval(RUN, mode, t, end, "cut short by feedback" if event else ""))
        t = end
        buffer.rql_on = False
        if event is not None:
            target = event.target or plan.branches.get(mode)
            if target is None:
                raise KeyError(f"feedback during {mode!r} but no branch target is defined")
            note = f"branch from {mode}"
            d = buffer.distance_to(target)
            if d is None:
                buffer.branch_to(target)  # spare config over the next stage, one rotation
                record_rotation(note)
            for _ in range(d or 0):
                buffer.rotate()
                record_rotation(note)
            continue
        if mode == plan.modes[-1]:
            break
        buffer.rotate()
        record_rotation("")
    else:
        raise RuntimeError("sequence did not reach its final mode")

    return TimingReport(timeline, rot, rotations, rotations * rot, budget, violations, config_errors, plan.rql_clock)
