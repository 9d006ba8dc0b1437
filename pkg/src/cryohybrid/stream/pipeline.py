"""Wide slow storage feeding a chain of multiplexers into a fast narrow stream.

The store is a shift register of fixed-width words clocked slowly. Each
mux stage takes one word of ``input_width`` bits per input tick and emits
it as ``ratio`` narrower words, one per tick of its faster output clock.
The simulation is event driven on exact rational time, so bandwidths and
latencies come out as exact fractions.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

import numpy as np

DEFAULT_MAX_DEPTH = 10_000


@dataclass(frozen=True)
class StorePlan:
    word_width: int = 2000
    depth: int = 1
    clock: float = 4e6
    loopback: bool = False
    max_depth: int = DEFAULT_MAX_DEPTH  # chip size limit

    def __post_init__(self):
        if self.word_width < 1:
            raise ValueError("word_width must be >= 1")
        if self.clock <= 0:
            raise ValueError("clock must be > 0")
        if not 1 <= self.depth <= self.max_depth:
            raise ValueError(f"depth must lie in 1..{self.max_depth}")

    @property
    def bandwidth(self) -> float:
        return self.word_width * self.clock


class Store:
    """Loaded word store; reads advance a cursor, wrapping when looped back."""

    def __init__(self, plan: StorePlan, words: np.ndarray):
        self.plan = plan
        self.words = words
        self.cursor = 0

    def __len__(self):
        return len(self.words)

    def read(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be >= 0")
        count = len(self.words)
        if self.plan.loopback:
            idx = (self.cursor + np.arange(n)) % count
        else:
            if self.cursor + n > count:
                raise IndexError(f"store holds {count} words; cannot read {n} more from position {self.cursor}")
            idx = self.cursor + np.arange(n)
        self.cursor = int((self.cursor + n) % count) if self.plan.loopback else self.cursor + n
        return self.words[idx]

    def rewind(self):
        self.cursor = 0


def load_store(plan: StorePlan, words: Iterable[Sequence[int]]) -> Store:
    rows = [np.asarray(w, dtype=np.uint8) for w in words]
    if not rows:
        raise ValueError("at least one word is required")
    if len(rows) > plan.depth:
        raise ValueError(f"{len(rows)} words exceed the store depth {plan.depth}")
    for i, w in enumerate(rows):
        if w.ndim != 1 or len(w) != plan.word_width:
            raise ValueError(f"word {i} has {w.size} bits, expected {plan.word_width}")
        if np.any(w > 1):
            raise ValueError(f"word {i} contains values other than 0 and 1")
    return Store(plan, np.stack(rows))


@dataclass(frozen=True)
class MuxStage:
    ratio: int
    input_width: int
    input_clock: float

    def __post_init__(self):
        if self.ratio < 1:
            raise ValueError("mux ratio must be >= 1")
        if self.input_width % self.ratio:
            raise ValueError(f"input width {self.input_width} is not divisible by ratio {self.ratio}")

    @property
    def output_width(self) -> int:
        return self.input_width // self.ratio

    @property
    def output_clock(self) -> float:
        return self.input_clock * self.ratio

    @property
    def gate_count(self) -> int:
        # one transmission element per input line
        return self.ratio * self.output_width


def build_chain(plan: StorePlan, ratios: Sequence[int]) -> List[MuxStage]:
    stages = []
    width, clock = plan.word_width, plan.clock
    for r in ratios:
        st = MuxStage(r, width, clock)
        stages.append(st)
        width, clock = st.output_width, st.output_clock
    return stages


def check_chain(plan: StorePlan, stages: Sequence[MuxStage]):
    width, clock = plan.word_width, plan.clock
    for i, st in enumerate(stages):
        if st.input_width != width or not math.isclose(st.input_clock, clock, rel_tol=1e-12):
            raise ValueError(
                f"mux stage {i} expects {st.input_width} b at {st.input_clock:g} Hz "
                f"but receives {width} b at {clock:g} Hz"
            )
        width, clock = st.output_width, st.output_clock


@dataclass(frozen=True)
class Boundary:
    name: str
    width: int
    clock: float
    nominal_bandwidth: float  # width x clock, bit/s
    measured_bandwidth: Fraction  # bits delivered / time spanned, from the event log
    gate_ops: int
    energy_per_op: Optional[float]

    @property
    def energy(self) -> Optional[float]:
        return None if self.energy_per_op is None else self.gate_ops * self.energy_per_op


@dataclass
class PipelineReport:
    boundaries: List[Boundary]
    latency: Fraction  # s, first bit into the store output to first bit out of the chain
    latency_bound: Fraction
    receivers: int  # lines crossing into the fast domain
    receivers_without_mux: int
    duration: Fraction  # s, simulated span
    power: Optional[float] = None  # W, attributed switching power

    @property
    def latency_within_bound(self) -> bool:
        return self.latency <= self.latency_bound


def _period(clock: float) -> Fraction:
    return 1 / Fraction(clock).limit_denominator(10**12)


def run_pipeline(
    store: Store,
    stages: Sequence[MuxStage],
    n_output_ticks: int,
    energy_per_op: Optional[Sequence[float]] = None,
) -> "tuple[np.ndarray, PipelineReport]":
    """Stream ``n_output_ticks`` final-stage words out of the chain.

    ``energy_per_op`` gives the per-gate switching energy for the store
    followed by each mux level; with it the report attributes power.
    """
    plan = store.plan
    check_chain(plan, stages)
    if n_output_ticks < 1:
        raise ValueError("n_output_ticks must be >= 1")
    if energy_per_op is not None and len(energy_per_op) != len(stages) + 1:
        raise ValueError("energy_per_op needs one entry for the store and one per mux stage")
    fanout = math.prod(s.ratio for s in stages)
    n_words = -(-n_output_ticks // fanout)
    words = store.read(n_words)

    t_store = _period(plan.clock)
    periods = [_period(s.output_clock) for s in stages]
    widths = [plan.word_width] + [s.output_width for s in stages]

    # (time, seq, level, bits): level 0 is the store output, level i the output of stage i
    queue: list = []
    seq = 0
    for k in range(n_words):
        heapq.heappush(queue, ((k + 1) * t_store, seq, 0, words[k]))
        seq += 1
    emitted: List[List[Fraction]] = [[] for _ in widths]
    ops = [0] * len(widths)
    out_chunks = []
    last = len(stages)
    while queue:
        t, _, level, bits = heapq.heappop(queue)
        emitted[level].append(t)
        if level == 0:
            ops[0] += plan.word_width * plan.depth  # every stored bit shifts
        if level == last:
            out_chunks.append(bits)
            if len(out_chunks) == n_output_ticks:
                break
            continue
        st = stages[level]
        ops[level + 1] += st.gate_count
        w = st.output_width
        for j in range(st.ratio):
            heapq.heappush(queue, (t + (j + 1) * periods[level], seq, level + 1, bits[j * w : (j + 1) * w]))
            seq += 1

    stream = np.concatenate(out_chunks) if out_chunks else np.zeros(0, np.uint8)
    end = emitted[last][-1]
    boundaries = []
    names = ["store"] + [f"mux{i + 1}" for i in range(len(stages))]
    clocks = [plan.clock] + [s.output_clock for s in stages]
    all_periods = [t_store] + periods
    for i, name in enumerate(names):
        times = [t for t in emitted[i] if t <= end] if i < last else emitted[i]
        n = len(times)
        span = times[-1] - times[0] + all_periods[i]
        boundaries.append(
            Boundary(
                name,
                widths[i],
                clocks[i],
                widths[i] * clocks[i],
                Fraction(n * widths[i]) / span,
                ops[i],
                None if energy_per_op is None else energy_per_op[i],
            )
        )
    latency = emitted[last][0]
    bound = t_store + sum(periods, Fraction(0)) + (periods[-1] if periods else t_store)
    report = PipelineReport(
        boundaries=boundaries,
        latency=latency,
        latency_bound=bound,
        receivers=widths[-1],
        receivers_without_mux=plan.word_width,
        duration=end,
    )
    if energy_per_op is not None:
        report.power = sum(b.energy for b in boundaries) / float(end)
    return stream, report


def write_bits(path, bits: np.ndarray):
    """Write a bit stream packed MSB-first, eight bits per byte."""
    with open(path, "wb") as fh:
        fh.write(np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes())


def read_bits(path, n_bits: int) -> np.ndarray:
    with open(path, "rb") as fh:
        data = np.frombuffer(fh.read(), dtype=np.uint8)
    return np.unpackbits(data)[:n_bits]
