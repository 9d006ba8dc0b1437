"""Envelope-level model of the stored-waveform microwave chain.

Digitally encoded waveforms stream out of the store into a superconducting
DAC, whose current sets the flux bias of an SPST microwave switch gating a
carrier. Only envelopes are modeled; no carrier is synthesized.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Sequence

import numpy as np

CARRIER_BAND = (1e9, 50e9)  # Hz
BURST_RANGE = (10e-9, 1e-6)  # s


@dataclass(frozen=True)
class WaveformTable:
    samples: tuple
    sample_rate: float
    bit_depth: int

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(int(s) for s in self.samples))
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if not 1 <= self.bit_depth <= 32:
            raise ValueError("bit_depth must lie in 1..32")
        top = self.max_code
        bad = [s for s in self.samples if not 0 <= s <= top]
        if bad:
            raise ValueError(f"codes {bad[:5]} outside 0..{top}")

    @property
    def max_code(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @classmethod
    def from_csv(cls, path, sample_rate: float, bit_depth: int) -> "WaveformTable":
        """One integer code per line; blank lines and '#' comments are skipped."""
        codes = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                    continue
                codes.append(int(row[0]))
        return cls(tuple(codes), sample_rate, bit_depth)


def dac_convert(table: WaveformTable, full_scale: float) -> np.ndarray:
    """Linear code-to-current map: I = full_scale * code / (2**bits - 1)."""
    return full_scale * np.asarray(table.samples, dtype=float) / table.max_code


@dataclass(frozen=True)
class SpstSwitch:
    """Flux-biased switch whose transmission rises linearly with bias current up to ``full_on_current``."""

    full_on_current: float = 1e-3
    carrier_amplitude: float = 1.0

    def __post_init__(self):
        if self.full_on_current <= 0:
            raise ValueError("full_on_current must be > 0")

    def transmission(self, current: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(current, dtype=float) / self.full_on_current, 0.0, 1.0)


def modulate(
    envelope: Sequence[float],
    carrier_freq: float,
    sample_rate: float,
    switch: Optional[SpstSwitch] = None,
) -> np.ndarray:
    """Output envelope of the carrier after the switch, one value per input sample."""
    lo, hi = CARRIER_BAND
    if not lo <= carrier_freq <= hi:
        raise ValueError(f"carrier {carrier_freq:g} Hz outside {lo:g}..{hi:g} Hz")
    if sample_rate <= 0:
        raise ValueError("sample_rate must be > 0")
    duration = len(envelope) / sample_rate
    blo, bhi = BURST_RANGE
    if not blo <= duration <= bhi:
        raise ValueError(f"burst of {duration:g} s outside {blo:g}..{bhi:g} s")
    sw = switch or SpstSwitch()
    return sw.carrier_amplitude * sw.transmission(envelope)


@dataclass(frozen=True)
class FeedbackEvent:
    time: float
    label: str = "branch"
    target: Optional[str] = None  # configuration to branch to, if named


@dataclass
class FeedbackChannel:
    """FIFO from the fast electronics back to the reconfiguration controller."""

    _queue: Deque[FeedbackEvent] = field(default_factory=deque)

    def inject(self, event: FeedbackEvent) -> None:
        self._queue.append(event)

    def pending(self) -> int:
        return len(self._queue)

    def peek(self) -> Optional[FeedbackEvent]:
        return self._queue[0] if self._queue else None

    def pop(self) -> FeedbackEvent:
        return self._queue.popleft()

    def drain(self) -> List[FeedbackEvent]:
        out = list(self._queue)
        self._queue.clear()
        return out


def feedback_inject(channel: FeedbackChannel, event: FeedbackEvent) -> FeedbackChannel:
    channel.inject(event)
    return channel
