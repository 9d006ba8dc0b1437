"""Four-stage cyclic configuration buffer in front of the fabric.

The buffer is a k-bit wide, four-deep shift register closed into a ring.
The stage at the physical tap configures the fabric; each rotation clock
advances the ring by one stage. Loading goes through a serial path from
the store while the buffer is in load mode.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Sequence, Tuple

from .fabric import BitsLike, ConfigError, _to_bits

STAGES = 4
DEFAULT_MODES = ("calibration", "initialization", "arithmetic", "readout")


class MutualExclusionError(RuntimeError):
    """Buffer rotation requested while the superconducting clock is running."""


class ModeError(RuntimeError):
    pass


@dataclass
class ConfigBuffer:
    width: int  # k
    rotation_clock: float = 4e6
    load_clock: float = 4e6  # serial load rate, bits per second
    mode: str = "load"
    rql_on: bool = False
    elapsed: float = 0.0  # s spent rotating
    rotations: int = 0
    _stages: Deque[Tuple[str, Tuple[int, ...]]] = field(default_factory=deque)
    _exposed: int = 0  # logical index of the stage at the tap
    spare: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("buffer width must be >= 1")
        if self.rotation_clock <= 0 or self.load_clock <= 0:
            raise ValueError("clocks must be > 0")
        if self.mode not in ("load", "run"):
            raise ModeError(f"unknown mux mode {self.mode!r}")

    @property
    def rotation_time(self) -> float:
        return 1.0 / self.rotation_clock

    @property
    def load_time(self) -> float:
        return STAGES * self.width / self.load_clock

    @property
    def exposed_stage(self) -> int:
        return self._exposed

    @property
    def exposed_label(self) -> str:
        return self._stages[0][0]

    @property
    def exposed_config(self) -> Tuple[int, ...]:
        return self._stages[0][1]

    def labels(self) -> List[str]:
        """Stage labels in ring order starting at the tap."""
        return [lbl for lbl, _ in self._stages]

    def contents(self) -> List[Tuple[int, ...]]:
        """Stage contents in load order (independent of rotation)."""
        ring = list(self._stages)
        shift = self._exposed
        return [ring[(i - shift) % STAGES][1] for i in range(STAGES)]

    def _check(self, bits: BitsLike) -> Tuple[int, ...]:
        b = _to_bits(bits)
        if len(b) != self.width:
            raise ConfigError(f"configuration has {len(b)} bits, buffer is {self.width} wide")
        return b

    def load(self, configs: Sequence[BitsLike], labels: Sequence[str] = DEFAULT_MODES) -> float:
        """Fill all four stages; returns the serial load time in seconds."""
        if self.mode != "load":
            raise ModeError("buffer must be in load mode to load configurations")
        if len(configs) != STAGES or len(labels) != STAGES:
            raise ConfigError(f"exactly {STAGES} configurations and labels are required")
        if len(set(labels)) != STAGES:
            raise ConfigError("stage labels must be distinct")
        self._stages = deque((str(lbl), self._check(c)) for lbl, c in zip(labels, configs))
        self._exposed = 0
        return self.load_time

    def add_spare(self, label: str, bits: BitsLike):
        self.spare[label] = self._check(bits)

    def set_mode(self, mode: str):
        if mode not in ("load", "run"):
            raise ModeError(f"unknown mux mode {mode!r}")
        if mode == "run" and len(self._stages) != STAGES:
            raise ModeError("load the buffer before switching to run mode")
        self.mode = mode

    def rotate(self) -> float:
        """Advance one stage; returns the time it took."""
        if self.mode != "run":
            raise ModeError("rotation needs run mode")
        if self.rql_on:
            raise MutualExclusionError("cannot rotate the configuration buffer while the RQL clock is on")
        self._stages.rotate(-1)
        self._exposed = (self._exposed + 1) % STAGES
        self.rotations += 1
        self.elapsed += self.rotation_time
        return self.rotation_time

    def distance_to(self, label: str) -> Optional[int]:
        labels = self.labels()
        return labels.index(label) if label in labels else None

    def branch_to(self, target: str) -> int:
        """Rotate until ``target`` is exposed; returns the number of rotations.

        A target that is not in the ring is copied from the spare store over
        the next stage, which is then exposed with one rotation.
        """
        if self.mode != "run":
            raise ModeError("branching needs run mode")
        d = self.distance_to(target)
        if d is None:
            if target not in self.spare:
                raise KeyError(f"unknown configuration {target!r}")
            self._stages[1] = (target, self.spare[target])
            d = 1
        for _ in range(d):
            self.rotate()
        return d
