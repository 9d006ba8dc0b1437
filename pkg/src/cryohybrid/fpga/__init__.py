"""Configurable fabric, cyclic configuration buffer and timed reconfiguration sequence."""

from .buffer import DEFAULT_MODES, STAGES, ConfigBuffer, ModeError, MutualExclusionError
from .fabric import (
    AdderLayout,
    ClbFunction,
    ConfigError,
    ConfiguredFabric,
    Fabric,
    Route,
    clb_outputs,
    configure,
    evaluate,
    from_hex,
    ripple_adder_2bit,
    to_hex,
)
from .sequence import ROTATE, RUN, Interval, SequencePlan, TimingReport, run_sequence

__all__ = [
    "DEFAULT_MODES", "ROTATE", "RUN", "STAGES",
    "AdderLayout", "ClbFunction", "ConfigBuffer", "ConfigError", "ConfiguredFabric", "Fabric",
    "Interval", "ModeError", "MutualExclusionError", "Route", "SequencePlan", "TimingReport",
    "clb_outputs", "configure", "evaluate", "from_hex", "ripple_adder_2bit", "run_sequence", "to_hex",
]
