"""Control-signal grid protocol, adiabatic SRAM and conversion elements."""

from .convert import SfetModel, SfqPulse, Transmission, pass_gate, sfet_output, sfq_transmit
from .grid import ANALOG_LIMIT, CellGrid, ProtocolError, Stage, StepRecord, TapKind, UpdateSession
from .sram import SramCell, SramUpdate, sram_update

__all__ = [
    "ANALOG_LIMIT", "CellGrid", "ProtocolError", "SfetModel", "SfqPulse", "SramCell", "SramUpdate",
    "Stage", "StepRecord", "TapKind", "Transmission", "UpdateSession",
    "pass_gate", "sfet_output", "sfq_transmit", "sram_update",
]
