"""Sequential-storage pipeline and stored-waveform microwave chain."""

from .microwave import (
    BURST_RANGE,
    CARRIER_BAND,
    FeedbackChannel,
    FeedbackEvent,
    SpstSwitch,
    WaveformTable,
    dac_convert,
    feedback_inject,
    modulate,
)
from .pipeline import (
    Boundary,
    MuxStage,
    PipelineReport,
    Store,
    StorePlan,
    build_chain,
    check_chain,
    load_store,
    read_bits,
    run_pipeline,
    write_bits,
)

__all__ = [
    "BURST_RANGE", "Boundary", "CARRIER_BAND", "FeedbackChannel", "FeedbackEvent", "MuxStage",
    "PipelineReport", "SpstSwitch", "Store", "StorePlan", "WaveformTable",
    "build_chain", "check_chain", "dac_convert", "feedback_inject", "load_store", "modulate",
    "read_bits", "run_pipeline", "write_bits",
]
