"""Parallel-decoding schedules (threshold/factor gates, remasking, blocks)."""

from agentrig.denoise._kernels import BACKEND as KERNEL_BACKEND
from agentrig.denoise.scheduler import (
    MASK,
    CommitEvent,
    DecodeResult,
    DenoiseState,
    GateConfig,
    LookupPredictor,
    MaskPredictor,
    SeededPredictor,
    best_token,
    block_decode,
    factor_unmask,
    gate_positions,
    low_confidence_remask,
    plan_reverse_schedule,
    reverse_denoise,
    threshold_unmask,
)

__all__ = [
    "KERNEL_BACKEND",
    "MASK",
    "CommitEvent",
    "DecodeResult",
    "DenoiseState",
    "GateConfig",
    "LookupPredictor",
    "MaskPredictor",
    "SeededPredictor",
    "best_token",
    "block_decode",
    "factor_unmask",
    "gate_positions",
    "low_confidence_remask",
    "plan_reverse_schedule",
    "reverse_denoise",
    "threshold_unmask",
]
