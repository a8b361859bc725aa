"""Parallel-decoding schedules over an abstract mask predictor.

The schedulers decide which masked positions to commit each reverse step:

- threshold gate: commit every position whose best-token confidence clears
  tau, or the single argmax when none does;
- factor gate: commit the top-K ranked positions for the largest K with
  (K+1) * (1 - k_th confidence) < gamma, argmax fallback at K=0;
- low-confidence remasking: re-mask the r least confident commits;
- uniform reverse schedule: spread L commits over T steps;
- block decode: append fixed-size masked blocks, gate-commit until each block
  is done, stop at the earliest EOS.

Everything here is pure; tie-breaks go to the lowest index / lexicographically
smallest token so results are identical everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

from agentrig.denoise._kernels import kernel_factor, kernel_smallest, kernel_threshold
from agentrig.sampling import SplitMix64, derive_seed

MASK = None

GATE_MODES = ("threshold", "factor")


@dataclass(frozen=True)
class GateConfig:
    mode: str = "threshold"
    tau: float = 0.9
    gamma: float = 0.3

    def __post_init__(self) -> None:
        if self.mode not in GATE_MODES:
            raise ValueError(f"unknown gate mode: {self.mode!r}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must be in (0, 1]")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be > 0")


@dataclass(frozen=True)
class DenoiseState:
    """Token buffer mid-denoise: MASK (None) marks uncommitted positions."""

    tokens: tuple
    confidences: Mapping[int, float] = field(default_factory=dict)
    step: int = 0

    def __post_init__(self) -> None:
        masked = {i for i, t in enumerate(self.tokens) if t is MASK}
        for position, confidence in self.confidences.items():
            if position not in masked:
                raise ValueError(f"confidence at unmasked position {position}")
            if not 0.0 <= confidence <= 1.0:
                raise ValueError(f"confidence {confidence} outside [0, 1]")

    def masked_positions(self) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t is MASK]


def _split(confidences) -> tuple[list[int], list[float]]:
    """Normalize mapping or sequence input to (positions, values)."""
    if isinstance(confidences, Mapping):
        if not confidences:
            raise ValueError("confidences must be nonempty")
        positions = sorted(confidences)
        return positions, [confidences[p] for p in positions]
    values = list(confidences)
    if not values:
        raise ValueError("confidences must be nonempty")
    return list(range(len(values))), values


def threshold_unmask(confidences, cfg: GateConfig) -> set[int]:
    """Positions clearing tau; the lowest-index argmax when none does."""
    positions, values = _split(confidences)
    return {positions[i] for i in kernel_threshold(values, cfg.tau)}


def factor_unmask(confidences, cfg: GateConfig) -> set[int]:
    """Top-K positions under the factor rule; argmax fallback at K=0."""
    positions, values = _split(confidences)
    return {positions[i] for i in kernel_factor(values, cfg.gamma)}


def gate_positions(confidences, cfg: GateConfig) -> set[int]:
    if cfg.mode == "threshold":
        return threshold_unmask(confidences, cfg)
    return factor_unmask(confidences, cfg)


def low_confidence_remask(confidences, r: int) -> set[int]:
    """The r positions with the smallest confidence (ties to lowest index)."""
    if r == 0:
        return set()
    positions, values = _split(confidences)
    if r < 0 or r > len(values):
        raise ValueError(f"r={r} outside [0, {len(values)}]")
    return {positions[i] for i in kernel_smallest(values, r)}


def plan_reverse_schedule(length: int, steps: int) -> list[int]:
    """Per-step commit counts, as uniform as possible, summing to length."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if not 1 <= steps <= length:
        raise ValueError("steps must be in [1, length]")
    base, remainder = divmod(length, steps)
    return [base + 1] * remainder + [base] * (steps - remainder)


class MaskPredictor(Protocol):
    """Per-position token distributions for the masked slots of ``tokens``."""

    def predict(
        self, prompt: Sequence[str], tokens: Sequence
    ) -> Mapping[int, Mapping[str, float]]:
        ...


@dataclass(frozen=True)
class LookupPredictor:
    """Static position-indexed distributions; the deterministic test model."""

    table: Mapping[int, Mapping[str, float]]
    default: Mapping[str, float] = field(default_factory=lambda: {"the": 1.0})

    def predict(self, prompt, tokens):
        out = {}
        for position, token in enumerate(tokens):
            if token is MASK:
                out[position] = self.table.get(position, self.default)
        return out


@dataclass(frozen=True)
class SeededPredictor:
    """Random but reproducible distributions keyed on (seed, position).

    Emits ``eos_token`` with probability 1.0 at ``eos_position`` when set,
    otherwise mixes it into the vocabulary at ``eos_weight``.
    """

    seed: int
    vocab: tuple[str, ...] = ("alpha", "beta", "gamma", "delta")
    eos_token: str = "<eos>"
    eos_position: int | None = None
    eos_weight: float = 0.0

    def predict(self, prompt, tokens):
        out = {}
        for position, token in enumerate(tokens):
            if token is not MASK:
                continue
            if position == self.eos_position:
                out[position] = {self.eos_token: 1.0}
                continue
            rng = SplitMix64(derive_seed(self.seed, f"pos:{position}"))
            weights = [rng.random() + 1e-9 for _ in self.vocab]
            if self.eos_weight > 0.0:
                weights.append(self.eos_weight)
                names = self.vocab + (self.eos_token,)
            else:
                names = self.vocab
            total = sum(weights)
            out[position] = {name: w / total for name, w in zip(names, weights)}
        return out


def best_token(distribution: Mapping[str, float]) -> tuple[str, float]:
    """Highest-probability token; ties to the lexicographically smallest."""
    if not distribution:
        raise ValueError("empty distribution")
    token = min(distribution, key=lambda t: (-distribution[t], t))
    return token, distribution[token]


def reverse_denoise(
    predictor: MaskPredictor,
    prompt: Sequence[str],
    length: int,
    steps: int,
    eos_token: str | None = None,
) -> list:
    """Fixed-length reverse loop with low-confidence remasking.

    Every step predicts all masked positions, keeps the scheduled number of
    highest-confidence commits, and remasks the rest; committed and remasked
    sets are disjoint by construction.
    """
    schedule = plan_reverse_schedule(length, steps)
    tokens: list = [MASK] * length
    for budget in schedule:
        predictions = predictor.predict(prompt, tokens)
        masked = [i for i, t in enumerate(tokens) if t is MASK]
        choices = {pos: best_token(predictions[pos]) for pos in masked}
        confidences = {pos: choices[pos][1] for pos in masked}
        remasked = low_confidence_remask(confidences, len(masked) - budget)
        for pos in masked:
            if pos not in remasked:
                tokens[pos] = choices[pos][0]
    if eos_token is not None and eos_token in tokens:
        tokens = tokens[: tokens.index(eos_token)]
    return tokens


@dataclass(frozen=True)
class CommitEvent:
    """One committed position, for decode traces and the demo CSV."""

    block: int
    iteration: int
    position: int
    token: str
    confidence: float


@dataclass(frozen=True)
class DecodeResult:
    tokens: tuple
    truncated: bool
    trace: tuple[CommitEvent, ...] = ()


def block_decode(
    predictor: MaskPredictor,
    prompt: Sequence[str],
    block_size: int,
    gate: GateConfig,
    max_blocks: int,
    eos_token: str = "<eos>",
) -> DecodeResult:
    """Append masked blocks and gate-commit until the earliest EOS.

    Each block finishes in at most block_size iterations because every gate
    call commits at least one position. Output excludes the EOS token; running
    out of blocks without an EOS sets the truncated flag.
    """
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    if max_blocks < 1:
        raise ValueError("max_blocks must be >= 1")
    tokens: list = []
    trace: list[CommitEvent] = []
    for block in range(max_blocks):
        base = len(tokens)
        tokens.extend([MASK] * block_size)
        iteration = 0
        while any(t is MASK for t in tokens[base:]):
            if iteration >= block_size:
                raise AssertionError("gate failed to progress within the block")
            predictions = predictor.predict(prompt, tokens)
            block_conf: dict[int, float] = {}
            block_best: dict[int, str] = {}
            for pos in range(base, base + block_size):
                if tokens[pos] is MASK:
                    token, confidence = best_token(predictions[pos])
                    block_best[pos] = token
                    block_conf[pos] = confidence
            for pos in sorted(gate_positions(block_conf, gate)):
                tokens[pos] = block_best[pos]
                trace.append(CommitEvent(block, iteration, pos, block_best[pos], block_conf[pos]))
            iteration += 1
        for pos in range(base, base + block_size):
            if tokens[pos] == eos_token:
                return DecodeResult(tuple(tokens[:pos]), False, tuple(trace))
    return DecodeResult(tuple(tokens), True, tuple(trace))
