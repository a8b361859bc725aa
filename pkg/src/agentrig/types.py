"""Core data model shared by every other module.

All types are plain dataclasses, immutable after construction, and
serialize to JSON-compatible dicts via ``to_dict``/``from_dict``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

TASK_KINDS = frozenset({"embodied", "toolcall"})
EXIT_REASONS = frozenset({"goal", "step_limit", "early_exit", "backend_error"})
OUTCOMES = frozenset({"ok", "error"})


def check_value(value: Any) -> None:
    """Reject values outside the tool-argument domain.

    Allowed: str, int, bool, None, finite float, and lists/dicts of the same.
    """
    if value is None or isinstance(value, (str, bool, int)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float not allowed: {value!r}")
        return
    if isinstance(value, list):
        for item in value:
            check_value(item)
        return
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise ValueError(f"dict keys must be str, got {type(key).__name__}")
            check_value(item)
        return
    raise ValueError(f"unsupported value type: {type(value).__name__}")


def values_equal(a: Any, b: Any) -> bool:
    """Structural equality with strict scalar types: bool never equals int."""
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, list):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        if set(a) != set(b):
            return False
        return all(values_equal(a[k], b[k]) for k in a)
    return a == b


@dataclass(frozen=True)
class TaskSpec:
    """One evaluable task instance."""

    id: str
    kind: str
    instruction: str
    goal: str
    exemplar: str = ""
    env_name: str = ""
    step_limit: int = 30
    env_config: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("task id must be non-empty")
        if self.kind not in TASK_KINDS:
            raise ValueError(f"unknown task kind: {self.kind!r}")
        if self.step_limit < 1:
            raise ValueError("step_limit must be >= 1")
        if self.kind == "embodied" and not self.env_name:
            raise ValueError("embodied tasks need env_name")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "instruction": self.instruction,
            "goal": self.goal,
            "exemplar": self.exemplar,
            "env_name": self.env_name,
            "step_limit": self.step_limit,
            "env_config": dict(self.env_config),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TaskSpec":
        return cls(
            id=data["id"],
            kind=data["kind"],
            instruction=data["instruction"],
            goal=data["goal"],
            exemplar=data.get("exemplar", ""),
            env_name=data.get("env_name", ""),
            step_limit=data.get("step_limit", 30),
            env_config=dict(data.get("env_config", {})),
        )


@dataclass(frozen=True)
class Step:
    """One thought/action/observation triple; indices start at 1."""

    index: int
    thought: str
    action: str
    observation: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("step index must be >= 1")

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "thought": self.thought,
            "action": self.action,
            "observation": self.observation,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Step":
        return cls(
            index=data["index"],
            thought=data["thought"],
            action=data["action"],
            observation=data["observation"],
        )


@dataclass(frozen=True)
class Trajectory:
    """Ordered, contiguously indexed step sequence."""

    steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        for pos, step in enumerate(self.steps, start=1):
            if step.index != pos:
                raise ValueError(f"step {pos} has index {step.index}; must be contiguous from 1")

    def append(self, thought: str, action: str, observation: str) -> "Trajectory":
        step = Step(len(self.steps) + 1, thought, action, observation)
        return Trajectory(self.steps + (step,))

    def actions(self) -> list[str]:
        return [step.action for step in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Trajectory":
        return cls(tuple(Step.from_dict(s) for s in data["steps"]))


@dataclass(frozen=True)
class ToolSpec:
    """Callable tool description: name, prose description, parameter schema.

    ``parameters`` follows the usual shape: {"properties": {name: {"type": ...,
    "description": ..., "enum"?: [...], "items"?: {...}}}, "required": [...]}.
    """

    name: str
    description: str
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("tool name must be non-empty")
        props = self.parameters.get("properties", {})
        required = self.parameters.get("required", [])
        for param in required:
            if param not in props:
                raise ValueError(f"{self.name}: required parameter {param!r} not in properties")

    @property
    def properties(self) -> Mapping[str, Any]:
        return self.parameters.get("properties", {})

    @property
    def required(self) -> Sequence[str]:
        return self.parameters.get("required", [])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": dict(self.parameters),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ToolSpec":
        return cls(
            name=data["name"],
            description=data.get("description", ""),
            parameters=data.get("parameters", {}),
        )


@dataclass(frozen=True, eq=False)
class ToolCall:
    """A function name plus keyword arguments.

    Equality is structural with strict value types (bool != int) and is
    insensitive to argument order. Do not mutate ``arguments`` after
    construction.
    """

    function: str
    arguments: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.function:
            raise ValueError("function name must be non-empty")
        for name, value in self.arguments.items():
            if not isinstance(name, str) or not name:
                raise ValueError("argument names must be non-empty strings")
            check_value(value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ToolCall):
            return NotImplemented
        return self.function == other.function and values_equal(self.arguments, other.arguments)

    def to_dict(self) -> dict:
        return {"function": self.function, "arguments": dict(self.arguments)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ToolCall":
        return cls(function=data["function"], arguments=dict(data.get("arguments", {})))


@dataclass(frozen=True)
class ExecutionResult:
    """Outcome of executing one tool call."""

    call: ToolCall
    outcome: str
    payload: str = ""

    def __post_init__(self) -> None:
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome: {self.outcome!r}")
        if self.outcome == "error" and not self.payload:
            raise ValueError("error results need a non-empty payload")

    def to_dict(self) -> dict:
        return {"call": self.call.to_dict(), "outcome": self.outcome, "payload": self.payload}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExecutionResult":
        return cls(
            call=ToolCall.from_dict(data["call"]),
            outcome=data["outcome"],
            payload=data.get("payload", ""),
        )


@dataclass(frozen=True)
class UserTurn:
    """One user message in a tool-calling episode, with its golden calls."""

    message: str
    golden_calls: tuple[ToolCall, ...] = ()

    def to_dict(self) -> dict:
        return {"message": self.message, "golden_calls": [c.to_dict() for c in self.golden_calls]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "UserTurn":
        return cls(
            message=data["message"],
            golden_calls=tuple(ToolCall.from_dict(c) for c in data.get("golden_calls", [])),
        )


@dataclass(frozen=True)
class ExchangeRecord:
    """One model output inside a turn: raw text, optional edit, parsed calls."""

    raw: str
    edited: str | None = None
    calls: tuple[str, ...] = ()
    verdicts: tuple[str, ...] = ()
    results: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "raw": self.raw,
            "edited": self.edited,
            "calls": list(self.calls),
            "verdicts": list(self.verdicts),
            "results": list(self.results),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExchangeRecord":
        return cls(
            raw=data["raw"],
            edited=data.get("edited"),
            calls=tuple(data.get("calls", [])),
            verdicts=tuple(data.get("verdicts", [])),
            results=tuple(data.get("results", [])),
        )


@dataclass(frozen=True)
class TurnRecord:
    """One judged user turn of a tool-calling episode."""

    message: str
    exchanges: tuple[ExchangeRecord, ...] = ()
    judged: bool = False

    def to_dict(self) -> dict:
        return {
            "message": self.message,
            "exchanges": [e.to_dict() for e in self.exchanges],
            "judged": self.judged,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TurnRecord":
        return cls(
            message=data["message"],
            exchanges=tuple(ExchangeRecord.from_dict(e) for e in data.get("exchanges", [])),
            judged=data.get("judged", False),
        )


@dataclass(frozen=True)
class EpisodeRecord:
    """Everything the metrics engine needs about one finished episode.

    ``steps`` holds Step entries for embodied episodes and TurnRecord entries
    for tool-calling episodes.
    """

    task_id: str
    seed: int
    suite: str
    steps: tuple = ()
    success: bool = False
    progress: float = 0.0
    generated_tokens: int = 0
    wall_seconds: float = 0.0
    module_config: Mapping[str, Any] = field(default_factory=dict)
    exit_reason: str = "goal"
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "seed": self.seed,
            "suite": self.suite,
            "steps": [s.to_dict() for s in self.steps],
            "success": self.success,
            "progress": self.progress,
            "generated_tokens": self.generated_tokens,
            "wall_seconds": self.wall_seconds,
            "module_config": dict(self.module_config),
            "exit_reason": self.exit_reason,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EpisodeRecord":
        steps: list = []
        for entry in data.get("steps", []):
            if "index" in entry:
                steps.append(Step.from_dict(entry))
            else:
                steps.append(TurnRecord.from_dict(entry))
        return cls(
            task_id=data["task_id"],
            seed=data["seed"],
            suite=data.get("suite", ""),
            steps=tuple(steps),
            success=data["success"],
            progress=data["progress"],
            generated_tokens=data.get("generated_tokens", 0),
            wall_seconds=data.get("wall_seconds", 0.0),
            module_config=data.get("module_config", {}),
            exit_reason=data.get("exit_reason", "goal"),
            error=data.get("error", ""),
        )


def validate_record(record: EpisodeRecord) -> list[str]:
    """Return a list of invariant violations; empty means the record is sound."""
    problems: list[str] = []
    if not record.task_id:
        problems.append("task_id is empty")
    if not 0.0 <= record.progress <= 1.0:
        problems.append(f"progress {record.progress} outside [0, 1]")
    if record.success and record.progress != 1.0:
        problems.append("success requires progress == 1.0")
    if record.exit_reason not in EXIT_REASONS:
        problems.append(f"unknown exit_reason: {record.exit_reason!r}")
    if record.generated_tokens < 0:
        problems.append("generated_tokens is negative")
    if record.wall_seconds < 0.0:
        problems.append("wall_seconds is negative")
    kinds = {type(s) for s in record.steps}
    if len(kinds) > 1:
        problems.append("steps mixes embodied and toolcall entries")
    if kinds == {Step}:
        for pos, step in enumerate(record.steps, start=1):
            if step.index != pos:
                problems.append(f"step {pos} has index {step.index}")
                break
    return problems
