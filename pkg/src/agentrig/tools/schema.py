"""AST-style validation of parsed calls against declared tool schemas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from agentrig.types import ToolCall, ToolSpec, values_equal

OK = "OK"
PARSE_ERROR = "PARSE_ERROR"
WRONG_FUNCTION = "WRONG_FUNCTION"
MISSING_PARAMETER = "MISSING_PARAMETER"
UNEXPECTED_PARAMETER = "UNEXPECTED_PARAMETER"
VALUE_ERROR = "VALUE_ERROR"
CALL_COUNT_ERROR = "CALL_COUNT_ERROR"

CATEGORIES = (
    OK,
    PARSE_ERROR,
    WRONG_FUNCTION,
    MISSING_PARAMETER,
    UNEXPECTED_PARAMETER,
    VALUE_ERROR,
    CALL_COUNT_ERROR,
)

# Figure-style coarse grouping: structural faults vs argument faults.
COARSE_MAP = {
    PARSE_ERROR: "schema",
    WRONG_FUNCTION: "schema",
    CALL_COUNT_ERROR: "schema",
    MISSING_PARAMETER: "parameter_value",
    UNEXPECTED_PARAMETER: "parameter_value",
    VALUE_ERROR: "parameter_value",
}

_TYPE_ALIASES = {
    "string": "string",
    "integer": "integer",
    "int": "integer",
    "float": "float",
    "number": "float",
    "boolean": "boolean",
    "bool": "boolean",
    "list": "list",
    "array": "list",
    "tuple": "list",
    "dict": "dict",
    "object": "dict",
    "any": "any",
}


@dataclass(frozen=True)
class ValidationVerdict:
    category: str
    detail: str = ""

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown verdict category: {self.category!r}")


def _tool_index(tools: Sequence[ToolSpec] | Mapping[str, ToolSpec]) -> Mapping[str, ToolSpec]:
    if isinstance(tools, Mapping):
        return tools
    return {t.name: t for t in tools}


def _type_ok(value: Any, schema: Mapping[str, Any]) -> str:
    """Empty string when the value fits; otherwise a short mismatch reason."""
    declared = _TYPE_ALIASES.get(str(schema.get("type", "any")).lower(), "any")
    if declared == "string":
        if not isinstance(value, str):
            return f"expected string, got {type(value).__name__}"
    elif declared == "integer":
        if isinstance(value, bool) or not isinstance(value, int):
            return f"expected integer, got {type(value).__name__}"
    elif declared == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return f"expected float, got {type(value).__name__}"
    elif declared == "boolean":
        if not isinstance(value, bool):
            return f"expected boolean, got {type(value).__name__}"
    elif declared == "list":
        if not isinstance(value, list):
            return f"expected list, got {type(value).__name__}"
        items = schema.get("items")
        if isinstance(items, Mapping):
            for pos, item in enumerate(value):
                reason = _type_ok(item, items)
                if reason:
                    return f"item {pos}: {reason}"
    elif declared == "dict":
        if not isinstance(value, dict):
            return f"expected dict, got {type(value).__name__}"
    if "enum" in schema:
        allowed = schema["enum"]
        if not any(values_equal(value, option) for option in allowed):
            return f"value {value!r} not in enum {allowed!r}"
    return ""


def validate_call(
    call: ToolCall,
    tools: Sequence[ToolSpec] | Mapping[str, ToolSpec],
) -> ValidationVerdict:
    """Check one call against the available tool schemas.

    Exactly one category comes back; precedence is WRONG_FUNCTION, then
    MISSING_PARAMETER (schema's required order), then UNEXPECTED_PARAMETER
    (call order), then VALUE_ERROR (call order), else OK.
    """
    index = _tool_index(tools)
    spec = index.get(call.function)
    if spec is None:
        return ValidationVerdict(WRONG_FUNCTION, f"function {call.function!r} is not available")
    for param in spec.required:
        if param not in call.arguments:
            return ValidationVerdict(
                MISSING_PARAMETER, f"{call.function}: required parameter {param!r} absent"
            )
    props = spec.properties
    for name in call.arguments:
        if name not in props:
            return ValidationVerdict(
                UNEXPECTED_PARAMETER, f"{call.function}: parameter {name!r} not declared"
            )
    for name, value in call.arguments.items():
        reason = _type_ok(value, props[name])
        if reason:
            return ValidationVerdict(VALUE_ERROR, f"{call.function}.{name}: {reason}")
    return ValidationVerdict(OK)


def validate_batch(
    calls: Sequence[ToolCall],
    tools: Sequence[ToolSpec] | Mapping[str, ToolSpec],
    expected_parallelism: int | None = None,
) -> list[ValidationVerdict]:
    """Validate a call batch; a wrong batch size preempts per-call verdicts."""
    if expected_parallelism is not None and len(calls) != expected_parallelism:
        return [
            ValidationVerdict(
                CALL_COUNT_ERROR,
                f"expected {expected_parallelism} calls, got {len(calls)}",
            )
        ]
    return [validate_call(call, tools) for call in calls]
