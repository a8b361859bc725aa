"""Tool-calling engine: grammar, schema checks, mock world, modules, loop."""

from __future__ import annotations

from .modules import (
    EditOutcome,
    RuleBasedEditorBackend,
    classify_relevance,
    edit_tool_call,
    render_tool_descriptions,
    rule_based_repair,
    select_tools,
)
from .parser import ToolCallParseError, parse_tool_calls, render_call, render_tool_calls
from .runner import ToolLimits, ToolWiring, run_tool_episode
from .schema import (
    CALL_COUNT_ERROR,
    COARSE_MAP,
    MISSING_PARAMETER,
    OK,
    PARSE_ERROR,
    UNEXPECTED_PARAMETER,
    VALUE_ERROR,
    WRONG_FUNCTION,
    ValidationVerdict,
    validate_batch,
    validate_call,
)
from .suite import (
    COUNT_CHECKED_CATEGORIES,
    RELEVANCE_MODES,
    SUITE_CATEGORIES,
    ToolSuite,
    load_suite,
    load_suites,
    suite_from_dict,
)
from .world import (
    LITERS_PER_GALLON,
    MockWorld,
    ToolError,
    execute_calls,
    is_pure_tool,
    judge_turn,
    render_payload,
)

__all__ = [
    "CALL_COUNT_ERROR",
    "COARSE_MAP",
    "COUNT_CHECKED_CATEGORIES",
    "EditOutcome",
    "LITERS_PER_GALLON",
    "MISSING_PARAMETER",
    "MockWorld",
    "OK",
    "PARSE_ERROR",
    "RELEVANCE_MODES",
    "RuleBasedEditorBackend",
    "SUITE_CATEGORIES",
    "ToolCallParseError",
    "ToolError",
    "ToolLimits",
    "ToolSuite",
    "ToolWiring",
    "UNEXPECTED_PARAMETER",
    "VALUE_ERROR",
    "ValidationVerdict",
    "WRONG_FUNCTION",
    "classify_relevance",
    "edit_tool_call",
    "execute_calls",
    "is_pure_tool",
    "judge_turn",
    "load_suite",
    "load_suites",
    "parse_tool_calls",
    "render_call",
    "render_payload",
    "render_tool_calls",
    "render_tool_descriptions",
    "rule_based_repair",
    "run_tool_episode",
    "select_tools",
    "suite_from_dict",
    "validate_batch",
    "validate_call",
]
