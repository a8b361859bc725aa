"""Tool-calling task suites and their JSON file format.

A suite bundles the tool inventory D, the scripted user turns with their
golden calls, a category label, the relevance expectation, and initial
world-state overrides.  Golden calls are stored in the same bracketed
grammar the agent emits; a turn may hold several golden batches, which
the loader parses and flattens in order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..types import ToolCall, ToolSpec, UserTurn
from .parser import parse_tool_calls

SUITE_CATEGORIES = (
    "simple",
    "java",
    "javascript",
    "multiple",
    "parallel",
    "parallel_multiple",
    "live_simple",
    "live_multiple",
    "live_parallel",
    "live_parallel_multiple",
    "multi_turn_base",
    "multi_turn_miss_func",
    "multi_turn_miss_param",
    "multi_turn_long_context",
    "live_relevance",
    "irrelevance",
    "live_irrelevance",
)

RELEVANCE_MODES = ("call_required", "no_call_required", "n/a")

# Categories whose golden batch fixes the exact number of calls expected.
COUNT_CHECKED_CATEGORIES = ("parallel", "parallel_multiple")


@dataclass(frozen=True)
class ToolSuite:
    """One tool-calling task: inventory, turns, category, expectations."""

    id: str
    category: str
    tools: tuple[ToolSpec, ...]
    turns: tuple[UserTurn, ...]
    relevance_expected: str = "n/a"
    initial_world: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("suite id must be non-empty")
        if self.category not in SUITE_CATEGORIES:
            raise ValueError(f"unknown suite category: {self.category!r}")
        if self.relevance_expected not in RELEVANCE_MODES:
            raise ValueError(f"unknown relevance mode: {self.relevance_expected!r}")
        if not self.turns:
            raise ValueError("a suite needs at least one turn")

    @property
    def tool_names(self) -> frozenset[str]:
        return frozenset(tool.name for tool in self.tools)


def _parse_golden(entries: Any) -> tuple[ToolCall, ...]:
    """Golden entries: bracketed batch strings or call dicts, flattened."""
    calls: list[ToolCall] = []
    for entry in entries:
        if isinstance(entry, str):
            calls.extend(parse_tool_calls(entry))
        else:
            calls.append(ToolCall.from_dict(entry))
    return tuple(calls)


def suite_from_dict(data: Mapping[str, Any], *, fallback_id: str = "") -> ToolSuite:
    turns = tuple(
        UserTurn(
            message=turn["message"],
            golden_calls=_parse_golden(turn.get("golden_calls", ())),
        )
        for turn in data.get("turns", ())
    )
    return ToolSuite(
        id=data.get("id", fallback_id),
        category=data["category"],
        tools=tuple(ToolSpec.from_dict(t) for t in data.get("tools", ())),
        turns=turns,
        relevance_expected=data.get("relevance_expected", "n/a"),
        initial_world=dict(data.get("initial_world", {})),
    )


def load_suite(path: str | Path) -> ToolSuite:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    return suite_from_dict(data, fallback_id=path.stem)


def load_suites(directory: str | Path) -> list[ToolSuite]:
    """All *.json suites under a directory, sorted by file name."""
    directory = Path(directory)
    suites = [load_suite(path) for path in sorted(directory.glob("*.json"))]
    if not suites:
        raise FileNotFoundError(f"no suite files found under {directory}")
    return suites
