"""Plug-in modules for the tool-calling loop: selector and editor.

The selector narrows the tool inventory shown to the policy; the editor
audits every raw completion and repairs malformed call syntax.  Both run
on their own backend handle and fail open: a module backend error never
kills the episode, it just disables the module for that call.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Sequence

from .. import prompts
from ..backends import (
    Backend,
    BackendError,
    ChatMessage,
    Completion,
    GenParams,
    approx_token_count,
)
from ..types import ToolCall, ToolSpec
from .parser import ToolCallParseError, parse_tool_calls, render_tool_calls
from .suite import ToolSuite

logger = logging.getLogger(__name__)

UNCHANGED_REPLY = "UNCHANGED"
NO_CALLS_REPLY = "NO_VALID_TOOL_CALLS"

MAX_SELECTED = 10
MIN_SELECTED = 3


def render_tool_descriptions(tools: Sequence[ToolSpec]) -> str:
    """JSON list of tool specs, in inventory order."""
    return json.dumps([tool.to_dict() for tool in tools], indent=2)


@dataclass(frozen=True)
class EditOutcome:
    """Editor decision: unchanged, no calls found, or repaired text."""

    kind: str
    text: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("unchanged", "no_valid_tool_calls", "repaired"):
            raise ValueError(f"unknown edit outcome kind: {self.kind!r}")
        if self.kind == "repaired" and self.text is None:
            raise ValueError("repaired outcomes carry the repaired text")


def select_tools(
    user_msg: str,
    history: str,
    tools: Sequence[ToolSpec],
    backend: Backend,
    params: GenParams | None = None,
) -> tuple[list[ToolSpec], Completion | None]:
    """Pick a working subset of the inventory for one turn.

    Names come back one per line; unknown names are dropped, duplicates
    collapse, and at most ten survive.  Too few usable names, or any
    backend error, falls back to the full inventory.
    """
    if not tools:
        raise ValueError("select_tools needs a non-empty inventory")
    blocks = []
    if history:
        blocks.append(history)
    blocks.append(f"[User Message]\n{user_msg}")
    user = prompts.render(
        "selector_user",
        available_functions=render_tool_descriptions(tools),
        interaction_history="\n\n".join(blocks),
    )
    messages = [
        ChatMessage("system", prompts.load_template("selector_system")),
        ChatMessage("user", user),
    ]
    try:
        completion = backend.complete(messages, params or GenParams())
    except BackendError as exc:
        logger.warning("selector backend failed (%s); using the full inventory", exc)
        return list(tools), None
    by_name = {tool.name: tool for tool in tools}
    picked: list[ToolSpec] = []
    seen: set[str] = set()
    for line in completion.text.splitlines():
        name = line.strip().strip("-*").strip()
        if name in by_name and name not in seen:
            seen.add(name)
            picked.append(by_name[name])
            if len(picked) == MAX_SELECTED:
                break
    if len(picked) < min(MIN_SELECTED, len(tools)):
        logger.info(
            "selector kept %d of %d tools, below the floor; using the full inventory",
            len(picked),
            len(tools),
        )
        return list(tools), completion
    return picked, completion


def edit_tool_call(
    raw: str,
    backend: Backend,
    params: GenParams | None = None,
) -> tuple[EditOutcome, Completion | None]:
    """Audit one raw completion through the editor backend."""
    user = prompts.render("editor_user", model_response=raw)
    messages = [
        ChatMessage("system", prompts.load_template("editor_system")),
        ChatMessage("user", user),
    ]
    try:
        completion = backend.complete(messages, params or GenParams())
    except BackendError as exc:
        logger.warning("editor backend failed (%s); passing the output through", exc)
        return EditOutcome("unchanged"), None
    reply = completion.text.strip()
    if reply == UNCHANGED_REPLY:
        return EditOutcome("unchanged"), completion
    if reply == NO_CALLS_REPLY:
        return EditOutcome("no_valid_tool_calls"), completion
    return EditOutcome("repaired", reply), completion


def classify_relevance(suite: ToolSuite, model_output: str) -> bool:
    """Whether the output honoured the suite's call-required expectation."""
    if suite.relevance_expected == "n/a":
        raise ValueError("suite has no relevance expectation")
    try:
        calls = parse_tool_calls(model_output)
    except ToolCallParseError:
        calls = None
    if suite.relevance_expected == "no_call_required":
        return calls is None or len(calls) == 0
    return calls is not None and len(calls) > 0


# -- rule-based editor ------------------------------------------------------

_BARE_CALL_START = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\s*\(")
_JSON_OBJECT_START = re.compile(r"\{")


def _balanced_span(text: str, start: int, open_char: str, close_char: str) -> str | None:
    """Substring from ``start`` to the matching close, honouring strings."""
    depth = 0
    quote: str | None = None
    i = start
    while i < len(text):
        ch = text[i]
        if quote is not None:
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                quote = None
        elif ch in ("'", '"'):
            quote = ch
        elif ch == open_char:
            depth += 1
        elif ch == close_char:
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
        i += 1
    return None


def _calls_from_json(text: str) -> list[ToolCall] | None:
    """Mine ``{"name": {args}}`` objects out of prose."""
    calls: list[ToolCall] = []
    pos = 0
    while True:
        match = _JSON_OBJECT_START.search(text, pos)
        if match is None:
            break
        span = _balanced_span(text, match.start(), "{", "}")
        if span is None:
            pos = match.start() + 1
            continue
        try:
            data = json.loads(span)
        except json.JSONDecodeError:
            pos = match.start() + 1
            continue
        if isinstance(data, dict) and all(isinstance(v, dict) for v in data.values()) and data:
            try:
                for name, args in data.items():
                    calls.append(ToolCall(name, dict(args)))
            except ValueError:
                pass
        pos = match.start() + len(span)
    return calls or None


def _calls_from_brackets(text: str) -> list[ToolCall] | None:
    """First embedded bracketed batch that parses."""
    pos = 0
    while True:
        start = text.find("[", pos)
        if start == -1:
            return None
        span = _balanced_span(text, start, "[", "]")
        if span is None:
            return None
        try:
            calls = parse_tool_calls(span)
        except ToolCallParseError:
            pos = start + 1
            continue
        return list(calls) if calls else None


def _calls_from_bare(text: str) -> list[ToolCall] | None:
    """Bare ``name(args)`` expressions scattered through prose."""
    calls: list[ToolCall] = []
    pos = 0
    while True:
        match = _BARE_CALL_START.search(text, pos)
        if match is None:
            break
        open_paren = text.index("(", match.start())
        span = _balanced_span(text, open_paren, "(", ")")
        if span is None:
            break
        candidate = text[match.start() : open_paren] + span
        try:
            parsed = parse_tool_calls("[" + candidate + "]")
        except ToolCallParseError:
            pos = match.start() + 1
            continue
        calls.extend(parsed)
        pos = open_paren + len(span)
    return calls or None


def rule_based_repair(raw: str) -> str:
    """Deterministic stand-in for an LLM editor.

    Produces a reply in the editor's answer grammar: UNCHANGED, a
    canonical bracketed batch, or NO_VALID_TOOL_CALLS.
    """
    text = raw.strip()
    try:
        parse_tool_calls(text)
        return UNCHANGED_REPLY
    except ToolCallParseError:
        pass
    try:
        calls = parse_tool_calls("[" + text + "]")
        if calls:
            return render_tool_calls(calls)
    except ToolCallParseError:
        pass
    for miner in (_calls_from_brackets, _calls_from_json, _calls_from_bare):
        calls = miner(text)
        if calls:
            return render_tool_calls(calls)
    return NO_CALLS_REPLY


_EDITOR_PAYLOAD = re.compile(
    r"BROKEN_TOOL_CALL \(to be audited and possibly corrected\):\n\n(.*)\n\nNow produce the final output",
    re.DOTALL,
)


class RuleBasedEditorBackend:
    """Backend that answers editor prompts via :func:`rule_based_repair`."""

    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        for message in reversed(messages):
            if message.role == "user":
                match = _EDITOR_PAYLOAD.search(message.content)
                payload = match.group(1) if match else message.content
                reply = rule_based_repair(payload)
                return Completion(reply, approx_token_count(reply), 0.0)
        raise ValueError("editor prompt has no user message")
