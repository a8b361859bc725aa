"""Multi-turn tool-calling episode loop.

Each user turn repeats completion -> (editor) -> parse -> validate ->
execute -> feed results back, until the agent emits no calls, a parse
failure ends the turn, or the per-turn batch cap trips.  Turns are
judged against golden calls threaded through their own world copy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .. import prompts
from ..backends import Backend, BackendError, ChatMessage, GenParams
from ..types import EpisodeRecord, ExchangeRecord, TurnRecord
from . import schema
from .modules import (
    NO_CALLS_REPLY,
    classify_relevance,
    edit_tool_call,
    render_tool_descriptions,
    select_tools,
)
from .parser import ToolCallParseError, parse_tool_calls, render_call
from .suite import COUNT_CHECKED_CATEGORIES, ToolSuite
from .world import MockWorld, execute_calls, judge_turn

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ToolWiring:
    """Backend handles for the tool-calling loop."""

    agent_backend: Backend
    selector_backend: Backend | None = None
    editor_backend: Backend | None = None


@dataclass(frozen=True)
class ToolLimits:
    """Caps applied to one tool-calling episode."""

    max_batches_per_turn: int = 8

    def __post_init__(self) -> None:
        if self.max_batches_per_turn < 1:
            raise ValueError("max_batches_per_turn must be >= 1")


def _results_message(results) -> str:
    lines = [f"{result.call.function}: {result.payload}" for result in results]
    return "Tool execution results:\n" + "\n".join(lines)


def _selector_history(turns: list[tuple[str, list[ExchangeRecord]]]) -> str:
    """Label prior turns the way the selector prompt expects."""
    blocks: list[str] = []
    for message, exchanges in turns:
        blocks.append(f"[User Message]\n{message}")
        for exchange in exchanges:
            if exchange.calls:
                blocks.append("[Tool Call]\n[" + ", ".join(exchange.calls) + "]")
            if exchange.results:
                blocks.append("[Tool Execution Results]\n" + "\n".join(exchange.results))
    return "\n\n".join(blocks)


def run_tool_episode(
    suite: ToolSuite,
    wiring: ToolWiring,
    limits: ToolLimits | None = None,
    *,
    gen_params: GenParams | None = None,
    seed: int = 0,
) -> EpisodeRecord:
    """Run every user turn of a suite and judge each one."""
    limits = limits or ToolLimits()
    params = gen_params or GenParams()
    selector_active = wiring.selector_backend is not None and bool(suite.tools)
    editor_active = wiring.editor_backend is not None
    module_config = {"selector": selector_active, "editor": editor_active}

    world = MockWorld.initial(suite.initial_world)
    golden_world = MockWorld.initial(suite.initial_world)
    history: list[ChatMessage] = []
    prior_turns: list[tuple[str, list[ExchangeRecord]]] = []
    turn_records: list[TurnRecord] = []
    tokens = 0
    wall = 0.0
    cap_hit = False
    error = ""
    backend_failed = False

    for turn in suite.turns:
        tools = list(suite.tools)
        if selector_active:
            tools, completion = select_tools(
                turn.message,
                _selector_history(prior_turns),
                suite.tools,
                wiring.selector_backend,
                params,
            )
            if completion is not None:
                tokens += completion.generated_tokens
                wall += completion.wall_seconds
        system = prompts.render(
            "toolcall_system", function_descriptions=render_tool_descriptions(tools)
        )
        history.append(ChatMessage("user", turn.message))
        exchanges: list[ExchangeRecord] = []
        turn_results = []
        first_post_text: str | None = None

        for _ in range(limits.max_batches_per_turn):
            messages = [ChatMessage("system", system)] + history
            try:
                completion = wiring.agent_backend.complete(messages, params)
            except BackendError as exc:
                backend_failed = True
                error = str(exc)
                break
            tokens += completion.generated_tokens
            wall += completion.wall_seconds
            raw = completion.text
            history.append(ChatMessage("assistant", raw))

            text = raw
            edited: str | None = None
            no_calls_from_editor = False
            if editor_active:
                outcome, edit_completion = edit_tool_call(raw, wiring.editor_backend, params)
                if edit_completion is not None:
                    tokens += edit_completion.generated_tokens
                    wall += edit_completion.wall_seconds
                if outcome.kind == "repaired":
                    text = outcome.text or ""
                    edited = text
                elif outcome.kind == "no_valid_tool_calls":
                    edited = NO_CALLS_REPLY
                    no_calls_from_editor = True
            if first_post_text is None:
                first_post_text = NO_CALLS_REPLY if no_calls_from_editor else text

            if no_calls_from_editor:
                exchanges.append(ExchangeRecord(raw, edited))
                break
            try:
                calls = parse_tool_calls(text)
            except ToolCallParseError as exc:
                exchanges.append(
                    ExchangeRecord(raw, edited, verdicts=(schema.PARSE_ERROR,))
                )
                logger.debug("turn ended on parse failure: %s", exc)
                break
            if not calls:
                exchanges.append(ExchangeRecord(raw, edited))
                break

            expected = None
            if suite.category in COUNT_CHECKED_CATEGORIES and turn.golden_calls:
                expected = len(turn.golden_calls)
            verdicts = schema.validate_batch(calls, suite.tools, expected)
            results, world = execute_calls(calls, suite, world)
            turn_results.extend(results)
            exchanges.append(
                ExchangeRecord(
                    raw,
                    edited,
                    calls=tuple(render_call(call) for call in calls),
                    verdicts=tuple(verdict.category for verdict in verdicts),
                    results=tuple(result.payload for result in results),
                )
            )
            history.append(ChatMessage("user", _results_message(results)))
        else:
            cap_hit = True

        golden_results, golden_world = execute_calls(turn.golden_calls, suite, golden_world)
        failed_golden = [r for r in golden_results if r.outcome == "error"]
        if failed_golden:
            raise ValueError(
                f"suite {suite.id!r}: golden call failed: {failed_golden[0].payload}"
            )
        if backend_failed:
            judged = False
        elif suite.relevance_expected != "n/a":
            judged = classify_relevance(suite, first_post_text or "")
        else:
            judged = judge_turn(world, golden_world, turn_results, turn.golden_calls)
        turn_records.append(TurnRecord(turn.message, tuple(exchanges), judged))
        prior_turns.append((turn.message, exchanges))
        if backend_failed:
            break

    judged_count = sum(1 for record in turn_records if record.judged)
    success = not backend_failed and judged_count == len(suite.turns)
    if backend_failed:
        exit_reason = "backend_error"
    elif success or not cap_hit:
        exit_reason = "goal"
    else:
        exit_reason = "step_limit"

    return EpisodeRecord(
        task_id=suite.id,
        seed=seed,
        suite=suite.category,
        steps=tuple(turn_records),
        success=success,
        progress=judged_count / len(suite.turns),
        generated_tokens=tokens,
        wall_seconds=wall,
        module_config=module_config,
        exit_reason=exit_reason,
        error=error,
    )
