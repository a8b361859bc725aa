"""Aggregate metrics over finished episodes.

Covers success/progress rates, retry-loop detection, tool-failure histograms
(fine categories plus the coarse schema-vs-parameter grouping), throughput,
and the early-exit trade-off pair (redundancy reduction vs progress
degradation).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, Mapping, Sequence

from agentrig.tools.schema import COARSE_MAP, OK, ValidationVerdict
from agentrig.types import EpisodeRecord, Step, TurnRecord


@dataclass(frozen=True)
class RetryLoop:
    """A maximal run of identical consecutive actions."""

    action: str
    start_step: int
    length: int


def success_rate(records: Sequence[EpisodeRecord]) -> float:
    if not records:
        raise ValueError("no records")
    return sum(1 for r in records if r.success) / len(records)


def failure_rate(records: Sequence[EpisodeRecord]) -> float:
    if not records:
        raise ValueError("no records")
    return sum(1 for r in records if not r.success) / len(records)


def progress_rate(records: Sequence[EpisodeRecord]) -> float:
    if not records:
        raise ValueError("no records")
    return sum(r.progress for r in records) / len(records)


def _normalize_action(action: str) -> str:
    return " ".join(action.split())


def detect_retry_loops(actions: Sequence[str], threshold: int = 3) -> list[RetryLoop]:
    """Maximal runs of length >= threshold; actions compare whitespace-normalized."""
    if threshold < 2:
        raise ValueError("threshold must be >= 2")
    normalized = [_normalize_action(a) for a in actions]
    loops: list[RetryLoop] = []
    position = 0
    for action, run in groupby(normalized):
        length = sum(1 for _ in run)
        if length >= threshold:
            loops.append(RetryLoop(action, position + 1, length))
        position += length
    return loops


def redundancy_reduction(full_len: int, exit_step: int) -> float:
    """Fraction of steps an early exit saves: (T - t_e) / T."""
    if full_len < 1:
        raise ValueError("full_len must be >= 1")
    if not 1 <= exit_step <= full_len:
        raise ValueError(f"exit_step {exit_step} outside [1, {full_len}]")
    return (full_len - exit_step) / full_len


def progress_degradation(full_progress: float, exit_progress: float) -> float:
    """Progress lost by exiting early, clamped at zero."""
    for name, value in (("full_progress", full_progress), ("exit_progress", exit_progress)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} {value} outside [0, 1]")
    return max(0.0, full_progress - exit_progress)


@dataclass(frozen=True)
class FailureHistogram:
    fine: Mapping[str, int]
    coarse: Mapping[str, int]


def categorize_failures(verdicts: Iterable) -> FailureHistogram:
    """Count non-OK verdicts, both per category and coarsely grouped."""
    fine: dict[str, int] = {}
    for verdict in verdicts:
        category = verdict.category if isinstance(verdict, ValidationVerdict) else str(verdict)
        if category == OK:
            continue
        fine[category] = fine.get(category, 0) + 1
    coarse: dict[str, int] = {}
    for category, count in fine.items():
        group = COARSE_MAP.get(category)
        if group is not None:
            coarse[group] = coarse.get(group, 0) + count
    return FailureHistogram(fine, coarse)


def record_actions(record: EpisodeRecord) -> list[str]:
    return [s.action for s in record.steps if isinstance(s, Step)]


def record_verdicts(record: EpisodeRecord) -> list[str]:
    out: list[str] = []
    for entry in record.steps:
        if isinstance(entry, TurnRecord):
            for exchange in entry.exchanges:
                out.extend(exchange.verdicts)
    return out


def compare_early_exit(
    full_records: Sequence[EpisodeRecord],
    exit_records: Sequence[EpisodeRecord],
) -> dict:
    """Pair baseline and early-exit runs of the same tasks by (task_id, seed).

    Redundancy uses step counts (t_e = steps the exit run actually took);
    degradation uses the progress difference, clamped at zero.
    """
    baseline = {(r.task_id, r.seed): r for r in full_records}
    reductions: list[float] = []
    degradations: list[float] = []
    pairs = 0
    for record in exit_records:
        full = baseline.get((record.task_id, record.seed))
        if full is None or not full.steps:
            continue
        full_len = len(full.steps)
        exit_step = min(len(record.steps), full_len) or 1
        pairs += 1
        reductions.append(redundancy_reduction(full_len, exit_step))
        degradations.append(progress_degradation(full.progress, record.progress))
    if pairs == 0:
        return {"pairs": 0, "redundancy_reduction": None, "progress_degradation": None}
    return {
        "pairs": pairs,
        "redundancy_reduction": sum(reductions) / pairs,
        "progress_degradation": sum(degradations) / pairs,
    }


def _suite_block(records: Sequence[EpisodeRecord], retry_threshold: int) -> dict:
    loops_total = 0
    verdicts: list[str] = []
    tokens = 0
    wall = 0.0
    for record in records:
        loops_total += len(detect_retry_loops(record_actions(record), retry_threshold))
        verdicts.extend(record_verdicts(record))
        tokens += record.generated_tokens
        wall += record.wall_seconds
    histogram = categorize_failures(verdicts)
    return {
        "episodes": len(records),
        "success_rate": success_rate(records),
        "progress_rate": progress_rate(records),
        "retry_loops_total": loops_total,
        "retry_loops_per_episode": loops_total / len(records),
        "failures": dict(sorted(histogram.fine.items())),
        "failures_coarse": dict(sorted(histogram.coarse.items())),
        "generated_tokens": tokens,
        "wall_seconds": wall,
        "tokens_per_second": (tokens / wall) if wall > 0 else None,
    }


def build_report(records: Sequence[EpisodeRecord], retry_threshold: int = 3) -> dict:
    """Group records by module configuration, then by suite, and aggregate."""
    if not records:
        raise ValueError("no records")
    groups: dict[str, list[EpisodeRecord]] = {}
    for record in records:
        key = json.dumps(dict(record.module_config), sort_keys=True)
        groups.setdefault(key, []).append(record)
    blocks = []
    for key in sorted(groups):
        group_records = groups[key]
        suites: dict[str, list[EpisodeRecord]] = {}
        for record in group_records:
            suites.setdefault(record.suite or "default", []).append(record)
        suite_blocks = {
            name: _suite_block(suites[name], retry_threshold) for name in sorted(suites)
        }
        blocks.append(
            {
                "module_config": json.loads(key),
                "suites": suite_blocks,
                "average": {
                    "success_rate": success_rate(group_records),
                    "progress_rate": progress_rate(group_records),
                },
            }
        )
    return {"episodes": len(records), "groups": blocks}


def _format_config(config: Mapping) -> str:
    if not config:
        return "(default)"
    return ", ".join(f"{k}={v}" for k, v in sorted(config.items()))


def render_report_text(report: Mapping) -> str:
    """Fixed-width table: one block per module config, Success/Progress per suite."""
    lines: list[str] = []
    for block in report["groups"]:
        lines.append(f"config: {_format_config(block['module_config'])}")
        lines.append(f"{'suite':<28} {'episodes':>8} {'success%':>9} {'progress%':>10} {'loops':>6}")
        for name, suite in block["suites"].items():
            lines.append(
                f"{name:<28} {suite['episodes']:>8d} "
                f"{100.0 * suite['success_rate']:>9.1f} "
                f"{100.0 * suite['progress_rate']:>10.1f} "
                f"{suite['retry_loops_total']:>6d}"
            )
        avg = block["average"]
        lines.append(
            f"{'Avg':<28} {'':>8} "
            f"{100.0 * avg['success_rate']:>9.1f} "
            f"{100.0 * avg['progress_rate']:>10.1f} "
            f"{'':>6}"
        )
        lines.append("")
    return "\n".join(lines)
