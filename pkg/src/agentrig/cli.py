"""Command-line entry point: run, report, validate, sample, denoise-demo."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Mapping, Sequence

from .config import ConfigError, load_config
from .denoise.scheduler import GateConfig, SeededPredictor, block_decode
from .envs import make_env
from .metrics import build_report, render_report_text
from .runner import execute_run, read_records
from .sampling import SuiteManifest, sample_suite
from .tools.suite import suite_from_dict
from .tools.world import MockWorld, execute_calls
from .types import TaskSpec

logger = logging.getLogger(__name__)


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
        result = execute_run(config)
    except (ConfigError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"episodes: {result.episode_count}")
    print(f"backend errors: {result.error_count}")
    print(f"records: {result.records_path}")
    print(f"report: {result.report_json_path}")
    print(result.report_text_path.read_text(encoding="utf-8"), end="")
    return result.exit_status


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        records, skipped = read_records(args.records)
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if skipped:
        print(f"skipped {skipped} corrupt line(s)", file=sys.stderr)
    if not records:
        print("error: no readable records", file=sys.stderr)
        return 2
    report = build_report(records, retry_threshold=args.retry_threshold)
    report["skipped_lines"] = skipped
    if args.out:
        Path(args.out).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(render_report_text(report))
    return 0


def _validate_suite(data: Mapping[str, Any], path: Path, problems: list[str]) -> str:
    try:
        suite = suite_from_dict(data, fallback_id=path.stem)
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(f"suite failed to load: {exc}")
        return "suite"
    world = MockWorld.initial(suite.initial_world)
    for turn_no, turn in enumerate(suite.turns, start=1):
        results, world = execute_calls(turn.golden_calls, suite, world)
        for result in results:
            if result.outcome != "ok":
                problems.append(
                    f"turn {turn_no}: golden call {result.call.function} failed: {result.payload}"
                )
    return f"suite {suite.id} ({suite.category}): {len(suite.tools)} tools, {len(suite.turns)} turns"


def _validate_task(data: Mapping[str, Any], problems: list[str]) -> str:
    try:
        task = TaskSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(f"task failed to load: {exc}")
        return "task"
    try:
        env = make_env(task, seed=0)
        observation = env.reset()
        actions = env.valid_actions()
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(f"task {task.id}: environment failed to build: {exc}")
        return f"task {task.id}"
    if not observation.text:
        problems.append(f"task {task.id}: empty initial observation")
    if not observation.done and not actions:
        problems.append(f"task {task.id}: no valid actions at the start")
    return f"task {task.id} ({task.env_name}): {len(actions)} initial actions"


def _cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.file)
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(data, Mapping) and "tasks" in data:
        entries: Sequence[Any] = data["tasks"]
    elif isinstance(data, list):
        entries = data
    else:
        entries = [data]
    problems: list[str] = []
    for entry in entries:
        if not isinstance(entry, Mapping):
            problems.append("work entries must be JSON objects")
            continue
        if "turns" in entry:
            summary = _validate_suite(entry, path, problems)
        else:
            summary = _validate_task(entry, problems)
        print(summary)
    for problem in problems:
        print(f"INVALID: {problem}", file=sys.stderr)
    print(f"{path}: {'FAIL' if problems else 'OK'} ({len(entries)} entries)")
    return 1 if problems else 0


def _cmd_sample(args: argparse.Namespace) -> int:
    try:
        with open(args.manifest, encoding="utf-8") as handle:
            data = json.load(handle)
        manifest = SuiteManifest.from_dict(data)
        selected = sample_suite(manifest, cap=args.cap, seed=args.seed)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for instance_id in selected:
        print(instance_id)
    print(f"total: {len(selected)}", file=sys.stderr)
    return 0


def _cmd_denoise_demo(args: argparse.Namespace) -> int:
    try:
        gate = GateConfig(mode=args.mode, tau=args.tau, gamma=args.gamma)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    predictor = SeededPredictor(seed=args.seed, eos_weight=args.eos_weight)
    result = block_decode(
        predictor,
        prompt=("demo",),
        block_size=args.block_size,
        gate=gate,
        max_blocks=args.max_blocks,
    )
    print("block,iteration,position,token,confidence")
    for event in result.trace:
        print(f"{event.block},{event.iteration},{event.position},{event.token},{event.confidence:.6f}")
    print(f"tokens: {' '.join(result.tokens)}")
    print(f"truncated: {str(result.truncated).lower()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agentrig",
        description="Agent evaluation harness: embodied and tool-calling loops with pluggable modules.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run every episode described by a YAML config")
    run_p.add_argument("config", help="path to the run configuration file")
    run_p.set_defaults(func=_cmd_run)

    report_p = sub.add_parser("report", help="rebuild a report from a records JSONL file")
    report_p.add_argument("records", help="path to records.jsonl")
    report_p.add_argument("--retry-threshold", type=int, default=3, help="minimum run length that counts as a retry loop")
    report_p.add_argument("--out", help="also write the report as JSON to this path")
    report_p.set_defaults(func=_cmd_report)

    validate_p = sub.add_parser("validate", help="check a task or suite JSON file")
    validate_p.add_argument("file", help="path to a work file (tasks or tool suite)")
    validate_p.set_defaults(func=_cmd_validate)

    sample_p = sub.add_parser("sample", help="deterministically subsample a benchmark manifest")
    sample_p.add_argument("manifest", help="path to a manifest JSON file")
    sample_p.add_argument("--cap", type=int, default=50, help="per-category instance cap")
    sample_p.add_argument("--seed", type=int, default=42, help="sampling seed")
    sample_p.set_defaults(func=_cmd_sample)

    demo_p = sub.add_parser("denoise-demo", help="trace a parallel-decode schedule as CSV")
    demo_p.add_argument("--mode", choices=("threshold", "factor"), default="threshold")
    demo_p.add_argument("--tau", type=float, default=0.9, help="confidence threshold")
    demo_p.add_argument("--gamma", type=float, default=0.3, help="factor-gate budget")
    demo_p.add_argument("--block-size", type=int, default=8)
    demo_p.add_argument("--max-blocks", type=int, default=4)
    demo_p.add_argument("--seed", type=int, default=0)
    demo_p.add_argument("--eos-weight", type=float, default=0.05, help="chance mass given to the end token")
    demo_p.set_defaults(func=_cmd_denoise_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
