"""Run orchestration: load work, fan episodes over a worker pool, write artifacts.

Episodes land in an append-only JSONL file in submission order, so a run with
scripted backends produces byte-identical output for the same config and seed
regardless of worker count.  A crash mid-run leaves a valid prefix behind.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .backends import Backend, GenParams
from .config import AblationSpec, ConfigError, RunConfig, build_backends
from .envs import make_env
from .metrics import build_report, render_report_text
from .react import EpisodeLimits, MemoryState, ModuleWiring, VerifierConfig, run_episode
from .sampling import derive_seed
from .tools.runner import ToolLimits, ToolWiring, run_tool_episode
from .tools.suite import ToolSuite, suite_from_dict
from .types import EpisodeRecord, TaskSpec

logger = logging.getLogger(__name__)

RECORDS_NAME = "records.jsonl"
REPORT_JSON_NAME = "report.json"
REPORT_TEXT_NAME = "report.txt"


@dataclass(frozen=True)
class Job:
    """One episode to run: a task or suite under one module configuration."""

    ablation: AblationSpec
    task: TaskSpec | None = None
    suite: ToolSuite | None = None

    def __post_init__(self) -> None:
        if (self.task is None) == (self.suite is None):
            raise ValueError("a job carries exactly one of task or suite")

    @property
    def work_id(self) -> str:
        return self.task.id if self.task is not None else self.suite.id

    @property
    def suite_label(self) -> str:
        if self.task is not None:
            return self.task.env_name
        return self.suite.category


@dataclass(frozen=True)
class RunResult:
    """Artifacts and tallies from one harness invocation."""

    records_path: Path
    report_json_path: Path
    report_text_path: Path
    episode_count: int
    error_count: int

    @property
    def exit_status(self) -> int:
        all_failed = self.episode_count > 0 and self.error_count == self.episode_count
        return 1 if all_failed else 0


def _load_work_file(path: Path) -> tuple[list[TaskSpec], list[ToolSuite]]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    tasks: list[TaskSpec] = []
    suites: list[ToolSuite] = []
    entries: Sequence[Any]
    if isinstance(data, Mapping) and "tasks" in data:
        entries = data["tasks"]
    elif isinstance(data, Mapping):
        entries = [data]
    elif isinstance(data, list):
        entries = data
    else:
        raise ConfigError(f"{path}: expected a JSON object or list")
    for entry in entries:
        if not isinstance(entry, Mapping):
            raise ConfigError(f"{path}: work entries must be JSON objects")
        if "turns" in entry:
            suites.append(suite_from_dict(entry, fallback_id=path.stem))
        else:
            tasks.append(TaskSpec.from_dict(entry))
    return tasks, suites


def load_work(paths: Sequence[str | Path]) -> tuple[list[TaskSpec], list[ToolSuite]]:
    """Collect tasks and tool suites from files or directories of JSON files."""
    tasks: list[TaskSpec] = []
    suites: list[ToolSuite] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files = sorted(path.glob("*.json"))
            if not files:
                raise ConfigError(f"no .json work files under {path}")
        elif path.is_file():
            files = [path]
        else:
            raise ConfigError(f"work path does not exist: {path}")
        for file in files:
            file_tasks, file_suites = _load_work_file(file)
            tasks.extend(file_tasks)
            suites.extend(file_suites)
    if not tasks and not suites:
        raise ConfigError("work paths contained no tasks or suites")
    return tasks, suites


def _job_seed(config: RunConfig, job: Job) -> int:
    return derive_seed(config.seed, job.ablation.label(), job.work_id)


def _fallback_module_config(config: RunConfig, job: Job, backends: Mapping[str, Backend]) -> dict:
    """The module_config an episode runner would have reported, for error records."""
    if job.task is not None:
        memory_on = job.ablation.memory and "memory" in backends
        verifier_on = job.ablation.early_exit and "verifier" in backends
        return {
            "memory": {"k_mem": config.k_mem, "retain_last": config.retain_last}
            if memory_on
            else None,
            "early_exit": {"k_earlyexit": config.k_earlyexit} if verifier_on else None,
        }
    selector_on = job.ablation.selector and "selector" in backends and bool(job.suite.tools)
    editor_on = job.ablation.editor and "editor" in backends
    return {"selector": selector_on, "editor": editor_on}


def run_job(config: RunConfig, backends: Mapping[str, Backend], job: Job) -> EpisodeRecord:
    """Run one episode; unexpected exceptions become backend_error records."""
    seed = _job_seed(config, job)
    params = GenParams(max_tokens=config.max_tokens, temperature=config.temperature, seed=seed)
    try:
        if job.task is not None:
            env = make_env(job.task, seed)
            wiring = ModuleWiring(
                agent_backend=backends["agent"],
                memory_backend=backends.get("memory") if job.ablation.memory else None,
                verifier_backend=backends.get("verifier") if job.ablation.early_exit else None,
            )
            memory = MemoryState(k_mem=config.k_mem, retain_last=config.retain_last)
            verifier = VerifierConfig(k_earlyexit=config.k_earlyexit)
            return run_episode(
                job.task,
                env,
                wiring,
                EpisodeLimits(step_limit=config.step_limit),
                memory=memory,
                verifier=verifier,
                gen_params=params,
                seed=seed,
                suite=job.suite_label,
            )
        wiring = ToolWiring(
            agent_backend=backends["agent"],
            selector_backend=backends.get("selector") if job.ablation.selector else None,
            editor_backend=backends.get("editor") if job.ablation.editor else None,
        )
        return run_tool_episode(
            job.suite,
            wiring,
            ToolLimits(max_batches_per_turn=config.max_batches_per_turn),
            gen_params=params,
            seed=seed,
        )
    except Exception as exc:
        logger.exception("episode %s failed", job.work_id)
        return EpisodeRecord(
            task_id=job.work_id,
            seed=seed,
            suite=job.suite_label,
            success=False,
            progress=0.0,
            module_config=_fallback_module_config(config, job, backends),
            exit_reason="backend_error",
            error=f"{type(exc).__name__}: {exc}",
        )


def build_jobs(config: RunConfig, tasks: Sequence[TaskSpec], suites: Sequence[ToolSuite]) -> list[Job]:
    """One job per (ablation, work item); grouped by ablation for readable output."""
    jobs: list[Job] = []
    for ablation in config.ablations:
        for task in tasks:
            jobs.append(Job(ablation=ablation, task=task))
        for suite in suites:
            jobs.append(Job(ablation=ablation, suite=suite))
    return jobs


def execute_run(config: RunConfig) -> RunResult:
    """Run every job, streaming records to JSONL, then write the report."""
    backends = build_backends(config)
    tasks, suites = load_work(config.suites)
    jobs = build_jobs(config, tasks, suites)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / RECORDS_NAME

    records: list[EpisodeRecord] = []
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(run_job, config, backends, job) for job in jobs]
        with open(records_path, "w", encoding="utf-8") as handle:
            for future in futures:
                record = future.result()
                handle.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
                handle.flush()
                records.append(record)

    report = build_report(records, retry_threshold=config.retry_threshold)
    report_json_path = out_dir / REPORT_JSON_NAME
    report_text_path = out_dir / REPORT_TEXT_NAME
    report_json_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    report_text_path.write_text(render_report_text(report) + "\n", encoding="utf-8")

    error_count = sum(1 for r in records if r.exit_reason == "backend_error")
    if error_count:
        logger.warning("%d of %d episodes ended in backend_error", error_count, len(records))
    return RunResult(
        records_path=records_path,
        report_json_path=report_json_path,
        report_text_path=report_text_path,
        episode_count=len(records),
        error_count=error_count,
    )


def read_records(path: str | Path) -> tuple[list[EpisodeRecord], int]:
    """Parse a JSONL records file, skipping and counting corrupt lines."""
    records: list[EpisodeRecord] = []
    skipped = 0
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                records.append(EpisodeRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                skipped += 1
                logger.warning("skipping corrupt record on line %d: %s", line_no, exc)
    return records, skipped
