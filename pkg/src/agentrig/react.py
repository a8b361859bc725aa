"""Thought/action loop for embodied tasks, with optional plug-in modules.

The policy sees the task framing plus either the whole interaction
history or, when the memory module is active, a rolling summary plus the
last few raw steps.  A verifier module can cut the episode short on a
fixed cadence.  Every module runs on its own backend handle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence

from . import prompts
from .backends import Backend, BackendError, ChatMessage, Completion, GenParams
from .envs.base import Environment
from .types import EpisodeRecord, Step, TaskSpec, Trajectory

logger = logging.getLogger(__name__)

SYSTEM_PROMPT = "You are a helpful assistant."


class ReactParseError(ValueError):
    """Raised when a completion has no extractable action line."""

    def __init__(self, raw: str) -> None:
        super().__init__("no 'Action:' line found in completion")
        self.raw = raw


@dataclass(frozen=True)
class MemoryState:
    """Rolling summary state for the memory module."""

    text: str = ""
    last_refresh_step: int = 0
    k_mem: int = 5
    retain_last: int = 2

    def __post_init__(self) -> None:
        if self.k_mem < 1:
            raise ValueError("k_mem must be >= 1")
        if self.retain_last < 0:
            raise ValueError("retain_last must be >= 0")
        if self.last_refresh_step < 0:
            raise ValueError("last_refresh_step must be >= 0")


@dataclass(frozen=True)
class VerifierConfig:
    """Cadence settings for the early-exit module."""

    k_earlyexit: int = 5
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.k_earlyexit < 1:
            raise ValueError("k_earlyexit must be >= 1")


@dataclass(frozen=True)
class ModuleWiring:
    """Backend handles: the policy plus optional module backends."""

    agent_backend: Backend
    memory_backend: Backend | None = None
    verifier_backend: Backend | None = None


@dataclass(frozen=True)
class EpisodeLimits:
    """Caps applied to one episode run."""

    step_limit: int | None = None


def render_steps(steps: Sequence[Step]) -> str:
    """Render steps as Thought/Action/Observation blocks."""
    return "\n\n".join(
        f"Thought: {step.thought}\nAction: {step.action}\nObservation: {step.observation}"
        for step in steps
    )


def build_prompt(
    task: TaskSpec,
    history_view: Trajectory | tuple[MemoryState, Sequence[Step]],
    valid_actions: Sequence[str],
    *,
    init_observation: str,
) -> list[ChatMessage]:
    """Render the chat messages for one policy call.

    ``history_view`` is the full trajectory, or ``(memory, latest_steps)``
    when the memory module is active; the rendered prompt then carries
    the summary line plus only those raw steps.
    """
    if isinstance(history_view, Trajectory):
        history_text = render_steps(history_view.steps)
    else:
        memory, latest = history_view
        history_text = f"Memory: {memory.text or '(empty)'}"
        if latest:
            history_text += "\n\n" + render_steps(latest)
    values = {
        "task_instruction": task.instruction,
        "exemplar": task.exemplar,
        "task_goal": task.goal,
        "init_observation": init_observation,
        "valid_actions": ", ".join(valid_actions),
    }
    template = prompts.load_template("react_user")
    if history_text:
        content = prompts.fill(template, history=history_text, **values)
    else:
        template = template.replace("{init_observation}\n\n{history}", "{init_observation}")
        content = prompts.fill(template, **values)
    return [
        ChatMessage("system", SYSTEM_PROMPT),
        ChatMessage("user", content),
    ]


def parse_react(text: str) -> tuple[str, str]:
    """Pull (thought, action) out of a completion.

    The action is the first line starting with ``Action:``; the thought
    is whatever follows the first ``Thought:`` before that line.  A
    completion with no action line raises :class:`ReactParseError`.
    """
    lines = text.splitlines()
    action_idx = None
    for i, line in enumerate(lines):
        if line.lstrip().startswith("Action:"):
            action_idx = i
            break
    if action_idx is None:
        raise ReactParseError(text)
    action = lines[action_idx].lstrip()[len("Action:") :].strip()
    thought = ""
    for i in range(action_idx):
        stripped = lines[i].lstrip()
        if stripped.startswith("Thought:"):
            pieces = [stripped[len("Thought:") :]]
            pieces.extend(lines[i + 1 : action_idx])
            thought = "\n".join(pieces).strip()
            break
    return thought, action


def should_invoke_memory(t: int, memory: MemoryState) -> bool:
    """True when the summary is stale by at least k_mem steps."""
    if t < 1:
        raise ValueError("step index must be >= 1")
    return t - memory.last_refresh_step >= memory.k_mem


def update_memory(
    memory: MemoryState,
    recent: Sequence[Step],
    task: TaskSpec,
    backend: Backend,
    params: GenParams | None = None,
) -> tuple[MemoryState, Completion]:
    """Fold the recent steps into the rolling summary.

    Returns the refreshed state plus the raw completion so callers can
    account for tokens.  An empty completion keeps the previous text but
    still advances the refresh step.
    """
    if not recent:
        raise ValueError("update_memory needs at least one recent step")
    user = prompts.render(
        "memory_user",
        exemplars=prompts.load_template("memory_exemplars"),
        memory=memory.text or "(empty)",
        recent_steps=render_steps(recent),
    )
    messages = [
        ChatMessage("system", prompts.load_template("memory_system")),
        ChatMessage("user", user),
    ]
    completion = backend.complete(messages, params or GenParams())
    refreshed_at = recent[-1].index + 1
    new_text = completion.text.strip()
    if not new_text:
        logger.warning("memory backend returned an empty summary; keeping previous text")
        new_text = memory.text
    return replace(memory, text=new_text, last_refresh_step=refreshed_at), completion


def should_invoke_verifier(t: int, config: VerifierConfig) -> bool:
    """True on the fixed cadence, when the module is enabled."""
    if t < 1:
        raise ValueError("step index must be >= 1")
    return config.enabled and t % config.k_earlyexit == 0


def parse_verdict(text: str) -> bool | None:
    """Binary verdict from the first token; None when unintelligible."""
    tokens = text.strip().split()
    if not tokens:
        return None
    head = tokens[0].strip(".,!:;\"'").lower()
    if head in ("1", "yes"):
        return True
    if head in ("0", "no"):
        return False
    return None


def verify_early_exit(
    trajectory: Trajectory,
    task: TaskSpec,
    backend: Backend,
    *,
    init_observation: str = "",
    instruction: str | None = None,
    params: GenParams | None = None,
) -> tuple[bool, Completion]:
    """Ask the verifier whether to stop the episode now.

    The verifier always sees the full raw history.  Unparseable verdicts
    keep the episode going and log a warning.
    """
    if not trajectory.steps:
        raise ValueError("verify_early_exit needs a non-empty trajectory")
    history = render_steps(trajectory.steps)
    if init_observation:
        history = f"{init_observation}\n\n{history}"
    user = prompts.render(
        "early_exit_user",
        task_instruction=task.instruction,
        task_goal=task.goal,
        interaction_history=history,
        early_exit_instruction=instruction or prompts.load_template("early_exit_instruction"),
    )
    messages = [
        ChatMessage("system", SYSTEM_PROMPT),
        ChatMessage("user", user),
    ]
    completion = backend.complete(messages, params or GenParams())
    verdict = parse_verdict(completion.text)
    if verdict is None:
        logger.warning("unparseable verifier verdict %r; continuing", completion.text[:80])
        verdict = False
    return verdict, completion


def _memory_slice(trajectory: Trajectory, t: int, k_mem: int) -> tuple[Step, ...]:
    """Steps with indices max(1, t - k_mem) .. t - 1."""
    lo = max(0, t - 1 - k_mem)
    return trajectory.steps[lo : t - 1]


def run_episode(
    task: TaskSpec,
    env: Environment,
    wiring: ModuleWiring,
    limits: EpisodeLimits | None = None,
    *,
    memory: MemoryState | None = None,
    verifier: VerifierConfig | None = None,
    gen_params: GenParams | None = None,
    seed: int = 0,
    suite: str = "",
) -> EpisodeRecord:
    """Run one embodied episode to goal, step limit, early exit, or error."""
    if task.kind != "embodied":
        raise ValueError("run_episode handles embodied tasks only")
    limits = limits or EpisodeLimits()
    params = gen_params or GenParams()
    step_limit = limits.step_limit if limits.step_limit is not None else task.step_limit

    memory_active = wiring.memory_backend is not None
    mem = memory or MemoryState()
    verifier_cfg = verifier or VerifierConfig()
    verifier_active = wiring.verifier_backend is not None and verifier_cfg.enabled

    module_config = {
        "memory": {"k_mem": mem.k_mem, "retain_last": mem.retain_last}
        if memory_active
        else None,
        "early_exit": {"k_earlyexit": verifier_cfg.k_earlyexit} if verifier_active else None,
    }

    observation = env.reset()
    init_observation = observation.text
    trajectory = Trajectory()
    tokens = 0
    wall = 0.0
    exit_reason = "goal" if observation.done else "step_limit"
    error = ""

    try:
        for t in range(1, step_limit + 1):
            if observation.done:
                break
            if memory_active and should_invoke_memory(t, mem):
                recent = _memory_slice(trajectory, t, mem.k_mem)
                if recent:
                    mem, completion = update_memory(
                        mem, recent, task, wiring.memory_backend, params
                    )
                    tokens += completion.generated_tokens
                    wall += completion.wall_seconds
            if memory_active:
                latest: tuple[Step, ...] = ()
                if mem.retain_last:
                    latest = trajectory.steps[len(trajectory.steps) - mem.retain_last :]
                history_view: Trajectory | tuple = (mem, latest)
            else:
                history_view = trajectory
            messages = build_prompt(
                task, history_view, env.valid_actions(), init_observation=init_observation
            )
            completion = wiring.agent_backend.complete(messages, params)
            tokens += completion.generated_tokens
            wall += completion.wall_seconds
            try:
                thought, action = parse_react(completion.text)
            except ReactParseError:
                logger.warning("unparseable completion; feeding raw text to the env")
                thought, action = "", completion.text.strip()
            observation = env.step(action)
            trajectory = trajectory.append(thought, action, observation.text)
            if observation.done:
                exit_reason = "goal"
                break
            if verifier_active and should_invoke_verifier(t, verifier_cfg):
                stop, completion = verify_early_exit(
                    trajectory,
                    task,
                    wiring.verifier_backend,
                    init_observation=init_observation,
                    params=params,
                )
                tokens += completion.generated_tokens
                wall += completion.wall_seconds
                if stop:
                    exit_reason = "early_exit"
                    break
        else:
            exit_reason = "step_limit"
    except BackendError as exc:
        exit_reason = "backend_error"
        error = str(exc)

    success = env.done
    return EpisodeRecord(
        task_id=task.id,
        seed=seed,
        suite=suite,
        steps=trajectory.steps,
        success=success,
        progress=env.progress(),
        generated_tokens=tokens,
        wall_seconds=wall,
        module_config=module_config,
        exit_reason="goal" if success else exit_reason,
        error=error,
    )
