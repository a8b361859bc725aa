"""Shared paths and scripted-backend helpers for the test suite."""

from __future__ import annotations

import pathlib
from typing import Sequence

import pytest

from agentrig.backends import (
    ChatMessage,
    Completion,
    GenParams,
    approx_token_count,
    render_conversation,
)
from agentrig.types import TaskSpec

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
SUITES_DIR = REPO_ROOT / "suites"
TOOLCALL_SUITES_DIR = SUITES_DIR / "toolcall"
EMBODIED_SUITES_DIR = SUITES_DIR / "embodied"
MANIFEST_PATH = SUITES_DIR / "manifest.json"
CONFIGS_DIR = REPO_ROOT / "configs"
GOLDENS_DIR = pathlib.Path(__file__).resolve().parent / "goldens"


class SequenceBackend:
    """Serves canned completions in order; repeats the last when exhausted."""

    def __init__(self, texts: Sequence[str]) -> None:
        if not texts:
            raise ValueError("SequenceBackend needs at least one canned text")
        self.texts = list(texts)
        self.calls = 0

    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        text = self.texts[min(self.calls, len(self.texts) - 1)]
        self.calls += 1
        return Completion(text=text, generated_tokens=approx_token_count(text), wall_seconds=0.0)


class RecordingBackend:
    """Wraps a backend and keeps every conversation it served."""

    def __init__(self, inner) -> None:
        self.inner = inner
        self.conversations: list[tuple[ChatMessage, ...]] = []

    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        self.conversations.append(tuple(messages))
        return self.inner.complete(messages, params)

    @property
    def calls(self) -> int:
        return len(self.conversations)

    def rendered(self, i: int) -> str:
        return render_conversation(self.conversations[i])

    def user_content(self, i: int) -> str:
        for message in self.conversations[i]:
            if message.role == "user":
                return message.content
        raise AssertionError("conversation had no user message")


def wall_bump_task(step_limit: int = 23, task_id: str = "gridnav/wall_bump_23") -> TaskSpec:
    """A room where 'move forward' is blocked forever and the goal never triggers."""
    return TaskSpec(
        id=task_id,
        kind="embodied",
        instruction="You walk around a walled room and interact with the objects in it.",
        goal="pick up the green key.",
        exemplar="(example omitted)",
        env_name="gridnav",
        step_limit=step_limit,
        env_config={
            "agent": {"x": 1, "y": 1, "facing": "west"},
            "objects": [{"color": "green", "kind": "key", "x": 6, "y": 6}],
            "subgoals": [
                {
                    "id": "hold-key",
                    "description": "holding the green key 1",
                    "predicate": {"kind": "holding", "object": "green key 1"},
                }
            ],
        },
    )


WALL_BUMP_REPLY = "Thought: The wall looks passable.\nAction: move forward"
WALL_BUMP_SUMMARY = "The agent repeatedly walked into the west wall without progress."


def run_wall_bump_with_memory(
    step_limit: int = 23, k_mem: int = 5, retain_last: int = 2
) -> tuple:
    """Scripted wall-bump episode with the memory module wired in.

    Returns ``(record, agent_rec, memory_rec)`` where the two recorders
    hold every conversation the policy and memory backends served.
    """
    from agentrig.envs import make_env
    from agentrig.react import EpisodeLimits, MemoryState, ModuleWiring, run_episode

    task = wall_bump_task(step_limit=step_limit)
    env = make_env(task, seed=0)
    agent_rec = RecordingBackend(SequenceBackend([WALL_BUMP_REPLY]))
    memory_rec = RecordingBackend(SequenceBackend([WALL_BUMP_SUMMARY]))
    record = run_episode(
        task,
        env,
        ModuleWiring(agent_backend=agent_rec, memory_backend=memory_rec),
        EpisodeLimits(step_limit=step_limit),
        memory=MemoryState(k_mem=k_mem, retain_last=retain_last),
    )
    return record, agent_rec, memory_rec


@pytest.fixture
def tmp_out(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    return out
