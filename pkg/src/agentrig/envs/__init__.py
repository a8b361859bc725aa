"""Embodied environments and their registry."""

from __future__ import annotations

from ..types import TaskSpec
from .base import (
    DONE_MESSAGE,
    DONE_SUFFIX,
    NO_MATCH,
    UNKNOWN_ACTION,
    Environment,
    EnvObservation,
    Subgoal,
    parse_subgoals,
    progress,
)
from .gridnav import GridNavEnv
from .texthouse import TextHouseEnv

ENV_REGISTRY: dict[str, type[Environment]] = {
    GridNavEnv.name: GridNavEnv,
    TextHouseEnv.name: TextHouseEnv,
}


def make_env(task: TaskSpec, seed: int) -> Environment:
    """Instantiate the environment a task names, deterministically."""
    try:
        env_cls = ENV_REGISTRY[task.env_name]
    except KeyError:
        raise KeyError(f"unknown environment: {task.env_name!r}") from None
    return env_cls(task, seed)


__all__ = [
    "DONE_MESSAGE",
    "DONE_SUFFIX",
    "ENV_REGISTRY",
    "EnvObservation",
    "Environment",
    "GridNavEnv",
    "NO_MATCH",
    "Subgoal",
    "TextHouseEnv",
    "UNKNOWN_ACTION",
    "make_env",
    "parse_subgoals",
    "progress",
]
