"""Shared machinery for the embodied environments.

Environments expose a tiny POMDP surface: ``reset`` and ``step`` return
an :class:`EnvObservation`, ``valid_actions`` enumerates the currently
applicable action strings, and progress is the satisfied fraction of the
task's declared subgoals.  Invalid input never raises; every failure is
an in-band observation string and leaves the state untouched.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from ..types import TaskSpec

DONE_SUFFIX = " The task is completed."
DONE_MESSAGE = "The task is completed."
UNKNOWN_ACTION = "Unknown action."
NO_MATCH = "No known action matches that input."


@dataclass(frozen=True)
class Subgoal:
    """One unit of task progress, checked against environment state.

    ``predicate`` is a small data mapping with a ``kind`` key; each
    environment documents the kinds it understands.  Once a subgoal is
    satisfied it stays satisfied for the rest of the episode.
    """

    id: str
    description: str
    predicate: Mapping[str, Any]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("subgoal id must be non-empty")
        if "kind" not in self.predicate:
            raise ValueError(f"subgoal {self.id!r} predicate needs a 'kind'")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "predicate": dict(self.predicate),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Subgoal":
        return cls(
            id=data["id"],
            description=data.get("description", data["id"]),
            predicate=dict(data["predicate"]),
        )


@dataclass(frozen=True)
class EnvObservation:
    """What the agent sees after reset or one step."""

    text: str
    done: bool
    satisfied_subgoals: frozenset[str]


def progress(satisfied: frozenset[str] | set[str], subgoals: Sequence[Subgoal]) -> float:
    """Fraction of declared subgoals satisfied, equal weights."""
    if not subgoals:
        raise ValueError("progress needs a non-empty subgoal list")
    ids = {goal.id for goal in subgoals}
    return len(ids & set(satisfied)) / len(ids)


class Environment(ABC):
    """Base class: subgoal bookkeeping, done handling, action logging.

    Subclasses implement ``_render`` (current observation text),
    ``_apply`` (mutate state for one resolved action, return its
    observation text), ``_predicate_holds``, and ``_enumerate_actions``.
    The final declared subgoal is the goal predicate: the episode is
    done once it is satisfied, and the observation for the step that
    satisfied it carries the completion suffix.
    """

    def __init__(self, task: TaskSpec, subgoals: Sequence[Subgoal]) -> None:
        if not subgoals:
            raise ValueError("an environment needs at least one subgoal")
        self.task = task
        self.subgoals: tuple[Subgoal, ...] = tuple(subgoals)
        self._satisfied: set[str] = set()
        self._done = False
        self._performed: list[str] = []

    # -- subclass surface -------------------------------------------------

    @abstractmethod
    def _render(self) -> str:
        """Observation text for the current state."""

    @abstractmethod
    def _apply(self, action: str) -> str:
        """Apply one action string and return its observation text."""

    @abstractmethod
    def _predicate_holds(self, predicate: Mapping[str, Any]) -> bool:
        """Whether one subgoal predicate holds right now."""

    @abstractmethod
    def _enumerate_actions(self) -> tuple[str, ...]:
        """Applicable action strings for the current (non-terminal) state."""

    # -- shared behaviour --------------------------------------------------

    @property
    def done(self) -> bool:
        return self._done

    @property
    def satisfied(self) -> frozenset[str]:
        return frozenset(self._satisfied)

    @property
    def performed_actions(self) -> tuple[str, ...]:
        """Canonical forms of the actions that changed state so far."""
        return tuple(self._performed)

    def progress(self) -> float:
        return progress(self._satisfied, self.subgoals)

    def record_performed(self, canonical_action: str) -> None:
        self._performed.append(canonical_action)

    def reset(self) -> EnvObservation:
        text = self._render()
        self._check_subgoals()
        if self._goal_satisfied():
            self._done = True
            text += DONE_SUFFIX
        return EnvObservation(text, self._done, self.satisfied)

    def step(self, action: str) -> EnvObservation:
        if self._done:
            return EnvObservation(DONE_MESSAGE, True, self.satisfied)
        text = self._apply(action.strip())
        self._check_subgoals()
        if self._goal_satisfied():
            self._done = True
            text += DONE_SUFFIX
        return EnvObservation(text, self._done, self.satisfied)

    def valid_actions(self) -> tuple[str, ...]:
        if self._done:
            return ()
        return self._enumerate_actions()

    def _goal_satisfied(self) -> bool:
        return self.subgoals[-1].id in self._satisfied

    def _check_subgoals(self) -> None:
        for goal in self.subgoals:
            if goal.id not in self._satisfied and self._predicate_holds(goal.predicate):
                self._satisfied.add(goal.id)


def parse_subgoals(config: Mapping[str, Any]) -> tuple[Subgoal, ...]:
    """Read the ``subgoals`` list out of a task's env_config."""
    raw = config.get("subgoals", [])
    return tuple(Subgoal.from_dict(entry) for entry in raw)
