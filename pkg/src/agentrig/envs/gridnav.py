"""Grid navigation environment: one walled room seen through a cone.

The agent stands on an 8x8 grid (border cells are walls), faces one of
four directions, and observes a forward cone rendered as text.  Layouts
come either fully authored from the task's env_config or procedurally
from the episode seed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Mapping

from ..sampling import SplitMix64, derive_seed
from ..types import TaskSpec
from .base import NO_MATCH, UNKNOWN_ACTION, Environment, Subgoal, parse_subgoals

BARRIER = "There is a barrier in front of you, you can't move forward."
VIEW_DEPTH = 6
VIEW_HALF_WIDTH = 3

_FACINGS = {
    "north": (0, -1),
    "east": (1, 0),
    "south": (0, 1),
    "west": (-1, 0),
}

_COLORS = ("red", "green", "blue", "purple", "yellow", "grey")
_KINDS = ("ball", "box", "key")


def _left(facing: tuple[int, int]) -> tuple[int, int]:
    return (facing[1], -facing[0])


def _right(facing: tuple[int, int]) -> tuple[int, int]:
    return (-facing[1], facing[0])


@dataclass
class GridObject:
    label: str
    x: int
    y: int


class GridNavEnv(Environment):
    """BabyAI-flavoured room with turn/move/goto/pickup actions.

    Subgoal predicate kinds: ``seen_object``, ``adjacent``, ``holding``,
    ``action_performed``.
    """

    name = "gridnav"

    def __init__(self, task: TaskSpec, seed: int) -> None:
        config = task.env_config
        self.width = int(config.get("width", 8))
        self.height = int(config.get("height", 8))
        if self.width < 4 or self.height < 4:
            raise ValueError("grid must be at least 4x4 to have interior cells")
        if "objects" in config and "agent" in config:
            self.objects = self._authored_objects(config["objects"])
            agent = config["agent"]
            self.agent = (int(agent["x"]), int(agent["y"]))
            facing = agent["facing"]
            if facing not in _FACINGS:
                raise ValueError(f"unknown facing: {facing!r}")
            self.facing = _FACINGS[facing]
        else:
            self._generate_layout(task, seed, config)
        for obj in self.objects:
            if not self._in_interior(obj.x, obj.y):
                raise ValueError(f"object {obj.label!r} outside the room interior")
        if not self._in_interior(*self.agent):
            raise ValueError("agent outside the room interior")
        self.carrying: str | None = None
        self.seen: set[str] = set()
        subgoals = parse_subgoals(config) or self._default_subgoals(config)
        super().__init__(task, subgoals)

    # -- construction ------------------------------------------------------

    @staticmethod
    def _authored_objects(entries: Any) -> list[GridObject]:
        objects: list[GridObject] = []
        counts: dict[tuple[str, str], int] = {}
        for entry in entries:
            color, kind = entry["color"], entry["kind"]
            counts[(color, kind)] = counts.get((color, kind), 0) + 1
            label = f"{color} {kind} {counts[(color, kind)]}"
            objects.append(GridObject(label, int(entry["x"]), int(entry["y"])))
        if len({obj.label for obj in objects}) != len(objects):
            raise ValueError("duplicate object labels")
        if len({(obj.x, obj.y) for obj in objects}) != len(objects):
            raise ValueError("two objects share a cell")
        return objects

    def _generate_layout(self, task: TaskSpec, seed: int, config: Mapping[str, Any]) -> None:
        rng = SplitMix64(derive_seed(seed, "gridnav", task.id))
        target = config.get("target", {"color": "red", "kind": "ball"})
        distractors = int(config.get("distractors", 3))
        specs = [(target["color"], target["kind"])]
        while len(specs) < 1 + distractors:
            pair = (_COLORS[rng.randrange(len(_COLORS))], _KINDS[rng.randrange(len(_KINDS))])
            if pair != (target["color"], target["kind"]):
                specs.append(pair)
        cells = [
            (x, y)
            for y in range(1, self.height - 1)
            for x in range(1, self.width - 1)
        ]
        picked: list[tuple[int, int]] = []
        pool = list(cells)
        for _ in range(len(specs) + 1):
            idx = rng.randrange(len(pool))
            picked.append(pool.pop(idx))
        counts: dict[tuple[str, str], int] = {}
        self.objects = []
        for (color, kind), cell in zip(specs, picked):
            counts[(color, kind)] = counts.get((color, kind), 0) + 1
            label = f"{color} {kind} {counts[(color, kind)]}"
            self.objects.append(GridObject(label, cell[0], cell[1]))
        self.agent = picked[-1]
        self.facing = list(_FACINGS.values())[rng.randrange(4)]

    def _default_subgoals(self, config: Mapping[str, Any]) -> tuple[Subgoal, ...]:
        target = config.get("target", {"color": "red", "kind": "ball"})
        label = f"{target['color']} {target['kind']} 1"
        return (
            Subgoal("saw-target", f"saw the {label}", {"kind": "seen_object", "object": label}),
            Subgoal("reached-target", f"reached the {label}", {"kind": "adjacent", "object": label}),
        )

    # -- geometry ----------------------------------------------------------

    def _in_interior(self, x: int, y: int) -> bool:
        return 1 <= x <= self.width - 2 and 1 <= y <= self.height - 2

    def _object_at(self, x: int, y: int) -> GridObject | None:
        for obj in self.objects:
            if (obj.x, obj.y) == (x, y):
                return obj
        return None

    def _blocked(self, x: int, y: int) -> bool:
        return not self._in_interior(x, y) or self._object_at(x, y) is not None

    def _wall_distance(self) -> int:
        dist = 1
        x, y = self.agent
        fx, fy = self.facing
        while self._in_interior(x + fx * dist, y + fy * dist):
            dist += 1
        return dist

    # -- rendering ----------------------------------------------------------

    def _render(self) -> str:
        parts: list[str] = []
        left = _left(self.facing)
        ax, ay = self.agent
        for obj in self.objects:
            dx, dy = obj.x - ax, obj.y - ay
            depth = dx * self.facing[0] + dy * self.facing[1]
            lateral = dx * left[0] + dy * left[1]
            if not (0 <= depth <= VIEW_DEPTH and abs(lateral) <= VIEW_HALF_WIDTH):
                continue
            self.seen.add(obj.label)
            if lateral == 0:
                parts.append(
                    f"There is a {obj.label} right in front of you {depth} steps away."
                )
            else:
                side = "left" if lateral > 0 else "right"
                parts.append(
                    f"There is a {obj.label} {depth} steps in front of you"
                    f" and {abs(lateral)} steps to your {side}."
                )
        parts.append("The room has walls around you.")
        parts.append(f"You are facing a wall {self._wall_distance()} steps away.")
        if self.carrying is None:
            parts.append("You are not carrying anything.")
        else:
            parts.append(f"You are carrying a {self.carrying}.")
        return "In front of you in this room, you can see several objects: " + " ".join(parts)

    # -- actions -----------------------------------------------------------

    def _apply(self, action: str) -> str:
        if action == "turn left":
            self.facing = _left(self.facing)
            self.record_performed(action)
            return self._render()
        if action == "turn right":
            self.facing = _right(self.facing)
            self.record_performed(action)
            return self._render()
        if action == "move forward":
            nx, ny = self.agent[0] + self.facing[0], self.agent[1] + self.facing[1]
            if self._blocked(nx, ny):
                return BARRIER
            self.agent = (nx, ny)
            self.record_performed(action)
            return self._render()
        if action.startswith("go to "):
            return self._go_to(action[len("go to ") :].strip())
        if action == "pick up":
            return self._pick_up()
        if action == "drop":
            return self._drop()
        verb = action.split(" ", 1)[0] if action else ""
        if verb in {"turn", "move", "go", "pick", "drop"}:
            return NO_MATCH
        return UNKNOWN_ACTION

    def _go_to(self, label: str) -> str:
        target = next((obj for obj in self.objects if obj.label == label), None)
        if target is None:
            return NO_MATCH
        goal_cells = [
            (target.x + dx, target.y + dy)
            for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0))
            if not self._blocked(target.x + dx, target.y + dy)
        ]
        if self.agent in goal_cells:
            chosen = self.agent
        else:
            chosen = self._nearest_reachable(goal_cells)
            if chosen is None:
                return f"You can't find a way to the {label}."
            self.agent = chosen
        self.facing = (target.x - chosen[0], target.y - chosen[1])
        self.record_performed(f"go to {label}")
        return self._render()

    def _nearest_reachable(self, goals: list[tuple[int, int]]) -> tuple[int, int] | None:
        """Breadth-first search from the agent cell over free cells."""
        if not goals:
            return None
        goal_set = set(goals)
        queue = deque([self.agent])
        dist = {self.agent: 0}
        found: list[tuple[int, tuple[int, int]]] = []
        while queue:
            cell = queue.popleft()
            if cell in goal_set:
                found.append((dist[cell], cell))
                continue
            for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
                nxt = (cell[0] + dx, cell[1] + dy)
                if nxt in dist or self._blocked(*nxt):
                    continue
                dist[nxt] = dist[cell] + 1
                queue.append(nxt)
        if not found:
            return None
        return min(found, key=lambda pair: (pair[0], pair[1]))[1]

    def _pick_up(self) -> str:
        if self.carrying is not None:
            return "You are already carrying something."
        ahead = (self.agent[0] + self.facing[0], self.agent[1] + self.facing[1])
        target = self._object_at(*ahead)
        if target is None:
            return "There is nothing in front of you to pick up."
        self.carrying = target.label
        self.objects = [obj for obj in self.objects if obj.label != target.label]
        self.record_performed(f"pick up {target.label}")
        return f"You pick up the {target.label}."

    def _drop(self) -> str:
        if self.carrying is None:
            return "You are not carrying anything to drop."
        ahead = (self.agent[0] + self.facing[0], self.agent[1] + self.facing[1])
        if self._blocked(*ahead):
            return "You can't drop anything here."
        label = self.carrying
        self.carrying = None
        self.objects.append(GridObject(label, ahead[0], ahead[1]))
        self.record_performed(f"drop {label}")
        return f"You drop the {label}."

    # -- predicates and grounding -------------------------------------------

    def _predicate_holds(self, predicate: Mapping[str, Any]) -> bool:
        kind = predicate["kind"]
        if kind == "seen_object":
            return predicate["object"] in self.seen
        if kind == "adjacent":
            target = next(
                (obj for obj in self.objects if obj.label == predicate["object"]), None
            )
            if target is None:
                return False
            return abs(target.x - self.agent[0]) + abs(target.y - self.agent[1]) == 1
        if kind == "holding":
            return self.carrying == predicate["object"]
        if kind == "action_performed":
            return predicate["action"] in self.performed_actions
        raise ValueError(f"unknown predicate kind for gridnav: {kind!r}")

    def _enumerate_actions(self) -> tuple[str, ...]:
        actions = ["turn left", "turn right", "move forward"]
        actions.extend(f"go to {obj.label}" for obj in self.objects)
        ahead = (self.agent[0] + self.facing[0], self.agent[1] + self.facing[1])
        if self.carrying is None and self._object_at(*ahead) is not None:
            actions.append("pick up")
        if self.carrying is not None and not self._blocked(*ahead):
            actions.append("drop")
        return tuple(actions)
