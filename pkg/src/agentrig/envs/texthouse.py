"""Text household environment: locations, containers, a one-item hand.

Rooms are authored in the task's env_config as an ordered list of
locations (surfaces or openable containers) holding labelled items.
Actions are plain strings; object references may drop the trailing
number when unambiguous ("take bowl from desk 2").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from ..types import TaskSpec
from .base import NO_MATCH, UNKNOWN_ACTION, Environment, Subgoal, parse_subgoals

_VOWELS = "aeiou"

_DEFAULT_HOUSE = [
    {"name": "cabinet 1", "type": "container", "open": True,
     "items": ["cloth 1", "soapbar 1", "soapbottle 1"]},
    {"name": "cabinet 2", "type": "container", "open": False,
     "items": ["candle 1", "spraybottle 2"]},
    {"name": "countertop 1", "type": "surface", "items": []},
    {"name": "sinkbasin 1", "type": "surface", "items": []},
    {"name": "toilet 1", "type": "surface", "items": ["soapbottle 2"]},
    {"name": "garbagecan 1", "type": "surface", "items": []},
]

_DEFAULT_SUBGOALS = [
    {"id": "found-spraybottle", "description": "opened cabinet 2",
     "predicate": {"kind": "container_open", "location": "cabinet 2"}},
    {"id": "spraybottle-on-toilet", "description": "put the spraybottle on the toilet",
     "predicate": {"kind": "object_at", "object": "spraybottle 2", "location": "toilet 1"}},
]


def _article(label: str) -> str:
    return "an" if label[:1].lower() in _VOWELS else "a"


def _kind_of(label: str) -> str:
    head, _, tail = label.rpartition(" ")
    return head if head and tail.isdigit() else label


@dataclass
class Location:
    name: str
    type: str
    open: bool
    items: list[str] = field(default_factory=list)

    @property
    def accessible(self) -> bool:
        """Whether the items are reachable (surfaces always are)."""
        return self.type == "surface" or self.open


class TextHouseEnv(Environment):
    """ALFWorld-flavoured household with a grounded verb x object space.

    Verbs: go to, open, close, take, put, examine, use.  Subgoal
    predicate kinds: ``visited``, ``holding``, ``container_open``,
    ``object_at``, ``action_performed``, ``action_while_holding``.
    """

    name = "texthouse"

    def __init__(self, task: TaskSpec, seed: int) -> None:
        config = task.env_config
        raw_locations = config.get("locations", _DEFAULT_HOUSE)
        self.locations: dict[str, Location] = {}
        for entry in raw_locations:
            loc = Location(
                name=entry["name"],
                type=entry.get("type", "surface"),
                open=bool(entry.get("open", entry.get("type", "surface") == "surface")),
                items=list(entry.get("items", ())),
            )
            if loc.type not in ("surface", "container"):
                raise ValueError(f"unknown location type: {loc.type!r}")
            if loc.name in self.locations:
                raise ValueError(f"duplicate location name: {loc.name!r}")
            self.locations[loc.name] = loc
        labels = [item for loc in self.locations.values() for item in loc.items]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate item labels across locations")
        self.agent_at: str | None = None
        self.inventory: str | None = None
        self.visited: set[str] = set()
        self._held_log: list[tuple[str, str | None]] = []
        subgoals = parse_subgoals(config)
        if not subgoals:
            if "locations" in config:
                raise ValueError("authored texthouse tasks must declare subgoals")
            subgoals = tuple(Subgoal.from_dict(entry) for entry in _DEFAULT_SUBGOALS)
        super().__init__(task, subgoals)

    # -- rendering ----------------------------------------------------------

    def _render(self) -> str:
        listed = ", ".join(
            f"{_article(name)} {name}" for name in self.locations
        )
        return (
            "You are in the middle of a room. Looking quickly around you, "
            f"you see {listed}."
        )

    def _location_view(self, loc: Location) -> str:
        if not loc.accessible:
            return f"The {loc.name} is closed."
        if not loc.items:
            return f"On the {loc.name}, you see nothing."
        listed = ", ".join(f"{_article(item)} {item}" for item in loc.items)
        return f"On the {loc.name}, you see {listed}."

    # -- resolution helpers ---------------------------------------------------

    def _visible_items(self) -> list[str]:
        if self.agent_at is None:
            return []
        loc = self.locations[self.agent_at]
        return list(loc.items) if loc.accessible else []

    def _resolve(self, reference: str, candidates: list[str]) -> str | None | tuple:
        """Resolve an object reference to a label.

        Returns the label, None when nothing matches, or a tuple
        ``("ambiguous", kind)`` when several items share the kind.
        """
        if reference in candidates:
            return reference
        matches = [label for label in candidates if _kind_of(label) == reference]
        if len(matches) == 1:
            return matches[0]
        if len(matches) > 1:
            return ("ambiguous", reference)
        return None

    def _ambiguous(self, kind: str) -> str:
        place = self.agent_at if self.agent_at is not None else "room"
        return f"Ambiguous request: multiple {kind}s are present in the {place}."

    # -- actions -----------------------------------------------------------

    def _apply(self, action: str) -> str:
        if action.startswith("go to "):
            return self._go_to(action[len("go to ") :].strip())
        if action.startswith("open "):
            return self._open(action[len("open ") :].strip())
        if action.startswith("close "):
            return self._close(action[len("close ") :].strip())
        if action.startswith("take "):
            return self._take(action[len("take ") :].strip())
        if action.startswith("put "):
            return self._put(action[len("put ") :].strip())
        if action.startswith("examine "):
            return self._examine(action[len("examine ") :].strip())
        if action.startswith("use "):
            return self._use(action[len("use ") :].strip())
        return UNKNOWN_ACTION

    def _go_to(self, name: str) -> str:
        if name not in self.locations:
            return NO_MATCH
        if name == self.agent_at:
            return "Nothing happens."
        self.agent_at = name
        self.visited.add(name)
        self.record_performed(f"go to {name}")
        return self._location_view(self.locations[name])

    def _open(self, name: str) -> str:
        if name != self.agent_at or name not in self.locations:
            return NO_MATCH
        loc = self.locations[name]
        if loc.type != "container":
            return "Nothing happens."
        if loc.open:
            return f"The {loc.name} is already open."
        loc.open = True
        self.record_performed(f"open {name}")
        if loc.items:
            if len(loc.items) == 1:
                listed = f"{_article(loc.items[0])} {loc.items[0]}"
            else:
                head = ", ".join(f"{_article(item)} {item}" for item in loc.items[:-1])
                listed = f"{head}, and {_article(loc.items[-1])} {loc.items[-1]}"
            contents = f"In it, you see {listed}."
        else:
            contents = "In it, you see nothing."
        return f"You open the {loc.name}. The {loc.name} is open. {contents}"

    def _close(self, name: str) -> str:
        if name != self.agent_at or name not in self.locations:
            return NO_MATCH
        loc = self.locations[name]
        if loc.type != "container" or not loc.open:
            return "Nothing happens."
        loc.open = False
        self.record_performed(f"close {name}")
        return f"You close the {loc.name}."

    def _take(self, rest: str) -> str:
        reference, sep, name = rest.partition(" from ")
        if not sep or name != self.agent_at or name not in self.locations:
            return NO_MATCH
        loc = self.locations[name]
        if not loc.accessible:
            return NO_MATCH
        resolved = self._resolve(reference.strip(), loc.items)
        if resolved is None:
            return NO_MATCH
        if isinstance(resolved, tuple):
            return self._ambiguous(resolved[1])
        if self.inventory is not None:
            return "You are already carrying something."
        loc.items.remove(resolved)
        self.inventory = resolved
        self.record_performed(f"take {resolved} from {name}")
        return f"You pick up the {resolved} from the {name}."

    def _put(self, rest: str) -> str:
        for sep in (" in/on ", " on ", " in "):
            reference, found, name = rest.partition(sep)
            if found:
                break
        else:
            return NO_MATCH
        name = name.strip()
        if name != self.agent_at or name not in self.locations:
            return NO_MATCH
        loc = self.locations[name]
        if not loc.accessible:
            return NO_MATCH
        if self.inventory is None:
            return "You are not carrying anything."
        held = self.inventory
        reference = reference.strip()
        if reference not in (held, _kind_of(held)):
            return NO_MATCH
        loc.items.append(held)
        self.inventory = None
        self.record_performed(f"put {held} in/on {name}")
        return f"You put the {held} in/on the {name}."

    def _examine(self, reference: str) -> str:
        if reference == self.agent_at and reference in self.locations:
            self.record_performed(f"examine {reference}")
            return self._location_view(self.locations[reference])
        candidates = self._visible_items()
        if self.inventory is not None:
            candidates.append(self.inventory)
        resolved = self._resolve(reference, candidates)
        if resolved is None:
            return NO_MATCH
        if isinstance(resolved, tuple):
            return self._ambiguous(resolved[1])
        self.record_performed(f"examine {resolved}")
        return f"You look closely at the {resolved}."

    def _use(self, reference: str) -> str:
        candidates = self._visible_items()
        if self.inventory is not None:
            candidates.append(self.inventory)
        resolved = self._resolve(reference, candidates)
        if resolved is None:
            return NO_MATCH
        if isinstance(resolved, tuple):
            return self._ambiguous(resolved[1])
        if "lamp" not in _kind_of(resolved):
            return "Nothing happens."
        self.record_performed(f"use {resolved}")
        return f"You turn on the {resolved}."

    def record_performed(self, canonical_action: str) -> None:
        super().record_performed(canonical_action)
        self._held_log.append((canonical_action, self.inventory))

    # -- predicates and grounding -------------------------------------------

    def _predicate_holds(self, predicate: Mapping[str, Any]) -> bool:
        kind = predicate["kind"]
        if kind == "visited":
            return predicate["location"] in self.visited
        if kind == "holding":
            return self.inventory == predicate["object"]
        if kind == "container_open":
            loc = self.locations.get(predicate["location"])
            return loc is not None and loc.type == "container" and loc.open
        if kind == "object_at":
            loc = self.locations.get(predicate["location"])
            return loc is not None and predicate["object"] in loc.items
        if kind == "action_performed":
            return predicate["action"] in self.performed_actions
        if kind == "action_while_holding":
            return any(
                action == predicate["action"] and held == predicate["object"]
                for action, held in self._held_log
            )
        raise ValueError(f"unknown predicate kind for texthouse: {kind!r}")

    def _enumerate_actions(self) -> tuple[str, ...]:
        actions: list[str] = [
            f"go to {name}" for name in self.locations if name != self.agent_at
        ]
        if self.agent_at is None:
            return tuple(actions)
        loc = self.locations[self.agent_at]
        if loc.type == "container":
            actions.append(f"close {loc.name}" if loc.open else f"open {loc.name}")
        actions.append(f"examine {loc.name}")
        visible = self._visible_items()
        reachable = visible + ([self.inventory] if self.inventory is not None else [])
        visible_kinds: dict[str, int] = {}
        for item in visible:
            visible_kinds[_kind_of(item)] = visible_kinds.get(_kind_of(item), 0) + 1
        reachable_kinds: dict[str, int] = {}
        for item in reachable:
            reachable_kinds[_kind_of(item)] = reachable_kinds.get(_kind_of(item), 0) + 1
        for item in reachable:
            kind = _kind_of(item)
            if self.inventory is None and item in visible:
                actions.append(f"take {item} from {loc.name}")
                if visible_kinds[kind] == 1:
                    actions.append(f"take {kind} from {loc.name}")
            actions.append(f"examine {item}")
            if reachable_kinds[kind] == 1:
                actions.append(f"examine {kind}")
            if "lamp" in kind:
                actions.append(f"use {item}")
                if reachable_kinds[kind] == 1:
                    actions.append(f"use {kind}")
        if self.inventory is not None and loc.accessible:
            held = self.inventory
            actions.append(f"put {held} in/on {loc.name}")
            actions.append(f"put {_kind_of(held)} in/on {loc.name}")
        return tuple(dict.fromkeys(actions))
