"""Mock tool implementations and the stateful world they execute against.

Execution is fully deterministic: pure tools are lookup tables or arithmetic,
stateful tools mutate named state families on a per-episode MockWorld copy.
Tools whose runtime would be a foreign language (Java/JS-flavored suites) are
registered as signature-only: "executing" them validates the call against its
schema and returns an acceptance payload.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from agentrig.tools import schema as call_schema
from agentrig.types import ExecutionResult, ToolCall, values_equal

LITERS_PER_GALLON = 3.785411784


class ToolError(Exception):
    """In-band tool failure; becomes an error ExecutionResult, never aborts."""


DEFAULT_FAMILIES: dict[str, dict] = {
    "vehicle": {
        "fuel_level": 0.0,
        "tank_capacity": 50.0,
        "doors": {
            "driver": "unlocked",
            "passenger": "unlocked",
            "rear_left": "unlocked",
            "rear_right": "unlocked",
        },
        "parking_brake": "released",
        "headlights": "off",
    },
    "watchlist": {"stocks": []},
    "portfolio": {"holdings": {}},
    "game": {"saves": []},
    "files": {
        "cwd": "/",
        "dirs": {
            "/": ["academic_venture", "projects"],
            "/academic_venture": ["thesis.tex", "data.csv"],
            "/projects": [],
        },
    },
}


def _deep_merge(base: dict, overrides: Mapping) -> None:
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(base.get(key), dict):
            _deep_merge(base[key], value)
        else:
            base[key] = copy.deepcopy(value)


@dataclass
class MockWorld:
    """Named state stores, one dict per stateful tool family."""

    state: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def initial(cls, overrides: Mapping | None = None) -> "MockWorld":
        state = copy.deepcopy(DEFAULT_FAMILIES)
        if overrides:
            _deep_merge(state, overrides)
        return cls(state)

    def copy(self) -> "MockWorld":
        return MockWorld(copy.deepcopy(self.state))

    def family(self, name: str) -> dict:
        if name not in self.state:
            raise KeyError(f"unknown state family: {name}")
        return self.state[name]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MockWorld):
            return NotImplemented
        return values_equal(self.state, other.state)


# --- pure tools ---

_CURRENCY_RATES = {
    ("EUR", "CAD"): 1.474,
    ("EUR", "USD"): 1.09,
    ("USD", "CAD"): 1.36,
    ("USD", "EUR"): 0.92,
    ("GBP", "USD"): 1.27,
}

_ZIPCODES = {
    "Crescent Hollow": "69238",
    "Autumnville": "51479",
    "Gilroy": "95020",
    "San Jose": "95112",
}

_DISTANCES = {
    ("51479", "69238"): 630.0,
    ("95020", "95112"): 32.0,
}

_SNOW_REPORTS = {
    "Paris, France": {"snow_cm": 0.0, "condition": "no snow"},
    "Bordeaux, France": {"snow_cm": 0.0, "condition": "rain"},
    "Chamonix, France": {"snow_cm": 35.5, "condition": "fresh powder"},
}

_INTERVIEWERS = {
    "Python": ["Priya Nair", "Tom Becker"],
    "Java": ["Ana Silva", "Marcus Webb"],
    "Go": ["Lena Fischer"],
}

_INTERVIEWER_REVIEWS = {
    "Priya Nair": 4.8,
    "Tom Becker": 4.1,
    "Ana Silva": 4.6,
    "Marcus Webb": 3.9,
    "Lena Fischer": 4.4,
}

_PROVIDERS = {
    ("Gilroy, CA", "Family Counselor"): ["Harmony Family Counseling", "Gilroy Wellness Group"],
    ("Gilroy, CA", "Dentist"): ["Bright Smiles Gilroy"],
}

_WEATHER = {
    "Gilroy, CA": {"temp_c": 24.0, "condition": "sunny"},
    "London, UK": {"temp_c": 12.0, "condition": "overcast"},
}

_HOUSES = {
    "London, UK": [
        {"name": "Camden Loft", "sleeps": 4, "rating": 4.7},
        {"name": "Soho Mews House", "sleeps": 6, "rating": 4.5},
    ],
}

_HISTORICAL_FIGURES = {
    "Marie Curie": {"born": 1867, "field": "physics and chemistry"},
    "Alan Turing": {"born": 1912, "field": "computer science"},
}

_FOD_MENU = ("PIZZA", "BURGER", "SALAD", "SUSHI")


def _convert_currency(amount, from_currency, to_currency):
    rate = _CURRENCY_RATES.get((from_currency, to_currency))
    if rate is None:
        inverse = _CURRENCY_RATES.get((to_currency, from_currency))
        if inverse is None:
            raise ToolError(f"no rate for {from_currency}->{to_currency}")
        rate = round(1.0 / inverse, 6)
    return {"amount": round(amount * rate, 2), "currency": to_currency}


def _gallon_to_liter(gallon):
    return {"liters": round(gallon * LITERS_PER_GALLON, 4)}


def _liter_to_gallon(liter):
    return {"gallons": round(liter / LITERS_PER_GALLON, 4)}


def _area_circle(radius):
    if radius < 0:
        raise ToolError("radius must be non-negative")
    return {"area": round(math.pi * radius * radius, 6)}


def _plot_sine_wave(frequency, amplitude):
    return {"status": "rendered", "frequency": frequency, "amplitude": amplitude}


def _logarithm(value, base, precision):
    if value <= 0 or base <= 0 or base == 1:
        raise ToolError("logarithm needs value > 0 and base > 0, base != 1")
    return {"result": round(math.log(value) / math.log(base), precision)}


def _zipcode(city):
    if city not in _ZIPCODES:
        raise ToolError(f"unknown city: {city}")
    return {"zipcode": _ZIPCODES[city]}


def _distance(cityA, cityB):
    key = tuple(sorted((cityA, cityB)))
    if key not in _DISTANCES:
        raise ToolError(f"no distance data for {cityA} and {cityB}")
    return {"distance": _DISTANCES[key]}


def _drive_feasibility(distance):
    return {"feasible": distance <= 400.0}


def _snow_report(location):
    if location not in _SNOW_REPORTS:
        raise ToolError(f"no snow report for {location}")
    return _SNOW_REPORTS[location]


def _interviewer_list(skill):
    if skill not in _INTERVIEWERS:
        raise ToolError(f"no interviewers for skill: {skill}")
    return {"interviewers": _INTERVIEWERS[skill]}


def _interviewer_review(name):
    if name not in _INTERVIEWER_REVIEWS:
        raise ToolError(f"no reviews for {name}")
    return {"name": name, "rating": _INTERVIEWER_REVIEWS[name]}


def _find_provider(city, type):
    providers = _PROVIDERS.get((city, type))
    if not providers:
        raise ToolError(f"no providers of type {type!r} in {city}")
    return {"providers": providers}


def _book_appointment(provider, date):
    return {"status": "booked", "provider": provider, "date": date}


def _get_weather(city):
    if city not in _WEATHER:
        raise ToolError(f"no weather data for {city}")
    return _WEATHER[city]


def _search_house(where_to, number_of_adults):
    houses = [h for h in _HOUSES.get(where_to, []) if h["sleeps"] >= number_of_adults]
    if not houses:
        raise ToolError(f"no houses for {number_of_adults} in {where_to}")
    return {"houses": houses}


def _book_house(house_name, check_in_date):
    return {"status": "booked", "house": house_name, "check_in": check_in_date}


def _cha_fod(TheFod):
    if TheFod not in _FOD_MENU:
        raise ToolError(f"not on the menu: {TheFod}")
    return {"order": TheFod, "status": "placed"}


def _historical_figure(name):
    if name not in _HISTORICAL_FIGURES:
        raise ToolError(f"no record for {name}")
    return _HISTORICAL_FIGURES[name]


def _calculate_tax(income):
    if income < 0:
        raise ToolError("income must be non-negative")
    return {"tax": round(income * 0.24, 2)}


# --- stateful tools ---

def _fill_fuel_tank(state, fuelAmount):
    if fuelAmount <= 0:
        raise ToolError("fuelAmount must be positive")
    new_level = round(state["fuel_level"] + fuelAmount, 4)
    if new_level > state["tank_capacity"]:
        raise ToolError(
            f"cannot fill {fuelAmount}: level {state['fuel_level']} "
            f"would exceed capacity {state['tank_capacity']}"
        )
    state["fuel_level"] = new_level
    return {"fuel_level": new_level}


def _lock_doors(state, unlock, door):
    target = "unlocked" if unlock else "locked"
    for name in door:
        if name not in state["doors"]:
            raise ToolError(f"unknown door: {name}")
    for name in door:
        state["doors"][name] = target
    return {"doors": dict(state["doors"])}


def _parking_brake(state, mode):
    if mode not in ("engage", "release"):
        raise ToolError(f"unknown parking brake mode: {mode}")
    state["parking_brake"] = "engaged" if mode == "engage" else "released"
    return {"parking_brake": state["parking_brake"]}


def _set_headlights(state, mode):
    if mode not in ("on", "off", "auto"):
        raise ToolError(f"unknown headlight mode: {mode}")
    state["headlights"] = mode
    return {"headlights": mode}


def _add_to_watchlist(state, stock):
    if stock not in state["stocks"]:
        state["stocks"].append(stock)
    return {"stocks": list(state["stocks"])}


def _remove_from_watchlist(state, stock):
    if stock not in state["stocks"]:
        raise ToolError(f"{stock} is not on the watchlist")
    state["stocks"].remove(stock)
    return {"stocks": list(state["stocks"])}


def _get_watchlist(state):
    return {"stocks": list(state["stocks"])}


def _invest(state, company, amount):
    if amount <= 0:
        raise ToolError("amount must be positive")
    holdings = state["holdings"]
    holdings[company] = round(holdings.get(company, 0) + amount, 2)
    return {"company": company, "holding": holdings[company]}


def _withdraw(state, company, amount):
    holdings = state["holdings"]
    held = holdings.get(company, 0)
    if amount <= 0:
        raise ToolError("amount must be positive")
    if amount > held:
        raise ToolError(f"cannot withdraw {amount} from {company}: holding is {held}")
    holdings[company] = round(held - amount, 2)
    return {"company": company, "holding": holdings[company]}


def _save_progress(state, stage, mode):
    state["saves"].append({"stage": stage, "mode": mode})
    return {"saved": True, "slot": len(state["saves"])}


def _cd(state, folder):
    if folder == "..":
        if state["cwd"] == "/":
            raise ToolError("already at the root")
        state["cwd"] = state["cwd"].rsplit("/", 1)[0] or "/"
        return {"cwd": state["cwd"]}
    base = state["cwd"].rstrip("/")
    target = f"{base}/{folder}"
    if target not in state["dirs"]:
        raise ToolError(f"no such folder: {folder}")
    state["cwd"] = target
    return {"cwd": target}


def _ls(state):
    return {"cwd": state["cwd"], "entries": list(state["dirs"].get(state["cwd"], []))}


@dataclass(frozen=True)
class ToolImpl:
    """Executable behavior behind one tool name."""

    name: str
    kind: str  # pure | stateful | signature
    fn: Callable | None = None
    family: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("pure", "stateful", "signature"):
            raise ValueError(f"unknown tool kind: {self.kind!r}")
        if self.kind == "stateful" and not self.family:
            raise ValueError(f"{self.name}: stateful tools need a family")


REGISTRY: dict[str, ToolImpl] = {
    impl.name: impl
    for impl in [
        ToolImpl("currency_conversion.convert", "pure", _convert_currency),
        ToolImpl("gallon_to_liter", "pure", _gallon_to_liter),
        ToolImpl("liter_to_gallon", "pure", _liter_to_gallon),
        ToolImpl("geometry.area_circle", "pure", _area_circle),
        ToolImpl("plot_sine_wave", "pure", _plot_sine_wave),
        ToolImpl("logarithm", "pure", _logarithm),
        ToolImpl("get_zipcode_based_on_city", "pure", _zipcode),
        ToolImpl("estimate_distance", "pure", _distance),
        ToolImpl("estimate_drive_feasibility_by_mileage", "pure", _drive_feasibility),
        ToolImpl("get_snow_report", "pure", _snow_report),
        ToolImpl("get_interviewer_list", "pure", _interviewer_list),
        ToolImpl("review_of_interviewer", "pure", _interviewer_review),
        ToolImpl("Services_4_FindProvider", "pure", _find_provider),
        ToolImpl("Services_4_BookAppointment", "pure", _book_appointment),
        ToolImpl("Weather_1_GetWeather", "pure", _get_weather),
        ToolImpl("Hotels_2_SearchHouse", "pure", _search_house),
        ToolImpl("Hotels_2_BookHouse", "pure", _book_house),
        ToolImpl("ChaFod", "pure", _cha_fod),
        ToolImpl("get_historical_figure_info", "pure", _historical_figure),
        ToolImpl("calculate_tax", "pure", _calculate_tax),
        ToolImpl("NFILibrary.isMemberReadable", "signature"),
        ToolImpl("resetStateProperty", "signature"),
        ToolImpl("fillFuelTank", "stateful", _fill_fuel_tank, "vehicle"),
        ToolImpl("lockDoors", "stateful", _lock_doors, "vehicle"),
        ToolImpl("activateParkingBrake", "stateful", _parking_brake, "vehicle"),
        ToolImpl("setHeadlights", "stateful", _set_headlights, "vehicle"),
        ToolImpl("add_to_watchlist", "stateful", _add_to_watchlist, "watchlist"),
        ToolImpl("remove_from_watchlist", "stateful", _remove_from_watchlist, "watchlist"),
        ToolImpl("get_watchlist", "stateful", _get_watchlist, "watchlist"),
        ToolImpl("investment.invest", "stateful", _invest, "portfolio"),
        ToolImpl("investment.withdraw", "stateful", _withdraw, "portfolio"),
        ToolImpl("game.save_progress", "stateful", _save_progress, "game"),
        ToolImpl("cd", "stateful", _cd, "files"),
        ToolImpl("ls", "stateful", _ls, "files"),
    ]
}


def render_payload(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True)


def execute_calls(
    calls: Sequence[ToolCall],
    suite,
    world: MockWorld,
) -> tuple[list[ExecutionResult], MockWorld]:
    """Run calls sequentially against a copy of the world.

    Per-call failures become error results; the batch never aborts. Returns
    the results and the post-execution world.
    """
    new_world = world.copy()
    available = {t.name: t for t in suite.tools}
    results: list[ExecutionResult] = []
    for call in calls:
        if call.function not in available:
            results.append(ExecutionResult(call, "error", f"no such tool: {call.function}"))
            continue
        impl = REGISTRY.get(call.function)
        if impl is None:
            results.append(
                ExecutionResult(call, "error", f"tool {call.function!r} is not executable")
            )
            continue
        try:
            if impl.kind == "signature":
                verdict = call_schema.validate_call(call, available)
                if verdict.category != call_schema.OK:
                    raise ToolError(f"signature rejected: {verdict.detail}")
                payload: Any = {"accepted": True}
            elif impl.kind == "pure":
                payload = impl.fn(**call.arguments)
            else:
                payload = impl.fn(new_world.family(impl.family), **call.arguments)
        except ToolError as exc:
            results.append(ExecutionResult(call, "error", str(exc)))
            continue
        except TypeError as exc:
            results.append(ExecutionResult(call, "error", f"invalid arguments: {exc}"))
            continue
        results.append(ExecutionResult(call, "ok", render_payload(payload)))
    return results, new_world


def is_pure_tool(name: str) -> bool:
    impl = REGISTRY.get(name)
    return impl is not None and impl.kind in ("pure", "signature")


def judge_turn(
    executed_world: MockWorld,
    golden_world: MockWorld,
    results: Sequence[ExecutionResult],
    golden_calls: Sequence[ToolCall],
) -> bool:
    """State equality plus golden pure calls present among executed OK calls."""
    if executed_world != golden_world:
        return False
    ok_calls = [r.call for r in results if r.outcome == "ok"]
    for golden in golden_calls:
        if not is_pure_tool(golden.function):
            continue
        if not any(golden == executed for executed in ok_calls):
            return False
    return True
