"""Mock tool world: pure/stateful/signature execution, copies, and judging."""

from __future__ import annotations

import json

import pytest

from agentrig.tools.suite import ToolSuite
from agentrig.tools.world import (
    DEFAULT_FAMILIES,
    LITERS_PER_GALLON,
    REGISTRY,
    MockWorld,
    execute_calls,
    is_pure_tool,
    judge_turn,
    render_payload,
)
from agentrig.types import ToolCall, ToolSpec, UserTurn


def _suite_with(*names: str) -> ToolSuite:
    """Minimal suite exposing the named tools with permissive schemas."""
    tools = []
    for name in names:
        if name == "NFILibrary.isMemberReadable":
            params = {"properties": {"symbol": {"type": "string"}}, "required": ["symbol"]}
        elif name == "resetStateProperty":
            params = {
                "properties": {"stateProperty": {"type": "string"}},
                "required": ["stateProperty"],
            }
        else:
            params = {}
        tools.append(ToolSpec(name, "", params))
    return ToolSuite(
        id="t",
        category="simple",
        tools=tuple(tools),
        turns=(UserTurn("m"),),
    )


def _run_one(world: MockWorld, call: ToolCall):
    results, new_world = execute_calls([call], _suite_with(call.function), world)
    return results[0], new_world


# -- world container ----------------------------------------------------------


def test_initial_world_deep_copies_defaults():
    a, b = MockWorld.initial(), MockWorld.initial()
    a.family("watchlist")["stocks"].append("ZETA")
    assert b.family("watchlist")["stocks"] == []
    assert DEFAULT_FAMILIES["watchlist"]["stocks"] == []


def test_initial_world_merge_overrides():
    world = MockWorld.initial({"vehicle": {"fuel_level": 10.0}, "watchlist": {"stocks": ["A"]}})
    assert world.family("vehicle")["fuel_level"] == 10.0
    assert world.family("vehicle")["tank_capacity"] == 50.0  # untouched sibling key
    assert world.family("watchlist")["stocks"] == ["A"]


def test_world_copy_is_independent_and_equality_structural():
    world = MockWorld.initial()
    clone = world.copy()
    assert world == clone
    clone.family("vehicle")["fuel_level"] = 5.0
    assert world != clone
    assert world.family("vehicle")["fuel_level"] == 0.0
    with pytest.raises(KeyError):
        world.family("nope")


def test_execute_never_mutates_the_input_world():
    world = MockWorld.initial()
    result, new_world = _run_one(world, ToolCall("fillFuelTank", {"fuelAmount": 10.0}))
    assert result.outcome == "ok"
    assert world.family("vehicle")["fuel_level"] == 0.0
    assert new_world.family("vehicle")["fuel_level"] == 10.0


# -- pure tools ----------------------------------------------------------------


def test_currency_conversion_direct_rate():
    result, _ = _run_one(
        MockWorld.initial(),
        ToolCall(
            "currency_conversion.convert",
            {"amount": 150, "from_currency": "EUR", "to_currency": "CAD"},
        ),
    )
    assert result.outcome == "ok"
    assert json.loads(result.payload) == {"amount": 221.1, "currency": "CAD"}


def test_currency_conversion_inverse_fallback():
    result, _ = _run_one(
        MockWorld.initial(),
        ToolCall(
            "currency_conversion.convert",
            {"amount": 100, "from_currency": "CAD", "to_currency": "EUR"},
        ),
    )
    assert result.outcome == "ok"
    assert json.loads(result.payload) == {"amount": round(100 * round(1 / 1.474, 6), 2), "currency": "EUR"}


def test_currency_conversion_unknown_pair_is_error():
    result, _ = _run_one(
        MockWorld.initial(),
        ToolCall(
            "currency_conversion.convert",
            {"amount": 1, "from_currency": "EUR", "to_currency": "JPY"},
        ),
    )
    assert result.outcome == "error"
    assert "no rate" in result.payload


def test_gallon_liter_round_trip():
    result, _ = _run_one(MockWorld.initial(), ToolCall("gallon_to_liter", {"gallon": 13.2}))
    liters = json.loads(result.payload)["liters"]
    assert liters == round(13.2 * LITERS_PER_GALLON, 4)
    back, _ = _run_one(MockWorld.initial(), ToolCall("liter_to_gallon", {"liter": liters}))
    assert json.loads(back.payload)["gallons"] == pytest.approx(13.2, abs=1e-3)


def test_area_circle_and_negative_radius():
    result, _ = _run_one(MockWorld.initial(), ToolCall("geometry.area_circle", {"radius": 10}))
    assert json.loads(result.payload)["area"] == pytest.approx(314.159265, abs=1e-6)
    bad, _ = _run_one(MockWorld.initial(), ToolCall("geometry.area_circle", {"radius": -1}))
    assert bad.outcome == "error"


def test_logarithm_precision_and_domain():
    result, _ = _run_one(
        MockWorld.initial(), ToolCall("logarithm", {"value": 630.0, "base": 10, "precision": 5})
    )
    assert json.loads(result.payload) == {"result": 2.79934}
    bad, _ = _run_one(
        MockWorld.initial(), ToolCall("logarithm", {"value": -1, "base": 10, "precision": 2})
    )
    assert bad.outcome == "error"


def test_zipcode_distance_feasibility_chain():
    world = MockWorld.initial()
    r1, _ = _run_one(world, ToolCall("get_zipcode_based_on_city", {"city": "Crescent Hollow"}))
    r2, _ = _run_one(world, ToolCall("get_zipcode_based_on_city", {"city": "Autumnville"}))
    assert json.loads(r1.payload) == {"zipcode": "69238"}
    assert json.loads(r2.payload) == {"zipcode": "51479"}
    # distance is symmetric in its two arguments
    d1, _ = _run_one(world, ToolCall("estimate_distance", {"cityA": "69238", "cityB": "51479"}))
    d2, _ = _run_one(world, ToolCall("estimate_distance", {"cityA": "51479", "cityB": "69238"}))
    assert json.loads(d1.payload) == json.loads(d2.payload) == {"distance": 630.0}
    near, _ = _run_one(
        world, ToolCall("estimate_drive_feasibility_by_mileage", {"distance": 100})
    )
    far, _ = _run_one(
        world, ToolCall("estimate_drive_feasibility_by_mileage", {"distance": 630.0})
    )
    assert json.loads(near.payload) == {"feasible": True}
    assert json.loads(far.payload) == {"feasible": False}


def test_snow_reports():
    for location in ("Paris, France", "Bordeaux, France"):
        result, _ = _run_one(MockWorld.initial(), ToolCall("get_snow_report", {"location": location}))
        assert result.outcome == "ok"
        assert json.loads(result.payload)["snow_cm"] == 0.0
    missing, _ = _run_one(
        MockWorld.initial(), ToolCall("get_snow_report", {"location": "Atlantis"})
    )
    assert missing.outcome == "error"


def test_interviewers_and_providers_and_houses():
    result, _ = _run_one(MockWorld.initial(), ToolCall("get_interviewer_list", {"skill": "Python"}))
    assert json.loads(result.payload)["interviewers"]
    result, _ = _run_one(
        MockWorld.initial(),
        ToolCall("Services_4_FindProvider", {"city": "Gilroy, CA", "type": "Family Counselor"}),
    )
    assert len(json.loads(result.payload)["providers"]) == 2
    result, _ = _run_one(
        MockWorld.initial(),
        ToolCall("Hotels_2_SearchHouse", {"where_to": "London, UK", "number_of_adults": 4}),
    )
    houses = json.loads(result.payload)["houses"]
    assert {h["name"] for h in houses} == {"Camden Loft", "Soho Mews House"}
    result, _ = _run_one(
        MockWorld.initial(),
        ToolCall("Hotels_2_SearchHouse", {"where_to": "London, UK", "number_of_adults": 5}),
    )
    assert [h["name"] for h in json.loads(result.payload)["houses"]] == ["Soho Mews House"]


def test_cha_fod_menu():
    result, _ = _run_one(MockWorld.initial(), ToolCall("ChaFod", {"TheFod": "PIZZA"}))
    assert json.loads(result.payload) == {"order": "PIZZA", "status": "placed"}
    bad, _ = _run_one(MockWorld.initial(), ToolCall("ChaFod", {"TheFod": "GRUEL"}))
    assert bad.outcome == "error"


def test_calculate_tax():
    result, _ = _run_one(MockWorld.initial(), ToolCall("calculate_tax", {"income": 1000}))
    assert json.loads(result.payload) == {"tax": 240.0}


# -- signature tools -----------------------------------------------------------


def test_signature_tool_accepts_schema_conforming_call():
    result, _ = _run_one(
        MockWorld.initial(), ToolCall("NFILibrary.isMemberReadable", {"symbol": "getVersion"})
    )
    assert result.outcome == "ok"
    assert json.loads(result.payload) == {"accepted": True}


def test_signature_tool_rejects_bad_arguments():
    result, _ = _run_one(MockWorld.initial(), ToolCall("NFILibrary.isMemberReadable", {}))
    assert result.outcome == "error"
    assert "signature rejected" in result.payload
    result, _ = _run_one(
        MockWorld.initial(), ToolCall("resetStateProperty", {"stateProperty": 3})
    )
    assert result.outcome == "error"


# -- stateful tools --------------------------------------------------------------


def test_fill_fuel_tank_capacity_guard():
    world = MockWorld.initial()
    ok, world = _run_one(world, ToolCall("fillFuelTank", {"fuelAmount": 36.8}))
    assert json.loads(ok.payload) == {"fuel_level": 36.8}
    overfull, world = _run_one(world, ToolCall("fillFuelTank", {"fuelAmount": 36.8}))
    assert overfull.outcome == "error"
    assert "exceed capacity" in overfull.payload
    assert world.family("vehicle")["fuel_level"] == 36.8  # failed call left state alone
    bad, _ = _run_one(world, ToolCall("fillFuelTank", {"fuelAmount": 0}))
    assert bad.outcome == "error"


def test_lock_doors_all_or_nothing():
    world = MockWorld.initial()
    result, world = _run_one(
        world,
        ToolCall(
            "lockDoors",
            {"unlock": False, "door": ["driver", "passenger", "rear_left", "rear_right"]},
        ),
    )
    assert result.outcome == "ok"
    assert set(world.family("vehicle")["doors"].values()) == {"locked"}
    bad, world = _run_one(world, ToolCall("lockDoors", {"unlock": True, "door": ["trunk"]}))
    assert bad.outcome == "error"
    assert set(world.family("vehicle")["doors"].values()) == {"locked"}  # unchanged


def test_parking_brake_and_headlights():
    world = MockWorld.initial()
    result, world = _run_one(world, ToolCall("activateParkingBrake", {"mode": "engage"}))
    assert world.family("vehicle")["parking_brake"] == "engaged"
    result, world = _run_one(world, ToolCall("setHeadlights", {"mode": "on"}))
    assert world.family("vehicle")["headlights"] == "on"
    bad, _ = _run_one(world, ToolCall("setHeadlights", {"mode": "strobe"}))
    assert bad.outcome == "error"


def test_watchlist_idempotent_add_and_strict_remove():
    world = MockWorld.initial()
    _, world = _run_one(world, ToolCall("add_to_watchlist", {"stock": "ZETA"}))
    _, world = _run_one(world, ToolCall("add_to_watchlist", {"stock": "ZETA"}))
    assert world.family("watchlist")["stocks"] == ["ZETA"]
    listed, world = _run_one(world, ToolCall("get_watchlist", {}))
    assert json.loads(listed.payload) == {"stocks": ["ZETA"]}
    bad, world = _run_one(world, ToolCall("remove_from_watchlist", {"stock": "GHOST"}))
    assert bad.outcome == "error"
    _, world = _run_one(world, ToolCall("remove_from_watchlist", {"stock": "ZETA"}))
    assert world.family("watchlist")["stocks"] == []


def test_portfolio_invest_withdraw():
    world = MockWorld.initial()
    _, world = _run_one(world, ToolCall("investment.invest", {"company": "Google", "amount": 2000}))
    result, world = _run_one(
        world, ToolCall("investment.withdraw", {"company": "Google", "amount": 500})
    )
    assert json.loads(result.payload) == {"company": "Google", "holding": 1500}
    bad, world = _run_one(
        world, ToolCall("investment.withdraw", {"company": "Apple", "amount": 1})
    )
    assert bad.outcome == "error"
    assert "holding is 0" in bad.payload


def test_game_saves_accumulate():
    world = MockWorld.initial()
    first, world = _run_one(world, ToolCall("game.save_progress", {"stage": 7, "mode": "easy"}))
    second, world = _run_one(world, ToolCall("game.save_progress", {"stage": 3, "mode": "hard"}))
    assert json.loads(first.payload) == {"saved": True, "slot": 1}
    assert json.loads(second.payload) == {"saved": True, "slot": 2}
    assert world.family("game")["saves"] == [
        {"stage": 7, "mode": "easy"},
        {"stage": 3, "mode": "hard"},
    ]


def test_files_cd_and_ls():
    world = MockWorld.initial()
    listing, world = _run_one(world, ToolCall("ls", {}))
    assert json.loads(listing.payload) == {"cwd": "/", "entries": ["academic_venture", "projects"]}
    result, world = _run_one(world, ToolCall("cd", {"folder": "academic_venture"}))
    assert json.loads(result.payload) == {"cwd": "/academic_venture"}
    listing, world = _run_one(world, ToolCall("ls", {}))
    assert json.loads(listing.payload)["entries"] == ["thesis.tex", "data.csv"]
    up, world = _run_one(world, ToolCall("cd", {"folder": ".."}))
    assert json.loads(up.payload) == {"cwd": "/"}
    root_up, world = _run_one(world, ToolCall("cd", {"folder": ".."}))
    assert root_up.outcome == "error"
    missing, world = _run_one(world, ToolCall("cd", {"folder": "ghost"}))
    assert missing.outcome == "error"


# -- execution surface -----------------------------------------------------------


def test_unknown_tool_and_unavailable_tool():
    world = MockWorld.initial()
    # in the registry but not in this suite's inventory
    suite = _suite_with("ls")
    results, _ = execute_calls([ToolCall("cd", {"folder": "x"})], suite, world)
    assert results[0].outcome == "error"
    assert "no such tool" in results[0].payload


def test_invalid_arguments_surface_as_error():
    result, _ = _run_one(MockWorld.initial(), ToolCall("gallon_to_liter", {"bogus": 1}))
    assert result.outcome == "error"
    assert "invalid arguments" in result.payload


def test_batch_continues_after_a_failure():
    world = MockWorld.initial()
    suite = _suite_with("fillFuelTank", "get_watchlist")
    calls = [
        ToolCall("fillFuelTank", {"fuelAmount": -1}),
        ToolCall("get_watchlist", {}),
    ]
    results, _ = execute_calls(calls, suite, world)
    assert [r.outcome for r in results] == ["error", "ok"]


def test_render_payload_strings_pass_through_dicts_sorted():
    assert render_payload("already text") == "already text"
    assert render_payload({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'


def test_is_pure_tool_covers_signature_kind():
    assert is_pure_tool("gallon_to_liter")
    assert is_pure_tool("NFILibrary.isMemberReadable")
    assert not is_pure_tool("fillFuelTank")
    assert not is_pure_tool("made_up")


# -- judging ----------------------------------------------------------------------


def test_judge_turn_requires_world_equality():
    suite = _suite_with("fillFuelTank")
    start = MockWorld.initial()
    golden_calls = [ToolCall("fillFuelTank", {"fuelAmount": 10.0})]
    golden_results, golden_world = execute_calls(golden_calls, suite, start)
    # agent did something else
    _, executed_world = execute_calls(
        [ToolCall("fillFuelTank", {"fuelAmount": 20.0})], suite, start
    )
    assert not judge_turn(executed_world, golden_world, golden_results, golden_calls)
    # agent did the same thing
    results, executed_world = execute_calls(golden_calls, suite, start)
    assert judge_turn(executed_world, golden_world, results, golden_calls)


def test_judge_turn_requires_golden_pure_calls_to_appear():
    suite = _suite_with("gallon_to_liter")
    start = MockWorld.initial()
    golden_calls = [ToolCall("gallon_to_liter", {"gallon": 13.2})]
    # pure calls leave the world untouched, so state matches even when idle
    results, executed_world = execute_calls([], suite, start)
    assert not judge_turn(executed_world, start.copy(), results, golden_calls)
    results, executed_world = execute_calls(golden_calls, suite, start)
    assert judge_turn(executed_world, start.copy(), results, golden_calls)
    # a failed pure call does not count
    bad_results = [r for r in results]
    bad_results, executed_world = execute_calls(
        [ToolCall("gallon_to_liter", {"bogus": 1})], suite, start
    )
    assert not judge_turn(executed_world, start.copy(), bad_results, golden_calls)


def test_judge_turn_matches_arguments_structurally():
    suite = _suite_with("gallon_to_liter")
    start = MockWorld.initial()
    golden = [ToolCall("gallon_to_liter", {"gallon": 13.2})]
    results, executed_world = execute_calls(
        [ToolCall("gallon_to_liter", {"gallon": 13.2})], suite, start
    )
    assert judge_turn(executed_world, start.copy(), results, golden)
    results, executed_world = execute_calls(
        [ToolCall("gallon_to_liter", {"gallon": 13})], suite, start
    )
    # 13 != 13.2 -> golden call absent
    assert not judge_turn(executed_world, start.copy(), results, golden)


def test_registry_kinds_are_consistent():
    for name, impl in REGISTRY.items():
        assert impl.kind in ("pure", "stateful", "signature")
        if impl.kind == "stateful":
            assert impl.family in DEFAULT_FAMILIES
        if impl.kind != "signature":
            assert impl.fn is not None
