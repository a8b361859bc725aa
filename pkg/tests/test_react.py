"""Thought/action loop: parsing, prompts, module cadences, and episode runs."""

from __future__ import annotations

import json

import pytest

from agentrig import prompts
from agentrig.backends import BackendError, GenParams, approx_token_count
from agentrig.envs import make_env
from agentrig.envs.base import UNKNOWN_ACTION
from agentrig.react import (
    EpisodeLimits,
    MemoryState,
    ModuleWiring,
    ReactParseError,
    SYSTEM_PROMPT,
    VerifierConfig,
    _memory_slice,
    build_prompt,
    parse_react,
    parse_verdict,
    render_steps,
    run_episode,
    should_invoke_memory,
    should_invoke_verifier,
    update_memory,
    verify_early_exit,
)
from agentrig.types import TaskSpec, Trajectory

from conftest import (
    EMBODIED_SUITES_DIR,
    GOLDENS_DIR,
    RecordingBackend,
    SequenceBackend,
    WALL_BUMP_REPLY,
    WALL_BUMP_SUMMARY,
    run_wall_bump_with_memory,
    wall_bump_task,
)


def _load_embodied(task_id: str, file_name: str) -> TaskSpec:
    data = json.loads((EMBODIED_SUITES_DIR / file_name).read_text())
    for entry in data["tasks"]:
        if entry["id"] == task_id:
            return TaskSpec.from_dict(entry)
    raise AssertionError(f"fixture {task_id} missing")


def _trajectory(n: int) -> Trajectory:
    traj = Trajectory()
    for i in range(1, n + 1):
        traj = traj.append(f"think {i}", f"act {i}", f"see {i}")
    return traj


class FailingBackend:
    def complete(self, messages, params):
        raise BackendError("boom")


# -- render/parse ----------------------------------------------------------------


def test_render_steps_blocks():
    traj = _trajectory(2)
    assert render_steps(traj.steps) == (
        "Thought: think 1\nAction: act 1\nObservation: see 1"
        "\n\n"
        "Thought: think 2\nAction: act 2\nObservation: see 2"
    )


def test_render_steps_empty():
    assert render_steps(()) == ""


@pytest.mark.parametrize(
    "text,thought,action",
    [
        ("Thought: X\nAction: Y", "X", "Y"),
        ("  Thought: pad\n  Action: go north  ", "pad", "go north"),
        ("Action: solo", "", "solo"),
        ("Thought: a\nb\nc\nAction: z", "a\nb\nc", "z"),
        ("Action: one\nAction: two", "", "one"),
        ("Action: go\nThought: afterthought", "", "go"),
        ("Action:tight", "", "tight"),
        ("preamble\nThought: why\nAction: what", "why", "what"),
    ],
)
def test_parse_react_table(text, thought, action):
    assert parse_react(text) == (thought, action)


def test_parse_react_requires_action_line():
    with pytest.raises(ReactParseError) as exc_info:
        parse_react("Thought: musing only, no next move")
    assert exc_info.value.raw == "Thought: musing only, no next move"


# -- policy prompt ---------------------------------------------------------------


def _prompt_content(history_view, actions=("turn left", "move forward")):
    task = wall_bump_task()
    messages = build_prompt(
        task, history_view, actions, init_observation="INIT LINE"
    )
    assert [m.role for m in messages] == ["system", "user"]
    assert messages[0].content == SYSTEM_PROMPT
    return messages[1].content


def test_build_prompt_full_history():
    content = _prompt_content(_trajectory(2))
    assert "INIT LINE\n\nThought: think 1" in content
    assert content.count("Observation: ") == 2
    assert content.endswith(
        "The next action could be chosen from these valid actions: turn left, move forward"
    )
    assert "Your task is: pick up the green key." in content


def test_build_prompt_empty_history_collapses_blank_block():
    content = _prompt_content(Trajectory())
    assert "{history}" not in content
    assert (
        "INIT LINE\n\nThe next action could be chosen from these valid actions:" in content
    )


def test_build_prompt_memory_view():
    mem = MemoryState(text="Summary so far.")
    latest = _trajectory(3).steps[-2:]
    content = _prompt_content((mem, latest))
    assert "Memory: Summary so far.\n\nThought: think 2" in content
    assert content.count("Observation: ") == 2
    assert "think 1" not in content


def test_build_prompt_memory_view_empty_summary_and_no_steps():
    content = _prompt_content((MemoryState(), ()))
    assert "INIT LINE\n\nMemory: (empty)\n\nThe next action" in content


# -- memory cadence units --------------------------------------------------------


def test_should_invoke_memory_threshold():
    mem = MemoryState(k_mem=5)
    assert not should_invoke_memory(4, mem)
    assert should_invoke_memory(5, mem)
    refreshed = MemoryState(k_mem=5, last_refresh_step=5)
    assert not should_invoke_memory(9, refreshed)
    assert should_invoke_memory(10, refreshed)
    with pytest.raises(ValueError):
        should_invoke_memory(0, mem)


def test_memory_slice_windows():
    traj = _trajectory(12)
    assert [s.index for s in _memory_slice(traj, 5, 5)] == [1, 2, 3, 4]
    assert [s.index for s in _memory_slice(traj, 10, 5)] == [5, 6, 7, 8, 9]
    assert _memory_slice(traj, 1, 5) == ()
    assert [s.index for s in _memory_slice(traj, 4, 2)] == [2, 3]


def test_update_memory_refresh_step_and_text():
    backend = SequenceBackend(["  Fresh summary.  "])
    recorder = RecordingBackend(backend)
    traj = _trajectory(9)
    mem = MemoryState(text="old", last_refresh_step=5, k_mem=5)
    new_mem, completion = update_memory(
        mem, _memory_slice(traj, 10, 5), wall_bump_task(), recorder
    )
    assert new_mem.text == "Fresh summary."
    assert new_mem.last_refresh_step == 10
    assert completion.text == "  Fresh summary.  "
    system, user = recorder.conversations[0]
    assert system.role == "system"
    assert system.content == prompts.load_template("memory_system")
    assert "Memory_str: old\n" in user.content
    assert "Recent_steps:\nThought: think 5" in user.content


def test_update_memory_empty_completion_keeps_text(caplog):
    mem = MemoryState(text="kept", last_refresh_step=0)
    with caplog.at_level("WARNING"):
        new_mem, _ = update_memory(
            mem, _trajectory(4).steps, wall_bump_task(), SequenceBackend([" "])
        )
    assert new_mem.text == "kept"
    assert new_mem.last_refresh_step == 5
    assert "empty summary" in caplog.text


def test_update_memory_rejects_empty_window():
    with pytest.raises(ValueError):
        update_memory(MemoryState(), (), wall_bump_task(), SequenceBackend(["x"]))


def test_memory_state_validation():
    with pytest.raises(ValueError):
        MemoryState(k_mem=0)
    with pytest.raises(ValueError):
        MemoryState(retain_last=-1)
    with pytest.raises(ValueError):
        MemoryState(last_refresh_step=-1)


# -- verifier units --------------------------------------------------------------


def test_should_invoke_verifier_cadence():
    cfg = VerifierConfig(k_earlyexit=3)
    assert [t for t in range(1, 10) if should_invoke_verifier(t, cfg)] == [3, 6, 9]
    assert not should_invoke_verifier(3, VerifierConfig(k_earlyexit=3, enabled=False))
    with pytest.raises(ValueError):
        should_invoke_verifier(0, cfg)
    with pytest.raises(ValueError):
        VerifierConfig(k_earlyexit=0)


@pytest.mark.parametrize(
    "text,verdict",
    [
        ("1", True),
        ("0", False),
        ("yes", True),
        ("Yes.", True),
        ("no!", False),
        ("'1'", True),
        ('"0"', False),
        ("1 because the goal is met", True),
        ("YES, stop now", True),
        ("maybe", None),
        ("", None),
        ("   ", None),
        ("10", None),
        ("01", None),
    ],
)
def test_parse_verdict_table(text, verdict):
    assert parse_verdict(text) is verdict


def test_verify_early_exit_prompt_and_verdict():
    recorder = RecordingBackend(SequenceBackend(["1"]))
    stop, completion = verify_early_exit(
        _trajectory(2), wall_bump_task(), recorder, init_observation="INIT OBS"
    )
    assert stop is True
    assert completion.text == "1"
    content = recorder.user_content(0)
    assert "### Task Description:" in content
    assert "INIT OBS\n\nThought: think 1" in content
    assert "Reply with exactly one character: 1 or 0." in content


def test_verify_early_exit_custom_instruction():
    recorder = RecordingBackend(SequenceBackend(["0"]))
    stop, _ = verify_early_exit(
        _trajectory(1), wall_bump_task(), recorder, instruction="Custom rule."
    )
    assert stop is False
    assert "Custom rule." in recorder.user_content(0)


def test_verify_early_exit_unparseable_keeps_going(caplog):
    with caplog.at_level("WARNING"):
        stop, _ = verify_early_exit(
            _trajectory(1), wall_bump_task(), SequenceBackend(["hmm, unsure"])
        )
    assert stop is False
    assert "unparseable verifier verdict" in caplog.text


def test_verify_early_exit_needs_history():
    with pytest.raises(ValueError):
        verify_early_exit(Trajectory(), wall_bump_task(), SequenceBackend(["1"]))


# -- run_episode -----------------------------------------------------------------

SPRAY_SCRIPT = (
    "Thought: Check the closed cabinet.\nAction: go to cabinet 2",
    "Thought: Open it.\nAction: open cabinet 2",
    "Thought: Grab the spraybottle.\nAction: take spraybottle 2 from cabinet 2",
    "Thought: Head to the toilet.\nAction: go to toilet 1",
    "Thought: Place it.\nAction: put spraybottle 2 in/on toilet 1",
)


def _spray_task() -> TaskSpec:
    return _load_embodied("texthouse_spraybottle", "texthouse_tasks.json")


def test_run_episode_rejects_non_embodied():
    task = TaskSpec(id="t", kind="toolcall", instruction="i", goal="g")
    with pytest.raises(ValueError):
        run_episode(task, None, ModuleWiring(agent_backend=SequenceBackend(["x"])))


def test_run_episode_reaches_goal():
    task = _spray_task()
    env = make_env(task, seed=0)
    record = run_episode(
        task,
        env,
        ModuleWiring(agent_backend=SequenceBackend(SPRAY_SCRIPT)),
        seed=7,
        suite="embodied",
    )
    assert record.success is True
    assert record.exit_reason == "goal"
    assert record.progress == 1.0
    assert len(record.steps) == 5
    assert record.steps[-1].observation.endswith("The task is completed.")
    assert record.task_id == task.id
    assert record.seed == 7
    assert record.suite == "embodied"
    assert record.module_config == {"memory": None, "early_exit": None}
    assert record.generated_tokens == sum(approx_token_count(t) for t in SPRAY_SCRIPT)


def test_run_episode_step_limit():
    task = wall_bump_task(step_limit=4)
    env = make_env(task, seed=0)
    record = run_episode(task, env, ModuleWiring(agent_backend=SequenceBackend([WALL_BUMP_REPLY])))
    assert record.exit_reason == "step_limit"
    assert record.success is False
    assert len(record.steps) == 4
    assert record.progress == 0.0


def test_run_episode_limits_override_task_step_limit():
    task = wall_bump_task(step_limit=9)
    env = make_env(task, seed=0)
    record = run_episode(
        task,
        env,
        ModuleWiring(agent_backend=SequenceBackend([WALL_BUMP_REPLY])),
        EpisodeLimits(step_limit=2),
    )
    assert len(record.steps) == 2


def test_run_episode_early_exit():
    task = wall_bump_task(step_limit=20)
    env = make_env(task, seed=0)
    verifier = RecordingBackend(SequenceBackend(["0", "1"]))
    record = run_episode(
        task,
        env,
        ModuleWiring(agent_backend=SequenceBackend([WALL_BUMP_REPLY]), verifier_backend=verifier),
        verifier=VerifierConfig(k_earlyexit=3),
    )
    assert record.exit_reason == "early_exit"
    assert len(record.steps) == 6
    assert verifier.calls == 2
    assert record.success is False
    assert record.module_config == {"memory": None, "early_exit": {"k_earlyexit": 3}}
    expected = 6 * approx_token_count(WALL_BUMP_REPLY) + 2
    assert record.generated_tokens == expected


def test_run_episode_goal_skips_verifier_on_final_step():
    task = _spray_task()
    env = make_env(task, seed=0)
    verifier = RecordingBackend(SequenceBackend(["1"]))
    record = run_episode(
        task,
        env,
        ModuleWiring(agent_backend=SequenceBackend(SPRAY_SCRIPT), verifier_backend=verifier),
        verifier=VerifierConfig(k_earlyexit=5),
    )
    assert record.exit_reason == "goal"
    assert verifier.calls == 0


def test_run_episode_disabled_verifier_never_called():
    task = wall_bump_task(step_limit=6)
    env = make_env(task, seed=0)
    verifier = RecordingBackend(SequenceBackend(["1"]))
    record = run_episode(
        task,
        env,
        ModuleWiring(agent_backend=SequenceBackend([WALL_BUMP_REPLY]), verifier_backend=verifier),
        verifier=VerifierConfig(k_earlyexit=2, enabled=False),
    )
    assert verifier.calls == 0
    assert record.module_config["early_exit"] is None
    assert record.exit_reason == "step_limit"


def test_run_episode_done_at_reset():
    task = TaskSpec(
        id="house/open-at-reset",
        kind="embodied",
        instruction="household",
        goal="nothing to do.",
        env_name="texthouse",
        step_limit=5,
        env_config={
            "locations": [
                {"name": "drawer 1", "type": "container", "open": True, "items": []}
            ],
            "subgoals": [
                {"id": "g", "predicate": {"kind": "container_open", "location": "drawer 1"}}
            ],
        },
    )
    env = make_env(task, seed=0)
    agent = RecordingBackend(SequenceBackend(["Action: wait"]))
    record = run_episode(task, env, ModuleWiring(agent_backend=agent))
    assert record.success is True
    assert record.exit_reason == "goal"
    assert record.progress == 1.0
    assert record.steps == ()
    assert agent.calls == 0


def test_run_episode_agent_backend_error():
    task = wall_bump_task(step_limit=5)
    env = make_env(task, seed=0)
    record = run_episode(task, env, ModuleWiring(agent_backend=FailingBackend()))
    assert record.exit_reason == "backend_error"
    assert record.error == "boom"
    assert record.success is False
    assert record.steps == ()


def test_run_episode_memory_backend_error_surfaces():
    task = wall_bump_task(step_limit=10)
    env = make_env(task, seed=0)
    record = run_episode(
        task,
        env,
        ModuleWiring(
            agent_backend=SequenceBackend([WALL_BUMP_REPLY]),
            memory_backend=FailingBackend(),
        ),
        memory=MemoryState(k_mem=5),
    )
    assert record.exit_reason == "backend_error"
    assert len(record.steps) == 4
    assert record.error == "boom"


def test_run_episode_unparseable_completion_goes_to_env(caplog):
    task = wall_bump_task(step_limit=1)
    env = make_env(task, seed=0)
    with caplog.at_level("WARNING"):
        record = run_episode(
            task, env, ModuleWiring(agent_backend=SequenceBackend(["I have no idea"]))
        )
    assert "unparseable completion" in caplog.text
    step = record.steps[0]
    assert step.thought == ""
    assert step.action == "I have no idea"
    assert step.observation == UNKNOWN_ACTION


# -- scripted cadence episode ------------------------------------------------------


def test_memory_cadence_over_23_step_episode():
    record, agent_rec, memory_rec = run_wall_bump_with_memory()
    assert memory_rec.calls == 4
    assert agent_rec.calls == 23
    assert len(record.steps) == 23
    assert record.exit_reason == "step_limit"
    assert record.success is False
    assert record.module_config == {
        "memory": {"k_mem": 5, "retain_last": 2},
        "early_exit": None,
    }
    expected_tokens = 23 * approx_token_count(WALL_BUMP_REPLY) + 4 * approx_token_count(
        WALL_BUMP_SUMMARY
    )
    assert record.generated_tokens == expected_tokens


def test_policy_prompts_carry_exactly_retained_steps():
    _, agent_rec, _ = run_wall_bump_with_memory()
    for i in range(agent_rec.calls):
        content = agent_rec.user_content(i)
        assert content.count("Observation: ") == min(i, 2), f"policy call {i + 1}"
        assert "Memory: " in content


def test_memory_prompt_windows():
    _, _, memory_rec = run_wall_bump_with_memory()
    # The exemplar block contributes three observation lines of its own.
    assert memory_rec.user_content(0).count("Observation: ") == 3 + 4
    for i in (1, 2, 3):
        assert memory_rec.user_content(i).count("Observation: ") == 3 + 5
    assert "Memory_str: (empty)" in memory_rec.user_content(0)
    assert f"Memory_str: {WALL_BUMP_SUMMARY}" in memory_rec.user_content(1)


def test_memory_prompt_fourth_refresh_matches_golden():
    _, _, memory_rec = run_wall_bump_with_memory()
    golden = (GOLDENS_DIR / "memory_prompt_refresh4.txt").read_bytes()
    assert (memory_rec.user_content(3) + "\n").encode() == golden
    system = memory_rec.conversations[3][0]
    assert system.role == "system"
    assert system.content == prompts.load_template("memory_system")


def test_policy_prompt_final_step_matches_golden():
    _, agent_rec, _ = run_wall_bump_with_memory()
    golden = (GOLDENS_DIR / "policy_prompt_step23.txt").read_bytes()
    assert (agent_rec.user_content(22) + "\n").encode() == golden
