"""Modular agent-evaluation harness.

Embodied thought/action episodes and tool-calling episodes run against
pluggable backends, with optional memory, early-exit, tool-selection, and
call-repair modules, plus parallel-decoding schedules and a metrics engine.
"""

from __future__ import annotations

from .backends import (
    Backend,
    BackendError,
    ChatMessage,
    Completion,
    GenParams,
    HttpBackend,
    PolicyScript,
    ScriptedBackend,
    ScriptRule,
)
from .config import AblationSpec, BackendSpec, ConfigError, RunConfig, load_config
from .envs import ENV_REGISTRY, make_env
from .metrics import build_report, render_report_text
from .react import (
    EpisodeLimits,
    MemoryState,
    ModuleWiring,
    VerifierConfig,
    run_episode,
)
from .runner import RunResult, execute_run, load_work, read_records
from .sampling import SplitMix64, SuiteManifest, derive_seed, sample_suite
from .tools import (
    ToolLimits,
    ToolSuite,
    ToolWiring,
    load_suite,
    load_suites,
    run_tool_episode,
)
from .types import (
    EpisodeRecord,
    ExecutionResult,
    Step,
    TaskSpec,
    ToolCall,
    ToolSpec,
    Trajectory,
    TurnRecord,
    UserTurn,
)

__version__ = "0.1.0"

__all__ = [
    "AblationSpec",
    "Backend",
    "BackendError",
    "BackendSpec",
    "ChatMessage",
    "Completion",
    "ConfigError",
    "ENV_REGISTRY",
    "EpisodeLimits",
    "EpisodeRecord",
    "ExecutionResult",
    "GenParams",
    "HttpBackend",
    "MemoryState",
    "ModuleWiring",
    "PolicyScript",
    "RunConfig",
    "RunResult",
    "ScriptRule",
    "ScriptedBackend",
    "SplitMix64",
    "Step",
    "SuiteManifest",
    "TaskSpec",
    "ToolCall",
    "ToolLimits",
    "ToolSpec",
    "ToolSuite",
    "ToolWiring",
    "Trajectory",
    "TurnRecord",
    "UserTurn",
    "VerifierConfig",
    "build_report",
    "derive_seed",
    "execute_run",
    "load_config",
    "load_suite",
    "load_suites",
    "load_work",
    "make_env",
    "read_records",
    "render_report_text",
    "run_episode",
    "run_tool_episode",
    "sample_suite",
    "__version__",
]
