"""Run configuration: a strict YAML schema for the evaluation harness.

Every key is checked; an unknown key anywhere in the file is an error that
names the offending path, so typos never silently fall back to defaults.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from .backends import Backend, HttpBackend, PolicyScript, ScriptedBackend, ScriptRule
from .tools.modules import RuleBasedEditorBackend

logger = logging.getLogger(__name__)

ROLE_NAMES = ("agent", "memory", "verifier", "selector", "editor")
MODULE_FLAGS = ("memory", "early_exit", "selector", "editor")
BACKEND_TYPES = ("scripted", "http", "rule_based")

_FLAG_TO_ROLE = {
    "memory": "memory",
    "early_exit": "verifier",
    "selector": "selector",
    "editor": "editor",
}

_TOP_LEVEL_KEYS = (
    "suites",
    "output_dir",
    "seed",
    "workers",
    "step_limit",
    "k_mem",
    "retain_last",
    "k_earlyexit",
    "max_batches_per_turn",
    "retry_threshold",
    "tau",
    "gamma",
    "max_tokens",
    "temperature",
    "backends",
    "ablations",
)

_BACKEND_KEYS = {
    "scripted": ("type", "rules", "default"),
    "http": ("type", "base_url", "model", "api_key_env", "timeout"),
    "rule_based": ("type",),
}

_RULE_KEYS = ("pattern", "response", "regex")


class ConfigError(ValueError):
    """A malformed or contradictory run configuration."""


def _check_keys(data: Mapping[str, Any], allowed: Sequence[str], path: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} at {path}")


def _expect_mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{path} must be a mapping, got {type(value).__name__}")
    return value


def _expect_int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path} must be >= {minimum}, got {value}")
    return value


def _expect_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number, got {value!r}")
    return float(value)


def _expect_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path} must be a string, got {value!r}")
    return value


def _expect_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path} must be true or false, got {value!r}")
    return value


@dataclass(frozen=True)
class BackendSpec:
    """Declarative backend description for one module role."""

    role: str
    type: str
    options: Mapping[str, Any] = field(default_factory=dict)

    def build(self) -> Backend:
        if self.type == "scripted":
            rules = tuple(
                ScriptRule(
                    pattern=rule["pattern"],
                    response=rule["response"],
                    regex=rule.get("regex", False),
                )
                for rule in self.options.get("rules", ())
            )
            return ScriptedBackend(PolicyScript(rules=rules, default=self.options.get("default", "")))
        if self.type == "http":
            kwargs: dict[str, Any] = {
                "base_url": self.options["base_url"],
                "model": self.options["model"],
            }
            if "api_key_env" in self.options:
                kwargs["api_key_env"] = self.options["api_key_env"]
            if "timeout" in self.options:
                kwargs["timeout"] = self.options["timeout"]
            return HttpBackend(**kwargs)
        if self.type == "rule_based":
            return RuleBasedEditorBackend()
        raise ConfigError(f"unknown backend type {self.type!r} for role {self.role!r}")


@dataclass(frozen=True)
class AblationSpec:
    """One cell of the module on/off grid."""

    memory: bool = False
    early_exit: bool = False
    selector: bool = False
    editor: bool = False

    def label(self) -> str:
        parts = [
            f"{flag}={'on' if getattr(self, flag) else 'off'}" for flag in MODULE_FLAGS
        ]
        return ",".join(parts)

    def to_dict(self) -> dict:
        return {flag: getattr(self, flag) for flag in MODULE_FLAGS}


@dataclass(frozen=True)
class RunConfig:
    """Everything one harness invocation needs."""

    suites: tuple[str, ...]
    backends: Mapping[str, BackendSpec]
    ablations: tuple[AblationSpec, ...]
    output_dir: str = "out"
    seed: int = 42
    workers: int = 1
    step_limit: int | None = None
    k_mem: int = 5
    retain_last: int = 2
    k_earlyexit: int = 5
    max_batches_per_turn: int = 8
    retry_threshold: int = 3
    tau: float = 0.9
    gamma: float = 0.3
    max_tokens: int = 512
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if not self.suites:
            raise ConfigError("suites must list at least one path")
        if "agent" not in self.backends:
            raise ConfigError("backends must configure the 'agent' role")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        for spec in self.ablations:
            for flag in MODULE_FLAGS:
                role = _FLAG_TO_ROLE[flag]
                if getattr(spec, flag) and role not in self.backends:
                    raise ConfigError(
                        f"ablation turns {flag} on but no {role!r} backend is configured"
                    )


def _parse_backend(role: str, data: Any, path: str) -> BackendSpec:
    data = _expect_mapping(data, path)
    if "type" not in data:
        raise ConfigError(f"{path} is missing the 'type' key")
    kind = _expect_str(data["type"], f"{path}.type")
    if kind not in BACKEND_TYPES:
        raise ConfigError(f"{path}.type must be one of {BACKEND_TYPES}, got {kind!r}")
    _check_keys(data, _BACKEND_KEYS[kind], path)
    options: dict[str, Any] = {}
    if kind == "scripted":
        rules = data.get("rules", [])
        if not isinstance(rules, Sequence) or isinstance(rules, str):
            raise ConfigError(f"{path}.rules must be a list")
        parsed_rules = []
        for i, rule in enumerate(rules):
            rule_path = f"{path}.rules[{i}]"
            rule = _expect_mapping(rule, rule_path)
            _check_keys(rule, _RULE_KEYS, rule_path)
            entry = {
                "pattern": _expect_str(rule.get("pattern", ""), f"{rule_path}.pattern"),
                "response": _expect_str(rule.get("response", ""), f"{rule_path}.response"),
            }
            if "regex" in rule:
                entry["regex"] = _expect_bool(rule["regex"], f"{rule_path}.regex")
            parsed_rules.append(entry)
        options["rules"] = parsed_rules
        options["default"] = _expect_str(data.get("default", ""), f"{path}.default")
    elif kind == "http":
        for required in ("base_url", "model"):
            if required not in data:
                raise ConfigError(f"{path} is missing the {required!r} key")
        options["base_url"] = _expect_str(data["base_url"], f"{path}.base_url")
        options["model"] = _expect_str(data["model"], f"{path}.model")
        if "api_key_env" in data:
            options["api_key_env"] = _expect_str(data["api_key_env"], f"{path}.api_key_env")
        if "timeout" in data:
            options["timeout"] = _expect_float(data["timeout"], f"{path}.timeout")
    return BackendSpec(role=role, type=kind, options=options)


def _parse_ablation(data: Any, path: str) -> AblationSpec:
    data = _expect_mapping(data, path)
    _check_keys(data, MODULE_FLAGS, path)
    flags = {flag: _expect_bool(data[flag], f"{path}.{flag}") for flag in data}
    return AblationSpec(**flags)


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    """Build a RunConfig from parsed YAML, rejecting unknown keys by path."""
    data = _expect_mapping(data, "config")
    _check_keys(data, _TOP_LEVEL_KEYS, "config")

    if "suites" not in data:
        raise ConfigError("config is missing the 'suites' key")
    raw_suites = data["suites"]
    if isinstance(raw_suites, str):
        raw_suites = [raw_suites]
    if not isinstance(raw_suites, Sequence):
        raise ConfigError("config.suites must be a path or list of paths")
    suites = tuple(_expect_str(p, f"config.suites[{i}]") for i, p in enumerate(raw_suites))

    if "backends" not in data:
        raise ConfigError("config is missing the 'backends' key")
    raw_backends = _expect_mapping(data["backends"], "config.backends")
    _check_keys(raw_backends, ROLE_NAMES, "config.backends")
    backends = {
        role: _parse_backend(role, raw_backends[role], f"config.backends.{role}")
        for role in ROLE_NAMES
        if role in raw_backends
    }

    if "ablations" in data:
        raw_ablations = data["ablations"]
        if not isinstance(raw_ablations, Sequence) or isinstance(raw_ablations, str):
            raise ConfigError("config.ablations must be a list")
        if not raw_ablations:
            raise ConfigError("config.ablations must not be empty")
        ablations = tuple(
            _parse_ablation(entry, f"config.ablations[{i}]")
            for i, entry in enumerate(raw_ablations)
        )
    else:
        ablations = (
            AblationSpec(
                **{flag: _FLAG_TO_ROLE[flag] in backends for flag in MODULE_FLAGS}
            ),
        )

    kwargs: dict[str, Any] = {
        "suites": suites,
        "backends": backends,
        "ablations": ablations,
    }
    if "output_dir" in data:
        kwargs["output_dir"] = _expect_str(data["output_dir"], "config.output_dir")
    if "seed" in data:
        kwargs["seed"] = _expect_int(data["seed"], "config.seed")
    if "workers" in data:
        kwargs["workers"] = _expect_int(data["workers"], "config.workers", minimum=1)
    if "step_limit" in data and data["step_limit"] is not None:
        kwargs["step_limit"] = _expect_int(data["step_limit"], "config.step_limit", minimum=1)
    for key, minimum in (
        ("k_mem", 1),
        ("retain_last", 0),
        ("k_earlyexit", 1),
        ("max_batches_per_turn", 1),
        ("retry_threshold", 2),
        ("max_tokens", 1),
    ):
        if key in data:
            kwargs[key] = _expect_int(data[key], f"config.{key}", minimum=minimum)
    for key in ("tau", "gamma", "temperature"):
        if key in data:
            kwargs[key] = _expect_float(data[key], f"config.{key}")
    return RunConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a YAML run configuration file."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    if data is None:
        raise ConfigError(f"{path} is empty")
    return config_from_dict(data)


def build_backends(config: RunConfig) -> dict[str, Backend]:
    """Instantiate one backend per configured role."""
    return {role: spec.build() for role, spec in config.backends.items()}
