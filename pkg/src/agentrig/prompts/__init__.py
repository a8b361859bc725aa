"""Prompt template assets and rendering helpers.

Templates live as plain-text files next to this module.  Placeholders
look like ``{name}`` but are substituted with plain string replacement,
never ``str.format``, so literal braces inside a template (JSON
examples, for instance) survive untouched.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_PLACEHOLDER = re.compile(r"\{([a-z_]+)\}")

TEMPLATE_NAMES = (
    "react_user",
    "memory_system",
    "memory_exemplars",
    "memory_user",
    "early_exit_user",
    "early_exit_instruction",
    "toolcall_system",
    "selector_system",
    "selector_user",
    "editor_system",
    "editor_user",
)


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    """Return the raw text of a named template.

    The trailing newline the file ends with is stripped so templates can
    be embedded mid-prompt without surprise blank lines.
    """
    if name not in TEMPLATE_NAMES:
        raise KeyError(f"unknown template: {name!r}")
    path = resources.files(__name__).joinpath(f"{name}.txt")
    return path.read_text(encoding="utf-8").rstrip("\n")


def fill(template: str, **values: str) -> str:
    """Substitute ``{key}`` placeholders via sequential replacement.

    Every provided key must appear in the template; unknown keys raise
    so a typo cannot silently drop content.
    """
    out = template
    for key, value in values.items():
        token = "{" + key + "}"
        if token not in out:
            raise KeyError(f"template has no placeholder {token}")
        out = out.replace(token, str(value))
    return out


def placeholders(template: str) -> set[str]:
    """Names of the ``{lower_snake}`` placeholders present in a template."""
    return set(_PLACEHOLDER.findall(template))


def render(name: str, **values: str) -> str:
    """Load a template by name and fill every one of its placeholders."""
    template = load_template(name)
    required = placeholders(template)
    missing = required - set(values)
    if missing:
        raise KeyError(f"missing values for {sorted(missing)} in template {name!r}")
    extra = set(values) - required
    if extra:
        raise KeyError(f"unused values {sorted(extra)} for template {name!r}")
    return fill(template, **values)
