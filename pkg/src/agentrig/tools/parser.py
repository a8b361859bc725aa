"""Bracketed tool-call grammar: parser and canonical renderer.

The wire format is a bracketed list of keyword-only calls:

    [func_name(param=value, other=[1, 2.5, "x"]), second.func()]

Values are double- or single-quoted strings, integers, floats, True/False/None
(true/false/null also accepted), lists, and string-keyed maps. The renderer
emits a canonical form (double quotes, Python-style keywords, ", " separators)
such that parse(render(calls)) reproduces the same calls exactly.
"""

from __future__ import annotations

import math

from agentrig.types import ToolCall

_WS = " \t\n\r"
_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_UNESCAPES = {
    "\\": "\\",
    '"': '"',
    "'": "'",
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "b": "\b",
    "f": "\f",
    "/": "/",
}
_KEYWORDS = {
    "True": True,
    "False": False,
    "None": None,
    "true": True,
    "false": False,
    "null": None,
}
_DIGITS = "0123456789"


class ToolCallParseError(ValueError):
    """Parse failure with the character offset where it was detected."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class _Cursor:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ToolCallParseError:
        return ToolCallParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in _WS:
            self.pos += 1

    def peek(self) -> str:
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def expect(self, char: str) -> None:
        if self.peek() != char:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected {char!r}, found {found}")
        self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    # --- grammar ---

    def parse_calls(self) -> list[ToolCall]:
        self.skip_ws()
        self.expect("[")
        calls: list[ToolCall] = []
        self.skip_ws()
        if self.peek() == "]":
            self.pos += 1
        else:
            while True:
                calls.append(self.parse_call())
                self.skip_ws()
                if self.peek() == ",":
                    self.pos += 1
                    self.skip_ws()
                    continue
                self.expect("]")
                break
        self.skip_ws()
        if not self.at_end():
            raise self.error("trailing characters after call list")
        return calls

    def parse_call(self) -> ToolCall:
        name = self.parse_dotted_name()
        self.skip_ws()
        self.expect("(")
        arguments: dict = {}
        self.skip_ws()
        if self.peek() == ")":
            self.pos += 1
            return ToolCall(name, arguments)
        while True:
            key_pos = self.pos
            key = self.parse_identifier()
            if key in arguments:
                raise ToolCallParseError(f"duplicate argument {key!r}", key_pos)
            self.skip_ws()
            self.expect("=")
            self.skip_ws()
            arguments[key] = self.parse_value()
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
                self.skip_ws()
                continue
            self.expect(")")
            return ToolCall(name, arguments)

    def parse_dotted_name(self) -> str:
        parts = [self.parse_identifier()]
        while self.peek() == ".":
            self.pos += 1
            parts.append(self.parse_identifier())
        return ".".join(parts)

    def parse_identifier(self) -> str:
        start = self.pos
        ch = self.peek()
        if not (ch.isalpha() or ch == "_"):
            found = repr(ch) if ch else "end of input"
            raise self.error(f"expected identifier, found {found}")
        while not self.at_end():
            ch = self.text[self.pos]
            if ch.isalnum() or ch == "_":
                self.pos += 1
            else:
                break
        return self.text[start:self.pos]

    def parse_value(self):
        ch = self.peek()
        if not ch:
            raise self.error("expected a value, found end of input")
        if ch in "\"'":
            return self.parse_string()
        if ch == "[":
            return self.parse_list()
        if ch == "{":
            return self.parse_map()
        if ch == "-" or ch in _DIGITS:
            return self.parse_number()
        if ch.isalpha() or ch == "_":
            start = self.pos
            word = self.parse_identifier()
            if word in _KEYWORDS:
                return _KEYWORDS[word]
            raise ToolCallParseError(f"unexpected identifier {word!r} in value position", start)
        found = repr(ch) if ch else "end of input"
        raise self.error(f"expected a value, found {found}")

    def parse_string(self) -> str:
        quote = self.peek()
        self.pos += 1
        out: list[str] = []
        while True:
            if self.at_end():
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == quote:
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                if self.at_end():
                    raise self.error("unterminated escape")
                esc = self.text[self.pos]
                if esc == "u":
                    hex_digits = self.text[self.pos + 1:self.pos + 5]
                    if len(hex_digits) != 4 or any(c not in "0123456789abcdefABCDEF" for c in hex_digits):
                        raise self.error("invalid \\u escape")
                    out.append(chr(int(hex_digits, 16)))
                    self.pos += 5
                    continue
                if esc not in _UNESCAPES:
                    raise self.error(f"invalid escape \\{esc}")
                out.append(_UNESCAPES[esc])
                self.pos += 1
                continue
            out.append(ch)
            self.pos += 1

    def parse_number(self):
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        digits_before = self._consume_digits()
        if digits_before == 0:
            raise self.error("expected digits")
        is_float = False
        if self.peek() == ".":
            is_float = True
            self.pos += 1
            if self._consume_digits() == 0:
                raise self.error("expected digits after decimal point")
        if self.peek() in ("e", "E"):
            is_float = True
            self.pos += 1
            if self.peek() in ("+", "-"):
                self.pos += 1
            if self._consume_digits() == 0:
                raise self.error("expected digits in exponent")
        token = self.text[start:self.pos]
        if not is_float:
            return int(token)
        value = float(token)
        if not math.isfinite(value):
            raise ToolCallParseError(f"number out of range: {token}", start)
        return value

    def _consume_digits(self) -> int:
        count = 0
        while not self.at_end() and self.text[self.pos] in _DIGITS:
            self.pos += 1
            count += 1
        return count

    def parse_list(self) -> list:
        self.expect("[")
        items: list = []
        self.skip_ws()
        if self.peek() == "]":
            self.pos += 1
            return items
        while True:
            items.append(self.parse_value())
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
                self.skip_ws()
                continue
            self.expect("]")
            return items

    def parse_map(self) -> dict:
        self.expect("{")
        out: dict = {}
        self.skip_ws()
        if self.peek() == "}":
            self.pos += 1
            return out
        while True:
            if self.peek() not in ('"', "'"):
                raise self.error("map keys must be quoted strings")
            key_pos = self.pos
            key = self.parse_string()
            if key in out:
                raise ToolCallParseError(f"duplicate map key {key!r}", key_pos)
            self.skip_ws()
            self.expect(":")
            self.skip_ws()
            out[key] = self.parse_value()
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
                self.skip_ws()
                continue
            self.expect("}")
            return out


def parse_tool_calls(text: str) -> list[ToolCall]:
    """Parse a bracketed call list; raises ToolCallParseError with an offset."""
    return _Cursor(text).parse_calls()


def _quote(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def render_value(value) -> str:
    """Canonical text for one argument value."""
    if isinstance(value, str):
        return _quote(value)
    if value is True:
        return "True"
    if value is False:
        return "False"
    if value is None:
        return "None"
    if isinstance(value, int):
        return repr(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot render non-finite float: {value!r}")
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{_quote(k)}: {render_value(v)}" for k, v in value.items()) + "}"
    raise ValueError(f"cannot render value of type {type(value).__name__}")


def render_call(call: ToolCall) -> str:
    args = ", ".join(f"{name}={render_value(value)}" for name, value in call.arguments.items())
    return f"{call.function}({args})"


def render_tool_calls(calls) -> str:
    """Canonical text for a call list; inverse of parse_tool_calls."""
    return "[" + ", ".join(render_call(c) for c in calls) + "]"
