"""Macro definitions and expansion for the supported TeX subset.

Supports ``\\def`` with delimited/undelimited parameter patterns and the
``\\newcommand``/``\\renewcommand`` forms.  Expansion is fuel-limited
(depth and output token count) and attributes every expanded token to the
macro call site, so downstream faults point at source the user wrote.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .diagnostics import Diagnostics
from .tokens import Catcode, Locator, TexError, Token, TokenKind, tokenize


class MacroError(TexError):
    category = "macro"


class MalformedDefinitionError(MacroError):
    category = "malformed-definition"


class RedefinitionError(MacroError):
    category = "redefinition"


class ExpansionDepthError(MacroError):
    category = "expansion-depth-exceeded"


class TokenLimitError(MacroError):
    category = "token-count-exceeded"


# Pattern items: ("param", index) slots or ("literal", display-text) matches.
PatternItem = tuple[str, object]


@dataclass(frozen=True)
class MacroDefinition:
    name: str
    arity: int
    pattern: tuple[PatternItem, ...]
    body: tuple[Token, ...]
    origin: str = "user"  # "builtin" or "user"

    def __post_init__(self):
        for tok in self.body:
            if tok.kind is TokenKind.PARAMETER and tok.param_index > self.arity:
                raise MalformedDefinitionError(
                    f"\\{self.name} body references #{tok.param_index} "
                    f"but arity is {self.arity}", tok.locator)


@dataclass(frozen=True)
class ExpansionLimits:
    max_depth: int = 256
    max_tokens: int = 100_000


DEFAULT_LIMITS = ExpansionLimits()


def _undelimited_pattern(arity: int) -> tuple[PatternItem, ...]:
    return tuple(("param", i) for i in range(1, arity + 1))


class MacroTable:
    """Macro registry plus the set of expansion-opaque primitive commands."""

    def __init__(self, primitives: frozenset[str] = frozenset()):
        self._macros: dict[str, MacroDefinition] = {}
        self.primitives = primitives

    def fork(self) -> "MacroTable":
        t = MacroTable(self.primitives)
        t._macros = dict(self._macros)
        return t

    def lookup(self, name: str) -> MacroDefinition | None:
        return self._macros.get(name)

    def is_opaque(self, name: str) -> bool:
        return name in self.primitives

    def is_known(self, name: str) -> bool:
        return name in self._macros or name in self.primitives

    def names(self) -> list[str]:
        return sorted(self._macros)

    def define(self, definition: MacroDefinition, override: bool = False,
               locator: Locator | None = None) -> None:
        name = definition.name
        existing = self._macros.get(name)
        is_builtin = name in self.primitives or (
            existing is not None and existing.origin == "builtin")
        if is_builtin and not override:
            raise RedefinitionError(
                f"\\{name} is builtin; use \\renewcommand to override",
                locator)
        self._macros[name] = definition


def define_macro(spec: list[Token], override: bool = False) -> MacroDefinition:
    """Parse one definition (``\\def`` or ``\\newcommand`` form) from tokens."""
    definition, pos, _ = parse_definition(spec, 0, override)
    if pos != len(spec):
        raise MalformedDefinitionError(
            "trailing tokens after definition", spec[pos].locator)
    return definition


def parse_definition(tokens: list[Token], pos: int,
                     override: bool = False) -> tuple[MacroDefinition, int, bool]:
    """Parse a definition starting at ``tokens[pos]``.

    Returns (definition, next position, override flag).  ``pos`` must point
    at ``\\def``, ``\\newcommand`` or ``\\renewcommand``.
    """
    head = tokens[pos]
    if not head.is_cs:
        raise MalformedDefinitionError("expected a definition command",
                                       head.locator)
    if head.text == "def":
        return _parse_def(tokens, pos + 1, head.locator) + (override,)
    if head.text in ("newcommand", "renewcommand"):
        over = override or head.text == "renewcommand"
        d, nxt = _parse_newcommand(tokens, pos + 1, head.locator)
        return d, nxt, over
    raise MalformedDefinitionError(
        f"unsupported definition form \\{head.text}", head.locator)


def _parse_def(tokens, pos, loc) -> tuple[MacroDefinition, int]:
    if pos >= len(tokens) or not tokens[pos].is_cs:
        raise MalformedDefinitionError("\\def needs a control sequence", loc)
    name = tokens[pos].text
    pos += 1
    pattern: list[PatternItem] = []
    arity = 0
    while pos < len(tokens) and not tokens[pos].is_char(Catcode.BEGIN_GROUP):
        tok = tokens[pos]
        if tok.kind is TokenKind.PARAMETER:
            arity += 1
            if tok.param_index != arity:
                raise MalformedDefinitionError(
                    f"parameters must appear in order; got #{tok.param_index} "
                    f"where #{arity} was expected", tok.locator)
            pattern.append(("param", arity))
        else:
            pattern.append(("literal", tok.display()))
        pos += 1
    body, pos = _read_group(tokens, pos, loc)
    return MacroDefinition(name, arity, tuple(pattern), tuple(body)), pos


def _parse_newcommand(tokens, pos, loc) -> tuple[MacroDefinition, int]:
    # \newcommand{\name}[n]{body} or \newcommand\name[n]{body}
    if pos < len(tokens) and tokens[pos].is_char(Catcode.BEGIN_GROUP):
        inner, pos = _read_group(tokens, pos, loc)
        if len(inner) != 1 or not inner[0].is_cs:
            raise MalformedDefinitionError(
                "\\newcommand needs a single control sequence", loc)
        name = inner[0].text
    elif pos < len(tokens) and tokens[pos].is_cs:
        name = tokens[pos].text
        pos += 1
    else:
        raise MalformedDefinitionError("\\newcommand needs a command name", loc)
    arity = 0
    if pos < len(tokens) and tokens[pos].is_char() and tokens[pos].text == "[":
        close = pos + 1
        digits = ""
        while close < len(tokens) and not (
                tokens[close].is_char() and tokens[close].text == "]"):
            digits += tokens[close].text
            close += 1
        if close >= len(tokens) or not digits.isdigit() or not 0 <= int(digits) <= 9:
            raise MalformedDefinitionError("malformed argument count", loc)
        arity = int(digits)
        pos = close + 1
    body, pos = _read_group(tokens, pos, loc)
    return MacroDefinition(name, arity, _undelimited_pattern(arity),
                           tuple(body)), pos


def _read_group(tokens, pos, loc) -> tuple[list[Token], int]:
    if pos >= len(tokens) or not tokens[pos].is_char(Catcode.BEGIN_GROUP):
        raise MalformedDefinitionError("expected '{'",
                                       tokens[pos].locator if pos < len(tokens) else loc)
    depth = 0
    body: list[Token] = []
    while pos < len(tokens):
        tok = tokens[pos]
        if tok.is_char(Catcode.BEGIN_GROUP):
            depth += 1
            if depth > 1:
                body.append(tok)
        elif tok.is_char(Catcode.END_GROUP):
            depth -= 1
            if depth == 0:
                return body, pos + 1
            body.append(tok)
        else:
            body.append(tok)
        pos += 1
    raise MalformedDefinitionError("unterminated group in definition", loc)


_DEFINITION_HEADS = ("def", "newcommand", "renewcommand")


def expand(tokens: list[Token], macros: MacroTable,
           limits: ExpansionLimits = DEFAULT_LIMITS,
           diagnostics: Diagnostics | None = None) -> list[Token]:
    """Expand all registered macros; returns the fully expanded stream.

    Inline ``\\def``/``\\newcommand`` are honored.  Unknown control
    sequences pass through flagged ``unknown`` with a warning.  Depth or
    token-count exhaustion raises (fatal by contract).
    """
    diag = diagnostics if diagnostics is not None else Diagnostics()
    table = macros.fork()
    work: deque[tuple[Token, int]] = deque((t, 0) for t in tokens)
    out: list[Token] = []
    while work:
        tok, depth = work.popleft()
        if tok.is_cs and tok.text in _DEFINITION_HEADS:
            _handle_inline_definition(tok, work, table, diag)
            continue
        if tok.is_cs:
            definition = table.lookup(tok.text)
            if definition is not None:
                if depth + 1 > limits.max_depth:
                    raise ExpansionDepthError(
                        f"expansion of \\{tok.text} exceeded depth "
                        f"{limits.max_depth}", tok.locator)
                args = _grab_arguments(definition, work, tok.locator)
                replacement = _substitute(definition, args, tok.locator, depth + 1)
                work.extendleft(reversed(replacement))
                continue
            if not table.is_opaque(tok.text):
                diag.warning("unknown-control-sequence",
                             f"unknown control sequence \\{tok.text}",
                             tok.locator)
                tok = tok.with_flag("unknown")
        out.append(tok)
        if len(out) > limits.max_tokens:
            raise TokenLimitError(
                f"expansion produced more than {limits.max_tokens} tokens",
                tok.locator)
    return out


def _handle_inline_definition(head: Token, work: deque, table: MacroTable,
                              diag: Diagnostics) -> None:
    lookahead = [head]
    # Definitions are short; pull tokens until the body group closes.
    depth = 0
    seen_group = False
    for tok, _ in work:
        lookahead.append(tok)
        if tok.is_char(Catcode.BEGIN_GROUP):
            depth += 1
            seen_group = True
        elif tok.is_char(Catcode.END_GROUP):
            depth -= 1
        if seen_group and depth == 0 and tok.is_char(Catcode.END_GROUP):
            # Heuristic stop: a balanced group closed; try parsing.
            try:
                definition, consumed, override = parse_definition(lookahead, 0)
            except MalformedDefinitionError:
                continue
            for _ in range(consumed - 1):
                work.popleft()
            table.define(definition, override=override, locator=head.locator)
            return
    raise MalformedDefinitionError("malformed or unterminated definition",
                                   head.locator)


def _grab_arguments(definition: MacroDefinition, work: deque,
                    call_site: Locator) -> dict[int, list[Token]]:
    args: dict[int, list[Token]] = {}
    items = list(definition.pattern)
    i = 0
    while i < len(items):
        kind, value = items[i]
        if kind == "literal":
            if not work or work[0][0].display() != value:
                raise MalformedDefinitionError(
                    f"use of \\{definition.name} does not match its "
                    f"parameter pattern (expected {value!r})", call_site)
            work.popleft()
            i += 1
            continue
        index = value
        run = _literal_run(items, i + 1)
        if run:
            args[index] = _grab_delimited(work, run, definition.name,
                                          call_site)
            i += 1 + len(run)  # the delimiter literals were consumed too
        else:
            args[index] = _grab_undelimited(work, definition.name, call_site)
            i += 1
    return args


def _literal_run(items, start) -> list[str]:
    run = []
    for k, v in items[start:]:
        if k != "literal":
            break
        run.append(v)
    return run


def _grab_undelimited(work: deque, name: str,
                      call_site: Locator) -> list[Token]:
    if not work:
        raise MalformedDefinitionError(
            f"\\{name} misses an argument", call_site)
    tok, _ = work.popleft()
    if not tok.is_char(Catcode.BEGIN_GROUP):
        return [tok]
    depth = 1
    arg: list[Token] = []
    while work:
        t, _ = work.popleft()
        if t.is_char(Catcode.BEGIN_GROUP):
            depth += 1
        elif t.is_char(Catcode.END_GROUP):
            depth -= 1
            if depth == 0:
                return arg
        arg.append(t)
    raise MalformedDefinitionError(
        f"unterminated group argument of \\{name}", call_site)


def _grab_delimited(work: deque, delimiter: list[str], name: str,
                    call_site: Locator) -> list[Token]:
    arg: list[Token] = []
    match = 0
    depth = 0
    buffered: list[Token] = []
    while work:
        t, _ = work.popleft()
        if depth == 0 and t.display() == delimiter[match]:
            buffered.append(t)
            match += 1
            if match == len(delimiter):
                return arg
            continue
        if buffered:
            # Failed partial match: the buffered tokens belong to the
            # argument, and the current token may restart the match.
            arg.extend(buffered)
            buffered = []
            match = 0
            if depth == 0 and t.display() == delimiter[0]:
                buffered.append(t)
                match = 1
                if match == len(delimiter):
                    return arg
                continue
        if t.is_char(Catcode.BEGIN_GROUP):
            depth += 1
        elif t.is_char(Catcode.END_GROUP):
            depth -= 1
        arg.append(t)
    raise MalformedDefinitionError(
        f"delimiter {''.join(delimiter)!r} of \\{name} not found", call_site)


def _substitute(definition: MacroDefinition, args: dict[int, list[Token]],
                call_site: Locator, depth: int) -> list[tuple[Token, int]]:
    result: list[tuple[Token, int]] = []
    for tok in definition.body:
        if tok.kind is TokenKind.PARAMETER:
            for arg_tok in args.get(tok.param_index, []):
                result.append((arg_tok, depth))
        else:
            result.append((tok.with_locator(call_site), depth))
    return result


def load_macro_fixture(text: str, source_id: str = "<macros>",
                       origin: str = "user") -> list[MacroDefinition]:
    """Parse the line-oriented fixture format ``name arity body-tokens``."""
    definitions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 2)
        if len(parts) < 2:
            raise MalformedDefinitionError(
                f"{source_id}:{lineno}: expected 'name arity body-tokens'",
                Locator(source_id, lineno, 1))
        name, arity_text = parts[0], parts[1]
        body_text = parts[2] if len(parts) == 3 else ""
        if not arity_text.isdigit() or not 0 <= int(arity_text) <= 9:
            raise MalformedDefinitionError(
                f"{source_id}:{lineno}: arity must be 0..9",
                Locator(source_id, lineno, 1))
        arity = int(arity_text)
        body = tuple(tokenize(body_text, source_id=source_id))
        definitions.append(MacroDefinition(
            name.lstrip("\\"), arity, _undelimited_pattern(arity), body,
            origin=origin))
    return definitions
