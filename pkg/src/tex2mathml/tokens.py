"""TeX math tokenizer: category codes, tokens and source locators.

The tokenizer implements the slice of TeX's input processor that a math
fragment needs: escape sequences, grouping, comments, parameters and the
standard special characters.  Category codes are fixed to the plain-TeX
math settings; ``\\catcode`` reassignment is not supported.  Whitespace
never produces tokens (math mode ignores it), but locators still advance
through it so every token knows its exact line and column.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace


class Catcode(enum.IntEnum):
    ESCAPE = 0
    BEGIN_GROUP = 1
    END_GROUP = 2
    MATH_SHIFT = 3
    ALIGNMENT = 4
    END_OF_LINE = 5
    PARAMETER = 6
    SUPERSCRIPT = 7
    SUBSCRIPT = 8
    IGNORED = 9
    SPACE = 10
    LETTER = 11
    OTHER = 12
    ACTIVE = 13
    COMMENT = 14
    INVALID = 15


class TokenKind(enum.Enum):
    CHARACTER = "character"
    CONTROL_SEQUENCE = "control-sequence"
    PARAMETER = "parameter"


@dataclass(frozen=True)
class Locator:
    """Position of a token or fault in the original source."""

    source_id: str
    line: int
    column: int
    approximate: bool = False

    def __str__(self) -> str:
        mark = "~" if self.approximate else ""
        return f"{self.source_id}:{mark}{self.line}:{self.column}"

    def as_dict(self) -> dict:
        d = {"source": self.source_id, "line": self.line, "column": self.column}
        if self.approximate:
            d["approximate"] = True
        return d


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    locator: Locator
    catcode: Catcode | None = None     # set for CHARACTER tokens
    param_index: int = 0               # set for PARAMETER tokens (1..9)
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind is TokenKind.CONTROL_SEQUENCE and not self.text:
            raise ValueError("control sequence name must be nonempty")
        if self.kind is TokenKind.PARAMETER and not 1 <= self.param_index <= 9:
            raise ValueError("parameter index must be in 1..9")

    @property
    def is_cs(self) -> bool:
        return self.kind is TokenKind.CONTROL_SEQUENCE

    def is_char(self, cat: Catcode | None = None) -> bool:
        if self.kind is not TokenKind.CHARACTER:
            return False
        return cat is None or self.catcode is cat

    def with_locator(self, locator: Locator) -> "Token":
        return replace(self, locator=locator)

    def with_flag(self, flag: str) -> "Token":
        return replace(self, flags=self.flags | {flag})

    def display(self) -> str:
        if self.kind is TokenKind.CONTROL_SEQUENCE:
            return "\\" + self.text
        if self.kind is TokenKind.PARAMETER:
            return f"#{self.param_index}"
        return self.text


class TexError(Exception):
    """A fault with a source position, raised by the engine stages."""

    category = "tex"

    def __init__(self, message: str, locator: Locator | None = None):
        super().__init__(message)
        self.message = message
        self.locator = locator


class InvalidCharacterError(TexError):
    category = "invalid-character"


class UnterminatedControlSequenceError(TexError):
    category = "unterminated-control-sequence"


# Plain-TeX math category codes.  Characters absent from the table are OTHER.
_STANDARD_CATCODES: dict[str, Catcode] = {
    "\\": Catcode.ESCAPE,
    "{": Catcode.BEGIN_GROUP,
    "}": Catcode.END_GROUP,
    "$": Catcode.MATH_SHIFT,
    "&": Catcode.ALIGNMENT,
    "\n": Catcode.END_OF_LINE,
    "\r": Catcode.END_OF_LINE,
    "#": Catcode.PARAMETER,
    "^": Catcode.SUPERSCRIPT,
    "_": Catcode.SUBSCRIPT,
    "\x00": Catcode.IGNORED,
    " ": Catcode.SPACE,
    "\t": Catcode.SPACE,
    "%": Catcode.COMMENT,
    "~": Catcode.ACTIVE,
    "\x7f": Catcode.INVALID,
}


class CatcodeTable:
    """Immutable character -> catcode assignment (total over all characters)."""

    def __init__(self, overrides: dict[str, Catcode] | None = None):
        table = dict(_STANDARD_CATCODES)
        if overrides:
            table.update(overrides)
        self._table = table

    def of(self, ch: str) -> Catcode:
        cat = self._table.get(ch)
        if cat is not None:
            return cat
        if ch.isalpha() and ch.isascii():
            return Catcode.LETTER
        return Catcode.OTHER


STANDARD_TABLE = CatcodeTable()


class _Cursor:
    def __init__(self, source: str, source_id: str):
        self.source = source
        self.source_id = source_id
        self.pos = 0
        self.line = 1
        self.column = 1

    def eof(self) -> bool:
        return self.pos >= len(self.source)

    def peek(self) -> str:
        return self.source[self.pos]

    def locator(self) -> Locator:
        return Locator(self.source_id, self.line, self.column)

    def advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch


def tokenize(source: str, table: CatcodeTable = STANDARD_TABLE,
             source_id: str = "<input>") -> list[Token]:
    """Tokenize TeX source under a catcode table.

    Comments and whitespace produce no tokens.  Raises
    :class:`InvalidCharacterError` for catcode-invalid characters and
    :class:`UnterminatedControlSequenceError` for a trailing escape.
    """
    cur = _Cursor(source, source_id)
    out: list[Token] = []
    while not cur.eof():
        loc = cur.locator()
        ch = cur.advance()
        cat = table.of(ch)
        if cat in (Catcode.SPACE, Catcode.END_OF_LINE, Catcode.IGNORED):
            continue
        if cat is Catcode.COMMENT:
            while not cur.eof() and table.of(cur.peek()) is not Catcode.END_OF_LINE:
                cur.advance()
            continue
        if cat is Catcode.INVALID:
            raise InvalidCharacterError(
                f"invalid character {ch!r} (catcode invalid)", loc)
        if cat is Catcode.ESCAPE:
            out.append(_read_control_sequence(cur, table, loc))
            continue
        if cat is Catcode.PARAMETER:
            if not cur.eof() and cur.peek().isdigit() and cur.peek() != "0":
                idx = int(cur.advance())
                out.append(Token(TokenKind.PARAMETER, f"#{idx}", loc,
                                 param_index=idx))
            else:
                out.append(Token(TokenKind.CHARACTER, ch, loc, catcode=cat))
            continue
        out.append(Token(TokenKind.CHARACTER, ch, loc, catcode=cat))
    return out


def _read_control_sequence(cur: _Cursor, table: CatcodeTable,
                           loc: Locator) -> Token:
    if cur.eof():
        raise UnterminatedControlSequenceError(
            "escape character at end of input", loc)
    first = cur.advance()
    if table.of(first) is not Catcode.LETTER:
        # Control symbol: single non-letter character, including \  and \\.
        return Token(TokenKind.CONTROL_SEQUENCE, first, loc)
    name = first
    while not cur.eof() and table.of(cur.peek()) is Catcode.LETTER:
        name += cur.advance()
    return Token(TokenKind.CONTROL_SEQUENCE, name, loc)


def detokenize(tokens: list[Token]) -> str:
    """Render tokens back to TeX text, inserting the spaces re-lexing needs."""
    parts: list[str] = []
    prev: Token | None = None
    for tok in tokens:
        if (prev is not None and prev.is_cs and len(prev.text) > 1
                and tok.display()[0].isalpha()):
            parts.append(" ")
        elif (prev is not None and prev.is_cs and len(prev.text) == 1
                and prev.text.isalpha() and tok.display()[0].isalpha()):
            parts.append(" ")
        parts.append(tok.display())
        prev = tok
    return "".join(parts)
