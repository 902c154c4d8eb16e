"""Mapping of letters and digits to Mathematical Alphanumeric Symbols.

Styled letters are emitted as Plane-1 codepoints whenever Unicode assigns
one; the handful of reserved slots (italic h, script/fraktur/double-struck
letters that predate the block) map to their designated Basic Multilingual
Plane letterlike characters.  Styles without a codepoint for the requested
character fall back to the base character plus an explicit variant signal
that emitters turn into a ``mathvariant`` attribute.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class MathStyle(enum.Enum):
    UPRIGHT = "upright"
    BOLD = "bold"
    ITALIC = "italic"
    BOLD_ITALIC = "bold-italic"
    SCRIPT = "script"
    BOLD_SCRIPT = "bold-script"
    FRAKTUR = "fraktur"
    BOLD_FRAKTUR = "bold-fraktur"
    DOUBLE_STRUCK = "double-struck"
    SANS = "sans"
    SANS_BOLD = "sans-bold"
    SANS_ITALIC = "sans-italic"
    SANS_BOLD_ITALIC = "sans-bold-italic"
    MONOSPACE = "monospace"

    @classmethod
    def parse(cls, text: str) -> "MathStyle":
        for style in cls:
            if style.value == text:
                return style
        raise ValueError(f"unknown math style {text!r}")


class UnmappableInputError(ValueError):
    pass


@dataclass(frozen=True)
class MappedChar:
    """Mapping result: output text plus an optional explicit variant."""

    text: str
    explicit_variant: str | None = None


# First codepoint of each (capital, small) Latin run.
_LATIN_BASES: dict[MathStyle, tuple[int, int]] = {
    MathStyle.BOLD: (0x1D400, 0x1D41A),
    MathStyle.ITALIC: (0x1D434, 0x1D44E),
    MathStyle.BOLD_ITALIC: (0x1D468, 0x1D482),
    MathStyle.SCRIPT: (0x1D49C, 0x1D4B6),
    MathStyle.BOLD_SCRIPT: (0x1D4D0, 0x1D4EA),
    MathStyle.FRAKTUR: (0x1D504, 0x1D51E),
    MathStyle.DOUBLE_STRUCK: (0x1D538, 0x1D552),
    MathStyle.BOLD_FRAKTUR: (0x1D56C, 0x1D586),
    MathStyle.SANS: (0x1D5A0, 0x1D5BA),
    MathStyle.SANS_BOLD: (0x1D5D4, 0x1D5EE),
    MathStyle.SANS_ITALIC: (0x1D608, 0x1D622),
    MathStyle.SANS_BOLD_ITALIC: (0x1D63C, 0x1D656),
    MathStyle.MONOSPACE: (0x1D670, 0x1D68A),
}

_DIGIT_BASES: dict[MathStyle, int] = {
    MathStyle.BOLD: 0x1D7CE,
    MathStyle.DOUBLE_STRUCK: 0x1D7D8,
    MathStyle.SANS: 0x1D7E2,
    MathStyle.SANS_BOLD: 0x1D7EC,
    MathStyle.MONOSPACE: 0x1D7F6,
}

# Greek runs: 26 capitals (with capital theta symbol and nabla included),
# then 25 smalls plus the 7 symbol variants, as laid out in the block.
_GREEK_CAPITALS = "ΑΒΓΔΕΖΗΘΙΚΛΜΝΞΟΠΡϴΣΤΥΦΧΨΩ∇"
_GREEK_SMALLS = "αβγδεζηθικλμνξοπρςστυφχψω∂ϵϑϰϕϱϖ"

_GREEK_BASES: dict[MathStyle, int] = {
    MathStyle.BOLD: 0x1D6A8,
    MathStyle.ITALIC: 0x1D6E2,
    MathStyle.BOLD_ITALIC: 0x1D71C,
    MathStyle.SANS_BOLD: 0x1D756,
    MathStyle.SANS_BOLD_ITALIC: 0x1D790,
}

# Reserved slots: these letters were encoded in the letterlike block long
# before Plane 1 existed, so their slots in the runs above stay empty.
_RESERVED: dict[tuple[MathStyle, str], int] = {
    (MathStyle.ITALIC, "h"): 0x210E,      # Planck constant
    (MathStyle.SCRIPT, "B"): 0x212C,
    (MathStyle.SCRIPT, "E"): 0x2130,
    (MathStyle.SCRIPT, "F"): 0x2131,
    (MathStyle.SCRIPT, "H"): 0x210B,
    (MathStyle.SCRIPT, "I"): 0x2110,
    (MathStyle.SCRIPT, "L"): 0x2112,
    (MathStyle.SCRIPT, "M"): 0x2133,
    (MathStyle.SCRIPT, "R"): 0x211B,
    (MathStyle.SCRIPT, "e"): 0x212F,
    (MathStyle.SCRIPT, "g"): 0x210A,
    (MathStyle.SCRIPT, "o"): 0x2134,
    (MathStyle.FRAKTUR, "C"): 0x212D,
    (MathStyle.FRAKTUR, "H"): 0x210C,
    (MathStyle.FRAKTUR, "I"): 0x2111,
    (MathStyle.FRAKTUR, "R"): 0x211C,
    (MathStyle.FRAKTUR, "Z"): 0x2128,
    (MathStyle.DOUBLE_STRUCK, "C"): 0x2102,
    (MathStyle.DOUBLE_STRUCK, "H"): 0x210D,
    (MathStyle.DOUBLE_STRUCK, "N"): 0x2115,
    (MathStyle.DOUBLE_STRUCK, "P"): 0x2119,
    (MathStyle.DOUBLE_STRUCK, "Q"): 0x211A,
    (MathStyle.DOUBLE_STRUCK, "R"): 0x211D,
    (MathStyle.DOUBLE_STRUCK, "Z"): 0x2124,
}


def styled_codepoint(ch: str, style: MathStyle) -> int | None:
    """The Mathematical Alphanumeric codepoint for (ch, style), or None."""
    reserved = _RESERVED.get((style, ch))
    if reserved is not None:
        return reserved
    if "A" <= ch <= "Z" or "a" <= ch <= "z":
        bases = _LATIN_BASES.get(style)
        if bases is None:
            return None
        cap_base, small_base = bases
        if ch.isupper():
            return cap_base + ord(ch) - ord("A")
        return small_base + ord(ch) - ord("a")
    if ch.isdigit() and ch.isascii():
        base = _DIGIT_BASES.get(style)
        if base is None:
            return None
        return base + int(ch)
    greek_base = _GREEK_BASES.get(style)
    if greek_base is not None:
        i = _GREEK_CAPITALS.find(ch)
        if i >= 0:
            return greek_base + i
        i = _GREEK_SMALLS.find(ch)
        if i >= 0:
            return greek_base + len(_GREEK_CAPITALS) + i
    return None


def map_unicode(ch: str, style: MathStyle) -> MappedChar:
    """Map a single letter/digit to its styled form.

    Raises :class:`UnmappableInputError` for characters outside the
    Latin/Greek letter and digit repertoire.
    """
    if len(ch) != 1:
        raise UnmappableInputError(f"expected a single character, got {ch!r}")
    mappable = (ch.isascii() and ch.isalnum()) or ch in _GREEK_CAPITALS \
        or ch in _GREEK_SMALLS
    if not mappable:
        raise UnmappableInputError(f"{ch!r} has no mathematical-style forms")
    if style is MathStyle.UPRIGHT:
        return MappedChar(ch)
    cp = styled_codepoint(ch, style)
    if cp is not None:
        return MappedChar(chr(cp))
    return MappedChar(ch, explicit_variant=style.value)


def map_text(text: str, style: MathStyle) -> MappedChar:
    """Map every character of ``text``; falls back as a whole on any miss."""
    if style is MathStyle.UPRIGHT:
        return MappedChar(text)
    out = []
    for ch in text:
        cp = styled_codepoint(ch, style)
        if cp is None:
            return MappedChar(text, explicit_variant=style.value)
        out.append(chr(cp))
    return MappedChar("".join(out))


def build_inverse_table() -> dict[int, tuple[str, MathStyle]]:
    """codepoint -> (base char, style) over every supported combination."""
    inverse: dict[int, tuple[str, MathStyle]] = {}
    chars = [chr(c) for c in range(ord("A"), ord("Z") + 1)]
    chars += [chr(c) for c in range(ord("a"), ord("z") + 1)]
    chars += [chr(c) for c in range(ord("0"), ord("9") + 1)]
    chars += list(_GREEK_CAPITALS) + list(_GREEK_SMALLS)
    for style in MathStyle:
        if style is MathStyle.UPRIGHT:
            continue
        for ch in chars:
            cp = styled_codepoint(ch, style)
            if cp is not None:
                inverse[cp] = (ch, style)
    return inverse
