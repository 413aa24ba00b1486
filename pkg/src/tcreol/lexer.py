"""Tokenizer for ``.tcreol`` model sources."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import Loc

KEYWORDS = frozenset(
    """
    interface class begin end with op var in out implements inherits
    await if then else while do new skip true false null nil now this
    """.split()
)

# longest first
SYMBOLS = (
    "|-|", ":=", "==", "[]", "|-", "-|", "/=", "<=", ">=", "&&", "||",
    "<", ">", "=", "+", "-", "*", "/", "%", "#", "~", "!", "?", ".",
    ",", ";", ":", "(", ")", "[", "]", "{", "}",
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")
_SPACE = re.compile(r"[ \t\r\n]+")
_EMPTY_BRACKETS = re.compile(r"\[[ \t]*\]")


class ParseError(Exception):
    """Lexing or parsing failure with location and expected-token set."""

    def __init__(self, msg: str, loc: Loc, expected: tuple[str, ...] = (), origin: str = "<inline>"):
        self.msg = msg
        self.loc = loc
        self.expected = expected
        self.origin = origin
        super().__init__(str(self))

    def __str__(self) -> str:
        s = f"{self.origin}:{self.loc.line}:{self.loc.col}: syntax error: {self.msg}"
        if self.expected:
            s += " (expected one of: " + ", ".join(self.expected) + ")"
        return s


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "string", "kw", "sym", "eof"
    text: str
    loc: Loc

    def is_(self, text: str) -> bool:
        return self.text == text and self.kind in ("kw", "sym")


def tokenize(text: str, origin: str = "<inline>") -> list[Token]:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(upto: int) -> None:
        nonlocal i, line, col
        chunk = text[i:upto]
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = upto

    while i < n:
        m = _SPACE.match(text, i)
        if m:
            advance(m.end())
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            advance(n if j < 0 else j)
            continue
        loc = Loc(line, col)
        c = text[i]
        if c == "$":
            raise ParseError("'$' is reserved for generated names", loc, origin=origin)
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            toks.append(Token("kw" if word in KEYWORDS else "ident", word, loc))
            advance(m.end())
            continue
        m = _INT.match(text, i)
        if m:
            toks.append(Token("int", m.group(), loc))
            advance(m.end())
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string literal", loc, origin=origin)
                if text[j] == "\\" and j + 1 < n:
                    buf.append({"n": "\n", "t": "\t"}.get(text[j + 1], text[j + 1]))
                    j += 2
                    continue
                buf.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", loc, origin=origin)
            toks.append(Token("string", "".join(buf), loc))
            advance(j + 1)
            continue
        if c == "[":
            # '[' followed by optional blanks and ']' is the single token '[]'
            m = _EMPTY_BRACKETS.match(text, i)
            if m:
                toks.append(Token("sym", "[]", loc))
                advance(m.end())
                continue
        for s in SYMBOLS:
            if text.startswith(s, i):
                toks.append(Token("sym", s, loc))
                advance(i + len(s))
                break
        else:
            raise ParseError(f"unexpected character {c!r}", loc, origin=origin)
    toks.append(Token("eof", "<eof>", Loc(line, col)))
    return toks
