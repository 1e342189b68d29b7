"""Tokenizer shared by the propositional, QDDC, SeCeNL and spec-file parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

# Longest symbols first.
_SYMBOLS = (
    "<=>", "=>", "<=", ">=", "~>", "&&", "||", "<>", "[]",
    "(", ")", "[", "]", "{", "}", "<", ">", "=", "!", "^", "*",
    ",", ";", ":", ".", "/", "@", "#", "-", "|", "&",
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NUMBER = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "num", "sym", "eof"
    text: str
    start: int
    end: int


class Lexer:
    """Lazy lexer over a source string; ``//`` comments run to end of line."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._peeked: list[Token] = []

    def position(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def error(self, message: str, offset: int | None = None) -> ParseError:
        if offset is None:
            offset = self.peek().start
        return ParseError(message, *self.position(offset))

    def _skip(self, pos: int) -> int:
        text = self.text
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
            elif text.startswith("//", pos):
                nl = text.find("\n", pos)
                pos = len(text) if nl < 0 else nl + 1
            else:
                break
        return pos

    def _lex(self, pos: int) -> Token:
        pos = self._skip(pos)
        text = self.text
        if pos >= len(text):
            return Token("eof", "", pos, pos)
        m = _IDENT.match(text, pos)
        if m:
            return Token("id", m.group(), pos, m.end())
        m = _NUMBER.match(text, pos)
        if m:
            return Token("num", m.group(), pos, m.end())
        for sym in _SYMBOLS:
            if text.startswith(sym, pos):
                return Token("sym", sym, pos, pos + len(sym))
        raise ParseError(f"unexpected character {text[pos]!r}", *self.position(pos))

    def peek(self, k: int = 0) -> Token:
        while len(self._peeked) <= k:
            start = self._peeked[-1].end if self._peeked else self.pos
            self._peeked.append(self._lex(start))
        return self._peeked[k]

    def next(self) -> Token:
        tok = self.peek()
        self._peeked.pop(0)
        self.pos = tok.end
        return tok

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in ("sym", "id") and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind in ("sym", "id") and tok.text == text:
            return self.next()
        shown = tok.text or "end of input"
        raise self.error(f"expected {text!r}, found {shown!r}")

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "id":
            raise self.error(f"expected identifier, found {tok.text or 'end of input'!r}")
        return self.next()

    def adjacent(self, text: str) -> bool:
        """Next two tokens are both ``text`` with no gap (e.g. ``[[``)."""
        a, b = self.peek(), self.peek(1)
        return a.text == text and b.text == text and a.kind == b.kind == "sym" and a.end == b.start

    def raw_until(self, stop: str) -> tuple[str, int]:
        """Consume raw characters up to (not including) ``stop``; used for waveforms."""
        start = self._peeked[0].start if self._peeked else self._skip(self.pos)
        self._peeked.clear()
        end = self.text.find(stop, start)
        if end < 0:
            raise ParseError(f"expected {stop!r}", *self.position(start))
        self.pos = end
        return self.text[start:end], start

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"
