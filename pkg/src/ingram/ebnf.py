"""EBNF rendering and parsing.

One production per line, `name → body`. Terminals are double-quoted with
the visible-space glyph ␣ standing for a space; alternatives use `|`,
repetition the postfix `* + ? {k}`. A character class that covers all of
ASCII prints as `any`, a near-total one as a difference `any - "c"`, and
one that coincides with another production's whole body prints as that
production's name. ε is the empty string, ∅ the empty language.

parse_ebnf accepts everything to_ebnf emits (plus `->` for the arrow
and `#` comment lines) and returns a Grammar; the round trip preserves
the language, not necessarily the tree.
"""

from __future__ import annotations

import re

from .grammar import Grammar
from .lang import (
    ANY_CHAR,
    ASCII,
    CharClass,
    Concat,
    Empty,
    Epsilon,
    EMPTY,
    EPSILON,
    Lang,
    Literal,
    Optional,
    Plus,
    Ref,
    Repeat,
    Star,
    Union,
    alt,
    cat,
    chars,
    opt,
    plus,
    rep,
    star,
)
from .source import EbnfSyntaxError, Provenance

__all__ = ["to_ebnf", "parse_ebnf"]

SPACE_GLYPH = "␣"  # ␣

_QUOTE_ESCAPES = {"\\": "\\\\", '"': '\\"', "\t": "\\t", "\n": "\\n",
                  "\r": "\\r", "\v": "\\v", "\f": "\\f", " ": SPACE_GLYPH}

#: Character classes wider than this render as a difference from `any`.
_DIFFERENCE_AT = 96


def _quote_char(c: str) -> str:
    if c in _QUOTE_ESCAPES:
        return _QUOTE_ESCAPES[c]
    if c.isprintable() and ord(c) < 128:
        return c
    return f"\\x{ord(c):02x}"


def _quote(text: str) -> str:
    return '"' + "".join(_quote_char(c) for c in text) + '"'


# precedence levels: 0 union (and `any` differences), 1 concat, 2 postfix
def _wrap(text: str, prec: int, context: int) -> str:
    return f"({text})" if prec < context else text


def _render(n: Lang, context: int, names: dict[frozenset, str],
            current: str) -> str:
    if isinstance(n, Empty):
        return "∅"
    if isinstance(n, Epsilon):
        return "ε"
    if isinstance(n, CharClass):
        name = names.get(n.chars)
        if name is not None and name != current:
            return name
        if n.chars == ASCII:
            return "any"
        if len(n.chars) > _DIFFERENCE_AT:
            parts = ["any"] + [f'- {_quote(c)}'
                               for c in sorted(ASCII - n.chars)]
            return _wrap(" ".join(parts), 0, context)
        if len(n.chars) == 1:
            return _quote(next(iter(n.chars)))
        body = " | ".join(_quote(c) for c in sorted(n.chars))
        return _wrap(body, 0, context)
    if isinstance(n, Literal):
        return _quote(n.text)
    if isinstance(n, Ref):
        return n.name
    if isinstance(n, Concat):
        body = " ".join(_render(i, 1, names, current) for i in n.items)
        return _wrap(body, 1, context)
    if isinstance(n, Union):
        body = " | ".join(_render(i, 0, names, current) for i in n.items)
        return _wrap(body, 0, context)
    suffix = {Star: "*", Plus: "+", Optional: "?"}.get(type(n))
    if suffix is None:
        assert isinstance(n, Repeat)
        suffix = f"{{{n.count}}}"
    inner = _render(n.item, 2, names, current)
    if isinstance(n.item, (Star, Plus, Optional, Repeat)):
        inner = f"({inner})"  # a** would be ambiguous to read back
    return inner + suffix


def to_ebnf(g: Grammar) -> str:
    """The grammar as EBNF text, start production first if it is first in
    the production order (insertion order is preserved)."""
    names = {body.chars: name for name, body in g.productions.items()
             if isinstance(body, CharClass)}
    lines = []
    for name, body in g.productions.items():
        lines.append(f"{name} → {_render(body, 0, names, name)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<repeat>\{\s*(?P<count>\d+)\s*\})
  | (?P<punct>[()|*+?\-]|ε|∅)
""", re.VERBOSE)

_UNESCAPES = {"\\": "\\", '"': '"', "t": "\t", "n": "\n", "r": "\r",
              "v": "\v", "f": "\f"}


class _Tok:
    __slots__ = ("kind", "text", "col", "count")

    def __init__(self, kind: str, text: str, col: int, count: int = 0):
        self.kind = kind
        self.text = text
        self.col = col
        self.count = count


def _unquote(text: str, line: int, col: int, filename: str) -> str:
    out = []
    i = 1
    while i < len(text) - 1:
        c = text[i]
        if c == SPACE_GLYPH:
            out.append(" ")
            i += 1
        elif c == "\\":
            esc = text[i + 1]
            if esc in _UNESCAPES:
                out.append(_UNESCAPES[esc])
                i += 2
            elif esc == "x":
                try:
                    point = int(text[i + 2:i + 4], 16)
                except ValueError:
                    point = -1
                if not 0 <= point < 128 or len(text[i + 2:i + 4]) != 2:
                    raise _err(filename, line, col + i,
                               "\\x wants two hex digits below 0x80")
                out.append(chr(point))
                i += 4
            else:
                raise _err(filename, line, col + i, f"unknown escape \\{esc}")
        elif ord(c) > 127:
            raise _err(filename, line, col + i,
                       f"non-ASCII character {c!r} in terminal")
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _err(filename: str, line: int, col: int, msg: str) -> EbnfSyntaxError:
    e = EbnfSyntaxError(msg)
    e.filename = filename
    e.lineno = line
    e.offset = col
    return e


def _lex(text: str, line: int, filename: str, offset: int = 0) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _err(filename, line, offset + pos + 1,
                       f"unexpected character {text[pos]!r}")
        pos = m.end()
        col = offset + m.start() + 1
        if m.group("ws"):
            continue
        if m.group("repeat"):
            toks.append(_Tok("repeat", m.group(), col, int(m.group("count"))))
        elif m.group("string"):
            toks.append(_Tok("string", m.group(), col))
        elif m.group("ident"):
            toks.append(_Tok("ident", m.group(), col))
        else:
            toks.append(_Tok(m.group(), m.group(), col))
    return toks


class _LineParser:
    def __init__(self, toks: list[_Tok], line: int, filename: str):
        self.toks = toks
        self.i = 0
        self.line = line
        self.filename = filename

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok | None:
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg: str, tok: _Tok | None = None) -> EbnfSyntaxError:
        col = tok.col if tok else (self.toks[-1].col if self.toks else 1)
        return _err(self.filename, self.line, col, msg)

    def union(self) -> Lang:
        items = [self.concat()]
        while (t := self.peek()) and t.kind == "|":
            self.next()
            items.append(self.concat())
        return alt(*items)

    def concat(self) -> Lang:
        items = [self.postfix()]
        while (t := self.peek()) and t.kind in ("ident", "string", "(",
                                                "ε", "∅"):
            items.append(self.postfix())
        return cat(*items)

    def postfix(self) -> Lang:
        node = self.atom()
        while (t := self.peek()) and t.kind in ("*", "+", "?", "repeat"):
            self.next()
            if t.kind == "*":
                node = star(node)
            elif t.kind == "+":
                node = plus(node)
            elif t.kind == "?":
                node = opt(node)
            else:
                node = rep(node, t.count)
        return node

    def atom(self) -> Lang:
        t = self.next()
        if t is None:
            raise self.fail("expected an expression, found end of line")
        if t.kind == "string":
            text = _unquote(t.text, self.line, t.col, self.filename)
            return Literal(text) if text else EPSILON
        if t.kind == "ident":
            if t.text == "any":
                return self.difference()
            return Ref(t.text)
        if t.kind == "ε":
            return EPSILON
        if t.kind == "∅":
            return EMPTY
        if t.kind == "(":
            node = self.union()
            closing = self.next()
            if closing is None or closing.kind != ")":
                raise self.fail("expected )", closing)
            return node
        raise self.fail(f"unexpected {t.text!r}", t)

    def difference(self) -> Lang:
        remaining = set(ASCII)
        while (t := self.peek()) and t.kind == "-":
            self.next()
            operand = self.next()
            if operand is None or operand.kind != "string":
                raise self.fail("difference wants a quoted character", operand)
            text = _unquote(operand.text, self.line, operand.col,
                            self.filename)
            if len(text) != 1:
                raise self.fail("difference wants exactly one character",
                                operand)
            remaining.discard(text)
        if remaining == ASCII:
            return ANY_CHAR
        return chars("".join(remaining))


_RULE_RE = re.compile(
    r"\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(?:→|->)\s*(?P<body>.*)")


def parse_ebnf(text: str, filename: str = "<ebnf>") -> Grammar:
    """Grammar from EBNF text. The first production names the start symbol;
    `#` starts a comment line; `any` is reserved."""
    productions: dict[str, Lang] = {}
    provenance: dict[str, list[Provenance]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _RULE_RE.match(raw)
        if m is None:
            raise _err(filename, lineno, 1,
                       "expected `name → expression`")
        name = m.group("name")
        if name == "any":
            raise _err(filename, lineno, 1, "`any` is reserved")
        if name in productions:
            raise _err(filename, lineno, 1, f"{name!r} is defined twice")
        toks = _lex(m.group("body"), lineno, filename,
                    offset=m.start("body"))
        parser = _LineParser(toks, lineno, filename)
        body = parser.union()
        trailing = parser.peek()
        if trailing is not None:
            raise parser.fail(f"unexpected {trailing.text!r}", trailing)
        productions[name] = body
        provenance[name] = [Provenance(filename, lineno, 1, max(1, len(raw)))]
    if not productions:
        raise _err(filename, 1, 1, "no productions")
    start = next(iter(productions))
    try:
        return Grammar(start, productions, provenance)
    except ValueError as exc:
        raise _err(filename, 1, 1, str(exc)) from exc
