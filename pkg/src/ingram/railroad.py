"""Railroad diagrams as a single SVG document, one diagram per production.

Layout is deliberately plain: left-to-right rails, rounded boxes for
terminals, sharp boxes for nonterminals, stacked branches for alternatives,
a bypass rail for optional parts, and a loop-back rail for repetition.
Everything is computed with integer coordinates from the grammar alone, so
the output is byte-stable across runs; stability is the contract,
aesthetics are not.
"""

from __future__ import annotations

from .ebnf import SPACE_GLYPH
from .grammar import Grammar
from .lang import (
    CharClass,
    Concat,
    Empty,
    Epsilon,
    Lang,
    Literal,
    Optional,
    Plus,
    Ref,
    Repeat,
    Star,
    Union,
)

__all__ = ["to_railroad_svg"]

CHAR_W = 8         # monospace advance
BOX_H = 28
PAD_X = 10         # text inset inside a box
GAP = 16           # rail between sequence items
ELBOW = 12         # horizontal getaway beside a branch stack
VGAP = 10          # vertical space between stacked branches
RAIL_GAP = 8       # vertical space between a rail and a nested element
TITLE_H = 24
MARGIN = 20
DIAGRAM_GAP = 28   # between consecutive productions

_TEXT_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;"}

_GLYPHS = {"\t": "\\t", "\n": "\\n", "\r": "\\r", "\v": "\\v", "\f": "\\f",
           " ": SPACE_GLYPH}


def _xml(text: str) -> str:
    return "".join(_TEXT_ESCAPES.get(c, c) for c in text)


def _char_glyph(c: str) -> str:
    if c in _GLYPHS:
        return _GLYPHS[c]
    if c.isprintable() and ord(c) < 128:
        return c
    return f"\\x{ord(c):02x}"


def _class_label(chars: frozenset[str]) -> str:
    """Compact [a-z]-style label for a character set."""
    pts = sorted(ord(c) for c in chars)
    runs: list[tuple[int, int]] = []
    for p in pts:
        if runs and p == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], p)
        else:
            runs.append((p, p))
    out = []
    for lo, hi in runs:
        if hi - lo >= 2:
            out.append(f"{_char_glyph(chr(lo))}-{_char_glyph(chr(hi))}")
        else:
            out.extend(_char_glyph(chr(p)) for p in range(lo, hi + 1))
    return "[" + "".join(out) + "]"


class _Box:
    """A laid-out element: width, height, and the y offset of the rail that
    enters on the left and leaves on the right (both at the same height)."""

    def __init__(self, w: int, h: int, rail: int):
        self.w = w
        self.h = h
        self.rail = rail

    def draw(self, x: int, y: int, out: list[str]) -> None:
        raise NotImplementedError


class _Leaf(_Box):
    def __init__(self, label: str, css: str):
        self.label = label
        self.css = css
        super().__init__(2 * PAD_X + CHAR_W * len(label), BOX_H, BOX_H // 2)

    def draw(self, x: int, y: int, out: list[str]) -> None:
        rx = ' rx="8"' if self.css == "t" else ""
        out.append(f'<rect class="{self.css}" x="{x}" y="{y}" '
                   f'width="{self.w}" height="{self.h}"{rx}/>')
        out.append(f'<text x="{x + self.w // 2}" y="{y + self.rail + 5}">'
                   f'{_xml(self.label)}</text>')


class _Line(_Box):
    """A bare stretch of rail (epsilon)."""

    def __init__(self, w: int = 2 * GAP):
        super().__init__(w, 2 * (BOX_H // 2), BOX_H // 2)

    def draw(self, x: int, y: int, out: list[str]) -> None:
        _rail(out, x, y + self.rail, self.w)


class _Seq(_Box):
    def __init__(self, items: list[_Box]):
        self.items = items
        up = max(b.rail for b in items)
        down = max(b.h - b.rail for b in items)
        w = sum(b.w for b in items) + GAP * (len(items) - 1)
        super().__init__(w, up + down, up)

    def draw(self, x: int, y: int, out: list[str]) -> None:
        rail_y = y + self.rail
        cx = x
        for i, b in enumerate(self.items):
            if i:
                _rail(out, cx, rail_y, GAP)
                cx += GAP
            b.draw(cx, rail_y - b.rail, out)
            cx += b.w


class _Branches(_Box):
    def __init__(self, items: list[_Box]):
        self.items = items
        inner = max(b.w for b in items)
        h = sum(b.h for b in items) + VGAP * (len(items) - 1)
        self.inner = inner
        super().__init__(inner + 2 * ELBOW, h, items[0].rail)

    def draw(self, x: int, y: int, out: list[str]) -> None:
        entry_y = y + self.rail
        exit_x = x + self.w
        cy = y
        for b in self.items:
            branch_y = cy + b.rail
            bx = x + ELBOW + (self.inner - b.w) // 2
            _elbow(out, x, entry_y, bx, branch_y)
            b.draw(bx, cy, out)
            _elbow(out, exit_x, entry_y, bx + b.w, branch_y)
            cy += b.h + VGAP


class _Loop(_Box):
    """`item` on the main rail with a loop-back below (one-or-more), plus an
    optional bypass rail above (zero-or-more / optional)."""

    def __init__(self, item: _Box, bypass: bool, loop: bool):
        self.item = item
        self.bypass = bypass
        self.loop = loop
        top = (RAIL_GAP + item.rail) if bypass else item.rail
        bottom = item.h - item.rail + (RAIL_GAP if loop else 0)
        super().__init__(item.w + 2 * ELBOW, top + bottom, top)

    def draw(self, x: int, y: int, out: list[str]) -> None:
        rail_y = y + self.rail
        ix = x + ELBOW
        self.item.draw(ix, rail_y - self.item.rail, out)
        _rail(out, x, rail_y, ELBOW)
        _rail(out, ix + self.item.w, rail_y, ELBOW)
        if self.bypass:
            top_y = y
            out.append(f'<path d="M {x} {rail_y} V {top_y} '
                       f'H {x + self.w} V {rail_y}"/>')
        if self.loop:
            low_y = y + self.h
            out.append(f'<path d="M {ix + self.item.w} {rail_y} V {low_y} '
                       f'H {ix} V {rail_y}"/>')


def _rail(out: list[str], x: int, y: int, w: int) -> None:
    out.append(f'<path d="M {x} {y} H {x + w}"/>')


def _elbow(out: list[str], x: int, y: int, bx: int, by: int) -> None:
    """Right-angle connector from a junction (x, y) to a branch end (bx, by)."""
    if y == by:
        out.append(f'<path d="M {x} {y} H {bx}"/>')
    else:
        mid = x + (8 if bx > x else -8)
        out.append(f'<path d="M {x} {y} H {mid} V {by} H {bx}"/>')


def _layout(n: Lang) -> _Box:
    if isinstance(n, Empty):
        return _Leaf("∅", "nt")
    if isinstance(n, Epsilon):
        return _Line()
    if isinstance(n, CharClass):
        if len(n.chars) == 1:
            return _Leaf(_char_glyph(next(iter(n.chars))), "t")
        return _Leaf(_class_label(n.chars), "t")
    if isinstance(n, Literal):
        return _Leaf("".join(_char_glyph(c) for c in n.text), "t")
    if isinstance(n, Ref):
        return _Leaf(n.name, "nt")
    if isinstance(n, Concat):
        return _Seq([_layout(i) for i in n.items])
    if isinstance(n, Union):
        return _Branches([_layout(i) for i in n.items])
    if isinstance(n, Star):
        return _Loop(_layout(n.item), bypass=True, loop=True)
    if isinstance(n, Plus):
        return _Loop(_layout(n.item), bypass=False, loop=True)
    if isinstance(n, Optional):
        return _Loop(_layout(n.item), bypass=True, loop=False)
    assert isinstance(n, Repeat)
    return _Seq([_layout(n.item) for _ in range(n.count)])


_STYLE = (
    "text{font:13px monospace;text-anchor:middle;fill:#111}"
    ".title{text-anchor:start;font-weight:bold}"
    "rect{fill:#fff;stroke:#333;stroke-width:1.5}"
    "rect.t{fill:#e8f0fe}"
    "path{fill:none;stroke:#333;stroke-width:1.5}"
    "circle{fill:#333}"
)


def to_railroad_svg(g: Grammar) -> str:
    """The whole grammar as one SVG document, productions stacked in their
    definition order, start production first."""
    body: list[str] = []
    y = MARGIN
    width = 0
    for name, production in g.productions.items():
        box = _layout(production)
        body.append(f'<text class="title" x="{MARGIN}" y="{y + 14}">'
                    f'{_xml(name)}:</text>')
        top = y + TITLE_H
        rail_y = top + box.rail
        x0 = MARGIN + 8
        body.append(f'<circle cx="{x0}" cy="{rail_y}" r="4"/>')
        _rail(body, x0, rail_y, GAP)
        box.draw(x0 + GAP, top, body)
        end_x = x0 + GAP + box.w
        _rail(body, end_x, rail_y, GAP)
        body.append(f'<circle cx="{end_x + GAP}" cy="{rail_y}" r="4"/>')
        width = max(width, end_x + GAP + MARGIN + 8)
        y = top + box.h + DIAGRAM_GAP
    height = y - DIAGRAM_GAP + MARGIN
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, f"<style>{_STYLE}</style>", *body, "</svg>"]) + "\n"
