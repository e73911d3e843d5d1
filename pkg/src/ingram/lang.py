"""Symbolic language descriptions: a regex tree over ASCII character classes.

This is the currency of the whole toolkit. Inference produces these trees,
grammars store one per production, and the automata backend compiles them.
`Ref` nodes name sublanguages (digit, sign, space, ...) whose definitions live
in a separate mapping so the same tree type serves both inference results
(acyclic) and grammars (cycles allowed through tail position only).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

#: The terminal alphabet: ASCII, codes 0-127.
ASCII = frozenset(chr(i) for i in range(128))


class Lang:
    """Base class for regex-tree nodes. All nodes are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Empty(Lang):
    """The empty language (no strings)."""


@dataclass(frozen=True)
class Epsilon(Lang):
    """The language containing only the empty string."""


@dataclass(frozen=True)
class CharClass(Lang):
    """Any single character from a set."""

    chars: frozenset[str]

    def __post_init__(self) -> None:
        if not self.chars:
            raise ValueError("empty character class; use Empty instead")
        bad = [c for c in self.chars if len(c) != 1 or ord(c) > 127]
        if bad:
            raise ValueError(f"non-ASCII characters in class: {bad!r}")


@dataclass(frozen=True)
class Literal(Lang):
    """An exact non-empty string."""

    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("empty literal; use Epsilon instead")
        if any(ord(c) > 127 for c in self.text):
            raise ValueError(f"non-ASCII literal: {self.text!r}")


@dataclass(frozen=True)
class Concat(Lang):
    items: tuple[Lang, ...]


@dataclass(frozen=True)
class Union(Lang):
    items: tuple[Lang, ...]


@dataclass(frozen=True)
class Star(Lang):
    item: Lang


@dataclass(frozen=True)
class Plus(Lang):
    item: Lang


@dataclass(frozen=True)
class Optional(Lang):
    item: Lang


@dataclass(frozen=True)
class Repeat(Lang):
    """Exactly `count` copies of `item`."""

    item: Lang
    count: int

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("negative repeat count")


@dataclass(frozen=True)
class Ref(Lang):
    """A reference to a named sublanguage."""

    name: str


EMPTY = Empty()
EPSILON = Epsilon()
ANY_CHAR = CharClass(ASCII)


def char(c: str) -> Lang:
    return CharClass(frozenset((c,)))


def chars(cs: str | frozenset[str] | set[str]) -> Lang:
    s = frozenset(cs)
    if not s:
        return EMPTY
    return CharClass(s)


def lit(text: str) -> Lang:
    return Literal(text) if text else EPSILON


def cat(*items: Lang) -> Lang:
    """Concatenation with the obvious simplifications applied."""
    flat: list[Lang] = []
    for it in items:
        if isinstance(it, Empty):
            return EMPTY
        if isinstance(it, Epsilon):
            continue
        if isinstance(it, Concat):
            flat.extend(it.items)
        else:
            flat.append(it)
    # Merge adjacent literals for readability.
    merged: list[Lang] = []
    for it in flat:
        if merged and isinstance(it, Literal) and isinstance(merged[-1], Literal):
            merged[-1] = Literal(merged[-1].text + it.text)
        else:
            merged.append(it)
    if not merged:
        return EPSILON
    if len(merged) == 1:
        return merged[0]
    return Concat(tuple(merged))


def alt(*items: Lang) -> Lang:
    """Union with flattening, dedup, and single-char merging."""
    flat: list[Lang] = []
    for it in items:
        if isinstance(it, Empty):
            continue
        if isinstance(it, Union):
            flat.extend(it.items)
        else:
            flat.append(it)
    # Merge all single-character alternatives into one class.
    merged_chars: set[str] = set()
    rest: list[Lang] = []
    for it in flat:
        if isinstance(it, CharClass):
            merged_chars |= it.chars
        elif isinstance(it, Literal) and len(it.text) == 1:
            merged_chars.add(it.text)
        else:
            rest.append(it)
    out: list[Lang] = []
    if merged_chars:
        out.append(CharClass(frozenset(merged_chars)))
    seen: set[Lang] = set()
    for it in rest:
        if it not in seen:
            seen.add(it)
            out.append(it)
    if not out:
        return EMPTY
    if len(out) == 1:
        return out[0]
    return Union(tuple(out))


def star(item: Lang) -> Lang:
    if isinstance(item, (Empty, Epsilon)):
        return EPSILON
    if isinstance(item, Star):
        return item
    if isinstance(item, (Plus, Optional)):
        return Star(item.item)
    return Star(item)


def plus(item: Lang) -> Lang:
    if isinstance(item, Empty):
        return EMPTY
    if isinstance(item, Epsilon):
        return EPSILON
    if isinstance(item, (Star, Plus)):
        return item
    if isinstance(item, Optional):
        return Star(item.item)
    return Plus(item)


def opt(item: Lang) -> Lang:
    if isinstance(item, (Empty, Epsilon)):
        return EPSILON
    if isinstance(item, (Star, Optional)):
        return item
    if isinstance(item, Plus):
        return Star(item.item)
    return Optional(item)


def rep(item: Lang, count: int) -> Lang:
    if count == 0:
        return EPSILON
    if count == 1:
        return item
    if isinstance(item, Empty):
        return EMPTY
    if isinstance(item, Epsilon):
        return EPSILON
    return Repeat(item, count)


#: Language of every ASCII string.
ANY_STRING = Star(ANY_CHAR)


def children(node: Lang) -> tuple[Lang, ...]:
    if isinstance(node, (Concat, Union)):
        return node.items
    if isinstance(node, (Star, Plus, Optional, Repeat)):
        return (node.item,)
    return ()


def walk(node: Lang) -> Iterator[Lang]:
    """Yield `node` and every descendant, pre-order."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def refs(node: Lang) -> set[str]:
    """Names of all sublanguages referenced from `node`."""
    return {n.name for n in walk(node) if isinstance(n, Ref)}


def terminal_chars(node: Lang, defs: Mapping[str, Lang] = {}) -> frozenset[str]:
    """Every character that can appear in a sentence of the language."""
    out: set[str] = set()
    seen: set[str] = set()

    def go(n: Lang) -> None:
        for sub in walk(n):
            if isinstance(sub, CharClass):
                out.update(sub.chars)
            elif isinstance(sub, Literal):
                out.update(sub.text)
            elif isinstance(sub, Ref):
                if sub.name not in seen:
                    seen.add(sub.name)
                    if sub.name in defs:
                        go(defs[sub.name])

    go(node)
    return frozenset(out)


def inline(node: Lang, defs: Mapping[str, Lang]) -> Lang:
    """Substitute every Ref by its definition. Requires an acyclic ref graph."""

    def go(n: Lang, trail: tuple[str, ...]) -> Lang:
        if isinstance(n, Ref):
            if n.name in trail:
                raise ValueError(f"cyclic reference through {n.name!r}; cannot inline")
            if n.name not in defs:
                raise KeyError(f"undefined sublanguage {n.name!r}")
            return go(defs[n.name], trail + (n.name,))
        if isinstance(n, Concat):
            return cat(*(go(i, trail) for i in n.items))
        if isinstance(n, Union):
            return alt(*(go(i, trail) for i in n.items))
        if isinstance(n, Star):
            return star(go(n.item, trail))
        if isinstance(n, Plus):
            return plus(go(n.item, trail))
        if isinstance(n, Optional):
            return opt(go(n.item, trail))
        if isinstance(n, Repeat):
            return rep(go(n.item, trail), n.count)
        return n

    return go(node, ())


def rename_refs(node: Lang, mapping: Mapping[str, str]) -> Lang:
    """Rewrite Ref names per `mapping`; unmapped names stay."""

    def go(n: Lang) -> Lang:
        if isinstance(n, Ref):
            return Ref(mapping.get(n.name, n.name))
        if isinstance(n, Concat):
            return Concat(tuple(go(i) for i in n.items))
        if isinstance(n, Union):
            return Union(tuple(go(i) for i in n.items))
        if isinstance(n, Star):
            return Star(go(n.item))
        if isinstance(n, Plus):
            return Plus(go(n.item))
        if isinstance(n, Optional):
            return Optional(go(n.item))
        if isinstance(n, Repeat):
            return Repeat(go(n.item), n.count)
        return n

    return go(node)


def restrict_chars(node: Lang, allowed: frozenset[str],
                   defs: Mapping[str, Lang]) -> tuple[Lang, dict[str, Lang]]:
    """Intersect a tree with `allowed*` structurally, preserving its shape.

    Exact for single-character restrictions: dropping the forbidden characters
    from every atom removes precisely the sentences that contain one. Returns
    the rewritten tree plus rewritten definitions for every Ref whose
    definition changed (renamed with a `_` suffix chain handled by the caller).
    """
    new_defs: dict[str, Lang] = {}

    def go(n: Lang) -> Lang:
        if isinstance(n, CharClass):
            kept = n.chars & allowed
            return CharClass(kept) if kept else EMPTY
        if isinstance(n, Literal):
            return n if all(c in allowed for c in n.text) else EMPTY
        if isinstance(n, Ref):
            if n.name not in new_defs:
                new_defs[n.name] = n  # placeholder guards against re-entry
                new_defs[n.name] = go(defs[n.name])
            return n
        if isinstance(n, Concat):
            return cat(*(go(i) for i in n.items))
        if isinstance(n, Union):
            return alt(*(go(i) for i in n.items))
        if isinstance(n, Star):
            return star(go(n.item))
        if isinstance(n, Plus):
            return plus(go(n.item))
        if isinstance(n, Optional):
            return opt(go(n.item))
        if isinstance(n, Repeat):
            return rep(go(n.item), n.count)
        return n

    rewritten = go(node)
    changed = {name: body for name, body in new_defs.items() if body != defs[name]}
    # A definition whose body references a changed one changes too, even if
    # none of its own atoms did; close transitively so the caller renames
    # the whole chain.
    while True:
        extra = {name: body for name, body in new_defs.items()
                 if name not in changed and refs(body) & changed.keys()}
        if not extra:
            break
        changed.update(extra)
    return rewritten, changed
