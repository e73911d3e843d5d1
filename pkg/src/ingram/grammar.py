"""Grammar data model and everything a user does with one: compile to a
minimal DFA, decide equivalence, test membership, generate sentences,
enumerate short members, and serialize to JSON.

A Grammar is G = (V, Sigma, P, S): named productions over regex trees whose
Ref nodes are the nonterminals. Sigma is always ASCII. The reference graph
must stay in the regular fragment: cycles only through tail positions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import dfa as _dfa
from .dfa import DFA
from .lang import (
    ASCII,
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
from .lang import inline, refs
from .source import Diagnostic, EmptyLanguage, Provenance, SYNTHETIC

__all__ = [
    "Grammar", "DFA", "compile_dfa", "equivalent", "member", "generate",
    "enumerate_shortest", "to_regex", "to_json", "from_json",
]


@dataclass
class Grammar:
    """Productions in insertion order; the first one need not be the start.

    Construction validates the invariants: the start symbol is defined, every
    referenced nonterminal is defined, and recursion is right-linear only.
    """

    start: str
    productions: dict[str, Lang]
    provenance: dict[str, list[Provenance]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.start not in self.productions:
            raise ValueError(f"start symbol {self.start!r} has no production")
        _dfa.check_compilable(self.productions, [])

    @property
    def variables(self) -> set[str]:
        return set(self.productions)

    @property
    def alphabet(self) -> frozenset[str]:
        return ASCII


def compile_dfa(g: Grammar) -> DFA:
    """The minimal DFA for L(g)."""
    return _dfa.compile_lang(Ref(g.start), g.productions)


def equivalent(a: Grammar, b: Grammar) -> tuple[bool, str | None]:
    """Language equality; on inequality also a shortest distinguishing
    witness (a string in exactly one of the two languages)."""
    return _dfa.equivalent_dfa(compile_dfa(a), compile_dfa(b))


def member(d: DFA, w: str, diagnostics: list[Diagnostic] | None = None) -> bool:
    """Membership in linear time. Non-ASCII input is never a member; a note
    lands in `diagnostics` when provided."""
    bad = [c for c in w if ord(c) > 127]
    if bad:
        if diagnostics is not None:
            diagnostics.append(Diagnostic(
                f"input contains non-ASCII character {bad[0]!r}", SYNTHETIC))
        return False
    return d.member(w)


# ---------------------------------------------------------------------------
# Sentence generation
# ---------------------------------------------------------------------------

#: Past this many nested nonterminal expansions the generator stops taking
#: chances and finishes along a shortest derivation.
_SOFT_DEPTH = 40


def _min_costs(g: Grammar) -> dict[str, float]:
    """Length of a shortest sentence per nonterminal; inf means empty."""
    costs = {name: math.inf for name in g.productions}
    changed = True
    while changed:
        changed = False
        for name, body in g.productions.items():
            c = _node_cost(body, costs)
            if c < costs[name]:
                costs[name] = c
                changed = True
    return costs


def _node_cost(n: Lang, costs: dict[str, float]) -> float:
    if isinstance(n, Empty):
        return math.inf
    if isinstance(n, Epsilon):
        return 0
    if isinstance(n, CharClass):
        return 1
    if isinstance(n, Literal):
        return len(n.text)
    if isinstance(n, Concat):
        return sum(_node_cost(i, costs) for i in n.items)
    if isinstance(n, Union):
        return min((_node_cost(i, costs) for i in n.items), default=math.inf)
    if isinstance(n, (Star, Optional)):
        return 0
    if isinstance(n, Plus):
        return _node_cost(n.item, costs)
    if isinstance(n, Repeat):
        return n.count * _node_cost(n.item, costs)
    assert isinstance(n, Ref)
    return costs[n.name]


def generate(g: Grammar, seed: int = 0, max_rep: int = 8,
             count: int = 1) -> list[str]:
    """Random sentences of L(g): deterministic for a seed, uniform among the
    viable alternatives of each union, geometric repetition truncated at
    max_rep. Every output is a member. Raises EmptyLanguage on L(g) = {}."""
    if max_rep < 1:
        raise ValueError("max_rep must be at least 1")
    if count < 0:
        raise ValueError("count must be non-negative")
    costs = _min_costs(g)
    if costs[g.start] == math.inf:
        raise EmptyLanguage("language is empty", SYNTHETIC)
    rng = random.Random(seed)

    def pick(n: int) -> int:
        return min(int(rng.random() * n), n - 1)

    def reps(lower: int, depth: int) -> int:
        if depth > _SOFT_DEPTH:
            return lower
        k = lower
        while k < max_rep and rng.random() < 0.5:
            k += 1
        return k

    def emit(n: Lang, depth: int, parts: list[str]) -> None:
        if isinstance(n, Epsilon):
            return
        if isinstance(n, CharClass):
            cs = sorted(n.chars)
            parts.append(cs[pick(len(cs))])
        elif isinstance(n, Literal):
            parts.append(n.text)
        elif isinstance(n, Concat):
            for item in n.items:
                emit(item, depth, parts)
        elif isinstance(n, Union):
            viable = [i for i in n.items if _node_cost(i, costs) < math.inf]
            if depth > _SOFT_DEPTH:
                choice = min(viable, key=lambda i: _node_cost(i, costs))
            else:
                choice = viable[pick(len(viable))]
            emit(choice, depth, parts)
        elif isinstance(n, Star):
            if _node_cost(n.item, costs) < math.inf:
                for _ in range(reps(0, depth)):
                    emit(n.item, depth, parts)
        elif isinstance(n, Plus):
            for _ in range(reps(1, depth)):
                emit(n.item, depth, parts)
        elif isinstance(n, Optional):
            if (_node_cost(n.item, costs) < math.inf and depth <= _SOFT_DEPTH
                    and rng.random() < 0.5):
                emit(n.item, depth, parts)
        elif isinstance(n, Repeat):
            for _ in range(n.count):
                emit(n.item, depth, parts)
        else:
            assert isinstance(n, Ref)
            emit(g.productions[n.name], depth + 1, parts)

    out: list[str] = []
    for _ in range(count):
        parts: list[str] = []
        emit(Ref(g.start), 0, parts)
        out.append("".join(parts))
    return out


def enumerate_shortest(g: Grammar, k: int) -> list[str]:
    """Every member of length <= k, lexicographically sorted."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return _dfa.enumerate_upto(compile_dfa(g), k)


# ---------------------------------------------------------------------------
# Flat regex rendering
# ---------------------------------------------------------------------------

_RE_SPECIAL = set("\\.^$*+?{}[]()|")
_RE_NAMED = {"\t": "\\t", "\n": "\\n", "\r": "\\r", "\v": "\\v", "\f": "\\f"}


def _re_char(c: str, in_class: bool) -> str:
    if c in _RE_NAMED:
        return _RE_NAMED[c]
    if not c.isprintable() or c == "\x7f":
        return f"\\x{ord(c):02x}"
    special = set("\\]^-") if in_class else _RE_SPECIAL
    return "\\" + c if c in special else c


def _re_class(chars: frozenset[str]) -> str:
    if len(chars) == 1:
        return _re_char(next(iter(chars)), in_class=False)
    # runs of 3+ consecutive codepoints compress to ranges
    pts = sorted(ord(c) for c in chars)
    runs: list[tuple[int, int]] = []
    for p in pts:
        if runs and p == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], p)
        else:
            runs.append((p, p))
    out = ["["]
    for lo, hi in runs:
        if hi - lo >= 2:
            out.append(f"{_re_char(chr(lo), True)}-{_re_char(chr(hi), True)}")
        else:
            out.extend(_re_char(chr(p), True) for p in range(lo, hi + 1))
    out.append("]")
    return "".join(out)


def _re_atom(n: Lang) -> str:
    """Rendering of n grouped tightly enough to take a postfix operator."""
    text = _re_of(n)
    if isinstance(n, (CharClass, Literal)) and (
            isinstance(n, CharClass) or len(n.text) == 1):
        return text
    return f"(?:{text})"


def _re_of(n: Lang) -> str:
    if isinstance(n, Empty):
        return "(?!)"
    if isinstance(n, Epsilon):
        return "(?:)"
    if isinstance(n, CharClass):
        return _re_class(n.chars)
    if isinstance(n, Literal):
        return "".join(_re_char(c, in_class=False) for c in n.text)
    if isinstance(n, Concat):
        return "".join(f"(?:{_re_of(i)})" if isinstance(i, Union) else _re_of(i)
                       for i in n.items)
    if isinstance(n, Union):
        return "|".join(_re_of(i) for i in n.items)
    if isinstance(n, Star):
        return _re_atom(n.item) + "*"
    if isinstance(n, Plus):
        return _re_atom(n.item) + "+"
    if isinstance(n, Optional):
        return _re_atom(n.item) + "?"
    if isinstance(n, Repeat):
        return _re_atom(n.item) + f"{{{n.count}}}"
    raise ValueError(f"cannot render unresolved reference {n!r}")


def _has_ref_cycle(g: Grammar) -> bool:
    colors: dict[str, int] = {}  # 1 in progress, 2 done

    def visit(name: str) -> bool:
        if colors.get(name) == 1:
            return True
        if colors.get(name) == 2:
            return False
        colors[name] = 1
        hit = any(visit(r) for r in sorted(refs(g.productions[name])))
        colors[name] = 2
        return hit

    return any(visit(name) for name in g.productions)


def to_regex(g: Grammar) -> str:
    """One flat Python-dialect regex for L(g), intended for re.fullmatch.
    Nonterminals are inlined; a recursive grammar goes through its DFA
    first. Character sets are explicit ASCII ranges, never POSIX classes."""
    if _has_ref_cycle(g):
        tree = _dfa.dfa_to_lang(compile_dfa(g))
    else:
        tree = inline(Ref(g.start), g.productions)
    return _re_of(tree)


# ---------------------------------------------------------------------------
# JSON serialization (schema v1, documented in docs/formats.md)
# ---------------------------------------------------------------------------


def _node_to_json(n: Lang) -> dict:
    if isinstance(n, Empty):
        return {"kind": "empty"}
    if isinstance(n, Epsilon):
        return {"kind": "epsilon"}
    if isinstance(n, CharClass):
        return {"kind": "char_class", "chars": "".join(sorted(n.chars))}
    if isinstance(n, Literal):
        return {"kind": "literal", "text": n.text}
    if isinstance(n, Concat):
        return {"kind": "concat", "items": [_node_to_json(i) for i in n.items]}
    if isinstance(n, Union):
        return {"kind": "union", "items": [_node_to_json(i) for i in n.items]}
    if isinstance(n, Star):
        return {"kind": "star", "item": _node_to_json(n.item)}
    if isinstance(n, Plus):
        return {"kind": "plus", "item": _node_to_json(n.item)}
    if isinstance(n, Optional):
        return {"kind": "optional", "item": _node_to_json(n.item)}
    if isinstance(n, Repeat):
        return {"kind": "repeat", "item": _node_to_json(n.item),
                "count": n.count}
    assert isinstance(n, Ref)
    return {"kind": "ref", "name": n.name}


def _node_from_json(doc: dict) -> Lang:
    kind = doc["kind"]
    if kind == "empty":
        return Empty()
    if kind == "epsilon":
        return Epsilon()
    if kind == "char_class":
        return CharClass(frozenset(doc["chars"]))
    if kind == "literal":
        return Literal(doc["text"])
    if kind == "concat":
        return Concat(tuple(_node_from_json(i) for i in doc["items"]))
    if kind == "union":
        return Union(tuple(_node_from_json(i) for i in doc["items"]))
    if kind == "star":
        return Star(_node_from_json(doc["item"]))
    if kind == "plus":
        return Plus(_node_from_json(doc["item"]))
    if kind == "optional":
        return Optional(_node_from_json(doc["item"]))
    if kind == "repeat":
        return Repeat(_node_from_json(doc["item"]), int(doc["count"]))
    if kind == "ref":
        return Ref(doc["name"])
    raise ValueError(f"unknown node kind {kind!r}")


def to_json(g: Grammar) -> dict:
    """Grammar JSON document, schema v1."""
    return {
        "start": g.start,
        "alphabet": "ascii",
        "productions": {name: _node_to_json(body)
                        for name, body in g.productions.items()},
        "provenance": {
            name: [{"file": p.file, "line": p.line, "column": p.column,
                    "length": p.length} for p in spans]
            for name, spans in g.provenance.items()
        },
    }


def from_json(doc: dict) -> Grammar:
    if doc.get("alphabet") != "ascii":
        raise ValueError("unsupported alphabet; expected \"ascii\"")
    productions = {name: _node_from_json(body)
                   for name, body in doc["productions"].items()}
    provenance = {
        name: [Provenance(s["file"], s["line"], s["column"], s["length"])
               for s in spans]
        for name, spans in doc.get("provenance", {}).items()
    }
    return Grammar(doc["start"], productions, provenance)
