"""Builtin models: concrete semantics paired with backward transfers.

Every builtin the IR may call is registered here with its signature, a
concrete function used by the interpreter, and (for the string-consuming
builtins) a transfer that converts a demand on the call's result into a
demand on its string input. The two sides are developed independently and
tied together only by the agreement property tested exhaustively on short
strings: w satisfies the transferred input language for demand D iff the
concrete call on w succeeds with a result satisfying D.

Subject-language semantics are fixed to ASCII: whitespace is the six-element
set {space, \\t, \\n, \\v, \\f, \\r} everywhere (int_py, strip_py), and `map`
is strict, left to right, first failure rejects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from . import dfa
from .ir import Arg, FnArg, IntArg, Shape, StrArg
from .lang import (
    ANY_STRING,
    ASCII,
    CharClass,
    EPSILON,
    Lang,
    Ref,
    alt,
    cat,
    chars,
    lit,
    opt,
    refs,
    rename_refs,
    restrict_chars,
    star,
    terminal_chars,
)
from .source import Provenance, UnsupportedConstraint

# ---------------------------------------------------------------------------
# Named sublanguages shared by the integer-parsing transfers.
# ---------------------------------------------------------------------------

#: Whitespace recognized by int_py and strip_py. ASCII only; the host's wider
#: Unicode set (and its \x1c-\x1f oddity) is documented as out of scope.
SPACE_CHARS = " \t\n\v\f\r"

_INT_BODY = cat(
    star(Ref("space")),
    opt(Ref("sign")),
    Ref("digit"),
    star(cat(opt(lit("_")), Ref("digit"))),
    star(Ref("space")),
)

NAMED_LANGS: dict[str, Lang] = {
    "int": _INT_BODY,
    "digit": chars("0123456789"),
    "sign": chars("+-"),
    "space": chars(SPACE_CHARS),
}

#: Registration order for named sublanguages, so grammars render stably.
_NAMED_ORDER = ("int", "digit", "sign", "space")


def int_py_language() -> Lang:
    """The exact input language of int_py: space* sign? digit ("_"? digit)* space*.

    References digit/sign/space; definitions live in NAMED_LANGS.
    """
    return _INT_BODY


# ---------------------------------------------------------------------------
# Concrete semantics
# ---------------------------------------------------------------------------

BUILTIN_ERROR = "builtin_error"
INDEX_OUT_OF_RANGE = "index_out_of_range"


class ConcreteError(Exception):
    """A data-dependent failure inside a builtin (the interpreter rejects)."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


_INT_RE = re.compile(r"[ \t\n\v\f\r]*[+-]?[0-9](?:_?[0-9])*[ \t\n\v\f\r]*\Z")


def int_py_concrete(text: str) -> int:
    """Parse a decimal integer exactly as the host does on ASCII input:
    surrounding whitespace, one optional sign, underscores only between
    digits, leading zeros fine."""
    if not _INT_RE.match(text):
        raise ConcreteError(BUILTIN_ERROR, f"invalid integer literal {text!r}")
    return int(text)


def split_py_concrete(text: str, sep: str) -> list[str]:
    """Split on every non-overlapping occurrence of sep, left to right;
    n occurrences give n+1 fields and the empty string gives [""]."""
    return text.split(sep)


def strip_py_concrete(text: str) -> str:
    return text.strip(SPACE_CHARS)


def len_concrete(xs: list) -> int:
    return len(xs)


def equals_concrete(a: int, b: int) -> bool:
    return a == b


def index_concrete(xs: list, i: int):
    if not 0 <= i < len(xs):
        raise ConcreteError(
            INDEX_OUT_OF_RANGE, f"index {i} out of range for {len(xs)} element(s)")
    return xs[i]


def map_concrete(fn: str, xs: list) -> list:
    model = REGISTRY[fn]
    return [model.concrete(x) for x in xs]


# ---------------------------------------------------------------------------
# Demand algebra
# ---------------------------------------------------------------------------


class Contradiction(Exception):
    """Conflicting demands: the parser rejects every input. Inference turns
    this into the Empty language plus a diagnostic, not a hard error."""


@dataclass(frozen=True)
class Count:
    """A constraint on an integer: unconstrained, exactly k, or at least k."""

    kind: str  # "top" | "eq" | "ge"
    k: int = 0

    @staticmethod
    def top() -> "Count":
        return Count("top")

    @staticmethod
    def eq(k: int) -> "Count":
        return Count("eq", k)

    @staticmethod
    def ge(k: int) -> "Count":
        return Count("ge", k)

    @property
    def is_top(self) -> bool:
        return self.kind == "top"

    def meet(self, other: "Count") -> "Count":
        if self.is_top:
            return other
        if other.is_top:
            return self
        a, b = sorted((self, other), key=lambda c: c.kind)  # "eq" < "ge"
        if a.kind == "eq" and b.kind == "eq":
            if a.k != b.k:
                raise Contradiction(f"cannot be both {a.k} and {b.k}")
            return a
        if a.kind == "eq":
            if a.k < b.k:
                raise Contradiction(f"cannot be {a.k} and also at least {b.k}")
            return a
        return Count.ge(max(a.k, b.k))

    def __str__(self) -> str:
        if self.is_top:
            return "any"
        return f"= {self.k}" if self.kind == "eq" else f">= {self.k}"


@dataclass
class ListDemand:
    """Demand on a list variable: sparse per-index element demands, a default
    demand for the remaining elements, and a count constraint. Element
    demands are Lang for string lists and Count for int lists; None is top.
    """

    default: object = None
    elems: dict[int, object] = field(default_factory=dict)
    count: Count = field(default_factory=Count.top)


# ---------------------------------------------------------------------------
# Definition environment shared by the transfers
# ---------------------------------------------------------------------------


class DefEnv:
    """Mutable map of named sublanguages accumulated during inference, with
    the source spans that demanded each one."""

    def __init__(self, defs: Mapping[str, Lang] | None = None) -> None:
        self.defs: dict[str, Lang] = dict(defs or {})
        self.provenance: dict[str, list[Provenance]] = {}

    def note(self, name: str, where: Provenance | None) -> None:
        if where is None:
            return
        spans = self.provenance.setdefault(name, [])
        if where not in spans:
            spans.append(where)

    def fresh_name(self, base: str) -> str:
        if base not in self.defs:
            return base
        n = 2
        while f"{base}_{n}" in self.defs:
            n += 1
        return f"{base}_{n}"

    def define(self, name: str, body: Lang,
               where: Provenance | None = None) -> str:
        """Register `body` under `name`, renaming on conflict; reuses an
        existing identical definition."""
        if self.defs.get(name) == body:
            self.note(name, where)
            return name
        actual = self.fresh_name(name)
        self.defs[actual] = body
        self.note(actual, where)
        return actual

    def use_named(self, name: str, where: Provenance | None = None) -> Lang:
        """Bring a canonical sublanguage (and its closure) into scope."""
        closure = _named_closure(name)
        for n in _NAMED_ORDER:
            if n in closure:
                self.defs.setdefault(n, NAMED_LANGS[n])
                self.note(n, where)
        return Ref(name)


def _named_closure(name: str) -> set[str]:
    out = {name}
    stack = [name]
    while stack:
        for r in sorted(refs(NAMED_LANGS[stack.pop()])):
            if r not in out:
                out.add(r)
                stack.append(r)
    return out


# ---------------------------------------------------------------------------
# Transfers
# ---------------------------------------------------------------------------


def int_py_transfer(demand: Count | None, env: DefEnv,
                    where: Provenance) -> Lang:
    """int_py succeeds exactly on L(int); value constraints are refused."""
    if demand is not None and not demand.is_top:
        raise UnsupportedConstraint(
            f"constraint {demand} on an integer value is not supported", where)
    return env.use_named("int", where)


def _has_border(sep: str) -> bool:
    return any(sep[:i] == sep[-i:] for i in range(1, len(sep)))


def _sep_free(demand: Lang, sep: str, env: DefEnv,
              where: Provenance | None = None) -> Lang:
    """demand ∩ (strings without sep). Structural and exact for single-char
    separators; automaton product otherwise."""
    if len(sep) == 1:
        tree, changed = restrict_chars(demand, ASCII - {sep}, env.defs)
        if not changed:
            return tree
        mapping = {old: env.fresh_name(f"{old}_nosep") for old in sorted(changed)}
        for old, new in mapping.items():
            env.defs[new] = rename_refs(changed[old], mapping)
            env.note(new, where)
        return rename_refs(tree, mapping)
    d = dfa.compile_lang(demand, env.defs)
    bad = dfa.compile_lang(cat(ANY_STRING, lit(sep), ANY_STRING))
    free = dfa.difference_dfa(d, bad)
    if dfa.equivalent_dfa(free, d)[0]:
        return demand
    return dfa.dfa_to_lang(free)


def split_py_transfer(demand: ListDemand, sep: str, env: DefEnv,
                      where: Provenance) -> Lang | None:
    """Invert a split: fields joined by sep, each field sep-free and in its
    demanded language. Exact because a borderless separator factors every
    string uniquely into sep-free fields. None means no constraint (split
    itself is total, so an undemanded result constrains nothing)."""
    if not sep:
        raise UnsupportedConstraint("split separator must be non-empty", where)
    if _has_border(sep):
        raise UnsupportedConstraint(
            f"split separator {sep!r} overlaps itself, so field boundaries "
            "are ambiguous", where)
    if (not demand.elems and demand.default is None
            and (demand.count.is_top or demand.count == Count.ge(1)
                 or demand.count == Count.ge(0))):
        return None
    count = demand.count
    if count.is_top:
        count = Count.ge(1)
    if count.k < 1:
        if count.kind == "eq":
            raise Contradiction("a split result always has at least one field")
        count = Count.ge(1)
    max_idx = max(demand.elems, default=-1)
    if count.kind == "eq" and max_idx >= count.k:
        raise Contradiction(
            f"field {max_idx} is demanded but the split has exactly "
            f"{count.k} field(s)")
    k = count.k if count.kind == "eq" else max(count.k, max_idx + 1)

    def fld(i: int) -> Lang:
        raw = demand.elems.get(i, demand.default)
        return _sep_free(ANY_STRING if raw is None else raw, sep, env, where)

    parts: list[Lang] = []
    for i in range(k):
        if i:
            parts.append(lit(sep))
        parts.append(fld(i))
    if count.kind == "ge":
        tail = _sep_free(
            ANY_STRING if demand.default is None else demand.default,
            sep, env, where)
        parts.append(star(cat(lit(sep), tail)))
    return cat(*parts)


_NONSPACE = CharClass(ASCII - set(SPACE_CHARS))
_NO_EDGE_SPACE = alt(EPSILON, _NONSPACE, cat(_NONSPACE, ANY_STRING, _NONSPACE))


def strip_py_transfer(demand: Lang | None, env: DefEnv,
                      where: Provenance) -> Lang | None:
    """{w : strip(w) in D} = space* D' space* with D' = D restricted to
    strings without leading or trailing whitespace."""
    if demand is None or demand == ANY_STRING:
        return None if demand is None else ANY_STRING
    space_star = star(env.use_named("space", where))
    if not (terminal_chars(demand, env.defs) & set(SPACE_CHARS)):
        return cat(space_star, demand, space_star)
    d = dfa.compile_lang(demand, env.defs)
    core = dfa.dfa_to_lang(dfa.intersect_dfa(d, dfa.compile_lang(_NO_EDGE_SPACE)))
    result = cat(space_star, core, space_star)
    if dfa.equivalent_dfa(dfa.compile_lang(result, env.defs), d)[0]:
        return demand
    return result


def len_transfer(demand: Count | None) -> ListDemand | None:
    if demand is None or demand.is_top:
        return None
    return ListDemand(count=demand)


def index_transfer(demand: object | None, i: int) -> ListDemand:
    elems = {} if demand is None else {i: demand}
    return ListDemand(elems=elems, count=Count.ge(i + 1))


def equals_transfer(args: tuple[Arg, ...],
                    where: Provenance) -> list[tuple[str, Count]]:
    """Demand `true` on an equals result: pins the variable operand to the
    literal. Two literals decide immediately; two variables are refused."""
    a, b = args
    if isinstance(a, IntArg) and isinstance(b, IntArg):
        if a.value != b.value:
            raise Contradiction(
                f"asserted {a.value} = {b.value}, which never holds")
        return []
    if isinstance(a, IntArg):
        return [(b.name, Count.eq(a.value))]
    if isinstance(b, IntArg):
        return [(a.name, Count.eq(b.value))]
    raise UnsupportedConstraint(
        "equals on two non-literal operands is not supported", where)


def map_transfer(demand: ListDemand, fn: str, env: DefEnv,
                 where: Provenance) -> ListDemand:
    """Element demands pass through the mapped builtin's own transfer; the
    default covers the unnamed tail (for int_py that is L(int) even with no
    demand, since every element must parse for map to succeed)."""
    transfer = ELEM_TRANSFERS[fn]
    elems = {i: transfer(d, env, where) for i, d in demand.elems.items()}
    return ListDemand(
        default=transfer(demand.default, env, where),
        elems=elems,
        count=demand.count,
    )


ELEM_TRANSFERS: dict[str, Callable] = {
    "int_py": int_py_transfer,
    "strip_py": strip_py_transfer,
}


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArgSpec:
    shapes: frozenset[Shape] = frozenset()
    str_lit: bool = False
    int_lit: bool = False
    fn: bool = False


@dataclass(frozen=True)
class Signature:
    params: tuple[ArgSpec, ...]


@dataclass(frozen=True)
class BuiltinModel:
    name: str
    signature: Signature
    concrete: Callable
    summary: str
    mappable: bool = False
    has_transfer: bool = True
    validate: Callable[[tuple[Arg, ...]], list[str]] | None = None


REGISTRY: dict[str, BuiltinModel] = {}


def register(model: BuiltinModel) -> None:
    if model.name in REGISTRY:
        raise ValueError(f"builtin {model.name!r} is already registered")
    REGISTRY[model.name] = model


def list_builtins() -> list[BuiltinModel]:
    return [REGISTRY[name] for name in sorted(REGISTRY)]


def result_shape(name: str, shapes: tuple[Shape, ...]) -> Shape:
    if name == "index":
        return Shape.STR if shapes[0] is Shape.STR_LIST else Shape.INT
    if name == "map":
        return Shape.INT_LIST if shapes[0] is Shape.INT else Shape.STR_LIST
    return {
        "int_py": Shape.INT,
        "split_py": Shape.STR_LIST,
        "strip_py": Shape.STR,
        "len": Shape.INT,
        "equals": Shape.BOOL,
    }[name]


def _validate_split(args: tuple[Arg, ...]) -> list[str]:
    sep = args[0]
    if isinstance(sep, StrArg) and not sep.value:
        return ["split_py separator must be non-empty"]
    return []


def _validate_index(args: tuple[Arg, ...]) -> list[str]:
    i = args[1]
    if isinstance(i, IntArg) and i.value < 0:
        return ["index must be non-negative"]
    return []


def _str_arg(shape: Shape = Shape.STR) -> ArgSpec:
    return ArgSpec(shapes=frozenset((shape,)))


register(BuiltinModel(
    name="int_py",
    signature=Signature((_str_arg(),)),
    concrete=int_py_concrete,
    summary="parse a decimal integer; whitespace, one sign, underscores "
            "between digits",
    mappable=True,
))
register(BuiltinModel(
    name="split_py",
    signature=Signature((ArgSpec(str_lit=True), _str_arg())),
    concrete=lambda sep, text: split_py_concrete(text, sep),
    summary="split on a literal separator; n occurrences give n+1 fields",
    validate=_validate_split,
))
register(BuiltinModel(
    name="strip_py",
    signature=Signature((_str_arg(),)),
    concrete=strip_py_concrete,
    summary="drop leading and trailing whitespace",
    mappable=True,
))
register(BuiltinModel(
    name="len",
    signature=Signature((ArgSpec(
        shapes=frozenset((Shape.STR_LIST, Shape.INT_LIST))),)),
    concrete=len_concrete,
    summary="length of a list; feeds count constraints",
))
register(BuiltinModel(
    name="equals",
    signature=Signature((
        ArgSpec(shapes=frozenset((Shape.INT,)), int_lit=True),
        ArgSpec(shapes=frozenset((Shape.INT,)), int_lit=True),
    )),
    concrete=equals_concrete,
    summary="integer equality; asserts pin counts",
))
register(BuiltinModel(
    name="index",
    signature=Signature((
        ArgSpec(shapes=frozenset((Shape.STR_LIST, Shape.INT_LIST))),
        ArgSpec(int_lit=True),
    )),
    concrete=index_concrete,
    summary="element at a literal position; rejects when out of range",
    validate=_validate_index,
))
register(BuiltinModel(
    name="map",
    signature=Signature((
        ArgSpec(fn=True),
        ArgSpec(shapes=frozenset((Shape.STR_LIST,))),
    )),
    concrete=map_concrete,
    summary="apply a builtin to every element, left to right, strictly",
))
