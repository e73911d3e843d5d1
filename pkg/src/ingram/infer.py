"""Backward demand inference.

Walks a parser's let-chain from `accept` toward the parameter, asking of
each builtin call: under what demand on its string inputs does execution
reach accept? Builtin transfers (models.py) answer one call at a time;
demands on the same variable meet by language intersection or count
conjunction. The final demand on the parameter solves the input hole.

When no diagnostic is emitted the result is exact: L(model) is precisely
the set of accepted strings. Contradictory counts collapse to the Empty
language with a diagnostic; constraint shapes with no transfer raise
UnsupportedConstraint rather than approximate.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping

from . import dfa as _dfa
from . import models
from .grammar import Grammar
from .ir import (
    Accept,
    Arg,
    Assert,
    FnArg,
    IntArg,
    IRProgram,
    Let,
    Shape,
    Solved,
    StrArg,
    VarArg,
    body_nodes,
    well_formed,
)
from .lang import (
    ANY_STRING,
    EMPTY,
    Concat,
    Lang,
    Literal,
    Ref,
    Star,
    alt,
    cat,
    refs,
)
from .models import Contradiction, Count, DefEnv, ListDemand
from .source import Diagnostic, Provenance, UnsupportedConstruct

__all__ = ["LanguageModel", "infer", "intersect", "to_grammar"]


@dataclass
class LanguageModel:
    """The solved input language of one parser: a root expression over named
    sublanguage definitions, each definition annotated with the source spans
    that demanded it."""

    program: IRProgram
    root: Lang
    defs: dict[str, Lang]
    provenance: dict[str, list[Provenance]]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.program.name

    @property
    def param(self) -> str:
        return self.program.param


# ---------------------------------------------------------------------------
# Language intersection
# ---------------------------------------------------------------------------


def intersect(a: Lang, b: Lang,
              defs: Mapping[str, Lang] | None = None) -> Lang:
    """L(a) ∩ L(b), exactly. Keeps the smaller operand's syntax when one
    language contains the other; otherwise takes the automaton product and
    converts back to an expression."""
    defs = defs or {}
    if a == b or b == ANY_STRING:
        return a
    if a == ANY_STRING:
        return b
    if a == EMPTY or b == EMPTY:
        return EMPTY
    da = _dfa.compile_lang(a, defs)
    db = _dfa.compile_lang(b, defs)
    if _dfa.is_subset(da, db):
        return a
    if _dfa.is_subset(db, da):
        return b
    out = _dfa.intersect_dfa(da, db)
    if out.is_empty():
        return EMPTY
    return _dfa.dfa_to_lang(out)


# ---------------------------------------------------------------------------
# Demand bookkeeping
# ---------------------------------------------------------------------------


class _Demands:
    """Per-variable demands, keyed by shape: Lang for strings, Count for
    ints, ListDemand for lists, and the set of asserted booleans."""

    def __init__(self, env: DefEnv) -> None:
        self.env = env
        self.strs: dict[str, Lang] = {}
        self.ints: dict[str, Count] = {}
        self.lists: dict[str, ListDemand] = {}
        self.asserted: set[str] = set()

    def meet_str(self, name: str, demand: Lang) -> None:
        old = self.strs.get(name)
        self.strs[name] = (demand if old is None
                           else intersect(old, demand, self.env.defs))

    def meet_int(self, name: str, demand: Count) -> None:
        old = self.ints.get(name)
        self.ints[name] = demand if old is None else old.meet(demand)

    def meet_list(self, name: str, demand: ListDemand) -> None:
        old = self.lists.get(name)
        self.lists[name] = (demand if old is None
                            else self._meet_lists(old, demand))

    def _meet_elem(self, a: object | None, b: object | None) -> object | None:
        if a is None:
            return b
        if b is None:
            return a
        if isinstance(a, Count):
            return a.meet(b)
        return intersect(a, b, self.env.defs)

    def _meet_lists(self, a: ListDemand, b: ListDemand) -> ListDemand:
        elems = {}
        for i in sorted(set(a.elems) | set(b.elems)):
            elems[i] = self._meet_elem(a.elems.get(i, a.default),
                                       b.elems.get(i, b.default))
        return ListDemand(
            default=self._meet_elem(a.default, b.default),
            elems=elems,
            count=a.count.meet(b.count),
        )


def _is_top_list(d: ListDemand) -> bool:
    return d.default is None and not d.elems and d.count.is_top


def _arg_shape(arg: Arg, shapes: Mapping[str, Shape]) -> Shape:
    if isinstance(arg, VarArg):
        return shapes[arg.name]
    if isinstance(arg, StrArg):
        return Shape.STR
    if isinstance(arg, IntArg):
        return Shape.INT
    return models.result_shape(arg.name, ())


def _var(arg: Arg) -> str:
    assert isinstance(arg, VarArg)
    return arg.name


# ---------------------------------------------------------------------------
# The backward walk
# ---------------------------------------------------------------------------


def _apply(node: Let, d: _Demands, shapes: Mapping[str, Shape]) -> None:
    """Consume the demand on node.var and push it through the builtin's
    transfer onto the call's operands."""
    call = node.call
    where = call.prov
    name = call.builtin
    var = node.var
    if name == "int_py":
        out = models.int_py_transfer(d.ints.pop(var, None), d.env, where)
        d.meet_str(_var(call.args[0]), out)
    elif name == "split_py":
        demand = d.lists.pop(var, None) or ListDemand()
        sep = call.args[0]
        assert isinstance(sep, StrArg)
        out = models.split_py_transfer(demand, sep.value, d.env, where)
        if out is not None:
            d.meet_str(_var(call.args[1]), out)
    elif name == "strip_py":
        out = models.strip_py_transfer(d.strs.pop(var, None), d.env, where)
        if out is not None:
            d.meet_str(_var(call.args[0]), out)
    elif name == "len":
        out = models.len_transfer(d.ints.pop(var, None))
        if out is not None:
            d.meet_list(_var(call.args[0]), out)
    elif name == "equals":
        if var in d.asserted:
            for operand, count in models.equals_transfer(call.args, where):
                d.meet_int(operand, count)
    elif name == "index":
        pos = call.args[1]
        assert isinstance(pos, IntArg)
        if shapes[var] is Shape.STR:
            elem = d.strs.pop(var, None)
        else:
            elem = d.ints.pop(var, None)
        d.meet_list(_var(call.args[0]), models.index_transfer(elem, pos.value))
    elif name == "map":
        fn = call.args[0]
        assert isinstance(fn, FnArg)
        demand = d.lists.pop(var, None) or ListDemand()
        out = models.map_transfer(demand, fn.name, d.env, where)
        if not _is_top_list(out):
            d.meet_list(_var(call.args[1]), out)
    else:
        raise UnsupportedConstruct(
            f"builtin {name!r} has no transfer", where)


def infer(prog: IRProgram) -> LanguageModel:
    """Solve the input hole. Pure: the same program always yields the same
    model. Raises UnsupportedConstruct when the program is not well-formed
    or UnsupportedConstraint when a demanded constraint has no transfer."""
    problems = well_formed(prog)
    if problems:
        raise UnsupportedConstruct(
            f"program is not well-formed: {problems[0].message}",
            problems[0].where, problems)

    shapes: dict[str, Shape] = {prog.param: Shape.STR}
    nodes = body_nodes(prog)
    for node in nodes:
        if isinstance(node, Let):
            arg_shapes = tuple(_arg_shape(a, shapes) for a in node.call.args)
            shapes[node.var] = models.result_shape(node.call.builtin,
                                                   arg_shapes)

    env = DefEnv()
    d = _Demands(env)
    diagnostics: list[Diagnostic] = []
    where = prog.prov
    try:
        for node in reversed(nodes):
            if isinstance(node, Accept):
                continue
            where = node.prov
            if isinstance(node, Assert):
                d.asserted.add(node.var)
                continue
            _apply(node, d, shapes)
        root = d.strs.get(prog.param, ANY_STRING)
    except Contradiction as exc:
        diagnostics.append(Diagnostic(
            f"constraints are unsatisfiable: {exc}; the parser rejects "
            "every input", where))
        env = DefEnv()
        root = EMPTY

    defs = _prune(root, env.defs)
    provenance = {name: list(env.provenance.get(name, []) or [prog.prov])
                  for name in defs}
    solved = dataclasses.replace(prog, input_refinement=Solved(root))
    return LanguageModel(solved, root, defs, provenance, diagnostics)


def _prune(root: Lang, defs: dict[str, Lang]) -> dict[str, Lang]:
    """Definitions reachable from the root, in their insertion order."""
    reach = set(refs(root))
    stack = sorted(reach)
    while stack:
        for r in refs(defs[stack.pop()]):
            if r not in reach:
                reach.add(r)
                stack.append(r)
    return {name: body for name, body in defs.items() if name in reach}


# ---------------------------------------------------------------------------
# Grammar construction
# ---------------------------------------------------------------------------


def to_grammar(model: LanguageModel, style: str = "recursive") -> Grammar:
    """Name the model: start symbol = the parser's parameter, one production
    per sublanguage. `style` picks how a separated repetition at the root is
    rendered: "recursive" rewrites `elem (sep elem)*` to the right-recursive
    `s → elem | elem sep s`; "repetition" keeps the star."""
    if style not in ("recursive", "repetition"):
        raise ValueError(f"unknown grammar style {style!r}")
    start = model.param
    while start in model.defs:
        start += "_"
    productions: dict[str, Lang] = {start: model.root}
    if style == "recursive":
        taken = set(model.defs) | {start}
        productions.update(_rewrite_recursive(model.root, start, taken))
    productions.update(model.defs)
    root_span = [model.program.prov]
    provenance = {}
    for name in productions:
        provenance[name] = list(model.provenance.get(name, []) or root_span)
    return Grammar(start, productions, provenance)


def _split_shape(root: Lang) -> tuple[tuple[Lang, ...], Lang,
                                      tuple[Lang, ...]] | None:
    """Match `lead… (sep elem…)*` with a literal separator: the shape every
    split-style root has. Returns (lead, sep, elem) or None."""
    if not (isinstance(root, Concat) and len(root.items) >= 2):
        return None
    last = root.items[-1]
    if not (isinstance(last, Star) and isinstance(last.item, Concat)):
        return None
    inner = last.item.items
    if len(inner) < 2 or not isinstance(inner[0], Literal):
        return None
    return root.items[:-1], inner[0], inner[1:]


def _rewrite_recursive(root: Lang, start: str,
                       taken: set[str]) -> dict[str, Lang]:
    """Right-recursive replacements for the start production (and a helper
    nonterminal when the leading element differs from the repeated one)."""
    matched = _split_shape(root)
    if matched is None:
        return {}
    lead, sep, elem = matched
    if lead == elem:
        return {start: alt(cat(*lead), cat(*lead, sep, Ref(start)))}
    rest = "rest"
    while rest in taken:
        rest += "_"
    return {
        start: alt(cat(*lead), cat(*lead, sep, Ref(rest))),
        rest: alt(cat(*elem), cat(*elem, sep, Ref(rest))),
    }
