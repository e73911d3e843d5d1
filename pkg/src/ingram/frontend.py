"""Subject-language front end.

parse_source reads a small Python-like subset — one string-parameter
function (or bare module-level statements, which become an implicit parser
named `parse`) built from assignments, destructuring, asserts, returns, and
the whitelisted string operations split/int/map/len/strip/indexing/`==`.
Everything else is either opaque (arithmetic that merely consumes parsed
values) or rejected with a source span.

simplify lowers the subject AST to A-normal-form IR: every intermediate
value gets a let, destructuring becomes a length assert plus on-demand
index projections, and opaque code is dropped once we know no string
derived from the parameter flows into it.
"""

from __future__ import annotations

import ast as pyast
from dataclasses import dataclass

from .ir import (
    Accept,
    Arg,
    Assert,
    FnArg,
    Hole,
    IntArg,
    IRCall,
    IRExpr,
    IRProgram,
    Let,
    Shape,
    StrArg,
    VarArg,
    parse_ir,
    pretty_print,
)
from .models import result_shape
from .source import Diagnostic, Provenance, UnsupportedConstruct

__all__ = [
    "SubjectAST", "FnDef", "parse_source", "simplify", "parse_ir",
    "pretty_print",
]


# ---------------------------------------------------------------------------
# Subject AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EVar:
    name: str
    prov: Provenance


@dataclass(frozen=True)
class EStr:
    value: str
    prov: Provenance


@dataclass(frozen=True)
class EInt:
    value: int
    prov: Provenance


@dataclass(frozen=True)
class EFn:
    """A whitelisted function used as a value (map's first argument)."""

    name: str  # "int" | "strip"
    prov: Provenance


@dataclass(frozen=True)
class ECall:
    """Whitelisted call: split/strip carry the receiver as args[0]."""

    fn: str  # "split" | "strip" | "int" | "len" | "map"
    args: tuple["Expr", ...]
    prov: Provenance


@dataclass(frozen=True)
class EIndex:
    seq: "Expr"
    index: int
    prov: Provenance


@dataclass(frozen=True)
class ECompare:
    left: "Expr"
    right: "Expr"
    prov: Provenance


@dataclass(frozen=True)
class EOpaque:
    """An expression we do not model; `reads` are the variable names it
    observes, used to prove it cannot influence parsing."""

    reads: tuple[str, ...]
    prov: Provenance


Expr = EVar | EStr | EInt | EFn | ECall | EIndex | ECompare | EOpaque


@dataclass(frozen=True)
class SAssign:
    targets: tuple[str, ...]
    pattern: bool  # True for [x, y] = … destructuring
    value: Expr
    prov: Provenance


@dataclass(frozen=True)
class SExpr:
    value: Expr
    prov: Provenance


@dataclass(frozen=True)
class SAssert:
    test: Expr
    prov: Provenance


@dataclass(frozen=True)
class SReturn:
    value: Expr | None
    prov: Provenance


Stmt = SAssign | SExpr | SAssert | SReturn


@dataclass(frozen=True)
class FnDef:
    name: str
    param: str
    body: tuple[Stmt, ...]
    prov: Provenance


@dataclass(frozen=True)
class SubjectAST:
    items: tuple[FnDef, ...]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _prov(node: pyast.AST, filename: str) -> Provenance:
    line = getattr(node, "lineno", 1)
    col = getattr(node, "col_offset", 0) + 1
    end_line = getattr(node, "end_lineno", line)
    end_col = getattr(node, "end_col_offset", col)
    length = end_col - col + 1 if end_line == line else 1
    return Provenance(filename, line, col, max(1, length))


def _reads(node: pyast.AST) -> tuple[str, ...]:
    names = {n.id for n in pyast.walk(node)
             if isinstance(n, pyast.Name) and isinstance(n.ctx, pyast.Load)}
    return tuple(sorted(names))


def _unsupported(msg: str, node: pyast.AST, filename: str) -> UnsupportedConstruct:
    where = _prov(node, filename)
    return UnsupportedConstruct(msg, where)


class _SourceParser:
    def __init__(self, filename: str, param: str | None):
        self.filename = filename
        self.param = param  # known inside a def; None for implicit parsers

    def prov(self, node: pyast.AST) -> Provenance:
        return _prov(node, self.filename)

    # -- expressions --------------------------------------------------------

    def expr(self, node: pyast.expr) -> Expr:
        if isinstance(node, pyast.Name):
            return EVar(node.id, self.prov(node))
        if isinstance(node, pyast.Constant):
            # bools are ints in the host; treat them as opaque, not counts
            if isinstance(node.value, str):
                return EStr(node.value, self.prov(node))
            if isinstance(node.value, int) and not isinstance(node.value, bool):
                return EInt(node.value, self.prov(node))
            return EOpaque((), self.prov(node))
        if isinstance(node, pyast.Call):
            return self.call(node)
        if isinstance(node, pyast.Subscript):
            return self.subscript(node)
        if isinstance(node, pyast.Compare):
            if (len(node.ops) == 1 and isinstance(node.ops[0], pyast.Eq)):
                return ECompare(self.expr(node.left),
                                self.expr(node.comparators[0]),
                                self.prov(node))
            return self.opaque(node)
        return self.opaque(node)

    def opaque(self, node: pyast.expr) -> EOpaque:
        return EOpaque(_reads(node), self.prov(node))

    def call(self, node: pyast.Call) -> Expr:
        if node.keywords:
            return self.unknown_call(node)
        fn = node.func
        args = node.args
        if isinstance(fn, pyast.Attribute):
            if fn.attr == "split" and len(args) == 1:
                sep = args[0]
                if isinstance(sep, pyast.Constant) and isinstance(sep.value, str):
                    if not sep.value:
                        raise _unsupported("split separator must be non-empty",
                                           sep, self.filename)
                    return ECall("split",
                                 (self.expr(fn.value),
                                  EStr(sep.value, self.prov(sep))),
                                 self.prov(node))
                raise _unsupported("split wants a string literal separator",
                                   sep, self.filename)
            if fn.attr == "strip" and not args:
                return ECall("strip", (self.expr(fn.value),), self.prov(node))
            return self.unknown_call(node)
        if not isinstance(fn, pyast.Name):
            return self.unknown_call(node)
        if fn.id in ("int", "len") and len(args) == 1:
            return ECall(fn.id, (self.expr(args[0]),), self.prov(node))
        if fn.id == "map" and len(args) == 2:
            mapped = self.map_fn(args[0])
            if mapped is None:
                raise _unsupported(
                    "map supports int and str.strip", args[0], self.filename)
            return ECall("map", (mapped, self.expr(args[1])), self.prov(node))
        return self.unknown_call(node)

    def map_fn(self, node: pyast.expr) -> EFn | None:
        if isinstance(node, pyast.Name) and node.id == "int":
            return EFn("int", self.prov(node))
        if (isinstance(node, pyast.Attribute) and node.attr == "strip"
                and isinstance(node.value, pyast.Name)
                and node.value.id == "str"):
            return EFn("strip", self.prov(node))
        return None

    def unknown_call(self, node: pyast.Call) -> EOpaque:
        # param flowing into a call we cannot model is a hard error;
        # anything else is opaque and may be dropped later
        if self.param is not None and self.param in _reads(node):
            raise _unsupported(
                f"unsupported call consumes the parameter {self.param!r}",
                node, self.filename)
        return EOpaque(_reads(node), self.prov(node))

    def subscript(self, node: pyast.Subscript) -> Expr:
        index = node.slice
        if (isinstance(index, pyast.Constant)
                and isinstance(index.value, int)
                and not isinstance(index.value, bool)
                and index.value >= 0):
            return EIndex(self.expr(node.value), index.value, self.prov(node))
        return self.opaque(node)

    # -- statements ---------------------------------------------------------

    def stmt(self, node: pyast.stmt) -> Stmt | None:
        if isinstance(node, pyast.Assign):
            if len(node.targets) != 1:
                raise _unsupported("chained assignment is not supported",
                                   node, self.filename)
            return self.assign(node.targets[0], node.value, node)
        if isinstance(node, pyast.AnnAssign):
            if node.value is None:
                raise _unsupported("annotation without a value", node,
                                   self.filename)
            return self.assign(node.target, node.value, node)
        if isinstance(node, pyast.Assert):
            return SAssert(self.expr(node.test), self.prov(node))
        if isinstance(node, pyast.Return):
            value = None if node.value is None else self.expr(node.value)
            return SReturn(value, self.prov(node))
        if isinstance(node, pyast.Expr):
            if isinstance(node.value, pyast.Constant):
                return None  # docstrings and stray literals
            return SExpr(self.expr(node.value), self.prov(node))
        if isinstance(node, pyast.Pass):
            return None
        raise _unsupported(
            f"unsupported statement {type(node).__name__}", node, self.filename)

    def assign(self, target: pyast.expr, value: pyast.expr,
               node: pyast.stmt) -> SAssign:
        if isinstance(target, pyast.Name):
            return SAssign((target.id,), False, self.expr(value),
                           self.prov(node))
        if isinstance(target, (pyast.List, pyast.Tuple)):
            names = []
            for elt in target.elts:
                if not isinstance(elt, pyast.Name):
                    raise _unsupported("destructuring supports plain names "
                                       "only", elt, self.filename)
                names.append(elt.id)
            if not names:
                raise _unsupported("empty destructuring pattern", target,
                                   self.filename)
            return SAssign(tuple(names), True, self.expr(value),
                           self.prov(node))
        raise _unsupported("unsupported assignment target", target,
                           self.filename)


def _fn_def(node: pyast.FunctionDef, filename: str) -> FnDef:
    a = node.args
    if (a.posonlyargs or a.kwonlyargs or a.vararg or a.kwarg
            or a.defaults or a.kw_defaults or len(a.args) != 1):
        raise _unsupported("parsers take exactly one plain parameter",
                           node, filename)
    if node.decorator_list:
        raise _unsupported("decorators are not supported",
                           node.decorator_list[0], filename)
    param = a.args[0].arg
    parser = _SourceParser(filename, param)
    body = [s for s in (parser.stmt(n) for n in node.body) if s is not None]
    return FnDef(node.name, param, tuple(body), _prov(node, filename))


def _implicit_fn(stmts: list[pyast.stmt], filename: str) -> FnDef:
    """Bare module-level statements become `def parse(<free var>)`."""
    parser = _SourceParser(filename, None)
    body = [s for s in (parser.stmt(n) for n in stmts) if s is not None]
    stores: set[str] = set()
    for s in body:
        if isinstance(s, SAssign):
            stores.update(s.targets)
    free: list[str] = []
    for s in body:
        for e in _walk_exprs(s):
            names = e.reads if isinstance(e, EOpaque) else (
                (e.name,) if isinstance(e, EVar) else ())
            for n in names:
                if n not in stores and n not in free:
                    free.append(n)
    if len(free) != 1:
        raise UnsupportedConstruct(
            "cannot determine the input parameter: expected exactly one "
            f"free variable, found {free if free else 'none'}",
            _prov(stmts[0], filename))
    return FnDef("parse", free[0], tuple(body), _prov(stmts[0], filename))


def _walk_exprs(s: Stmt):
    roots = []
    if isinstance(s, SAssign):
        roots = [s.value]
    elif isinstance(s, SExpr):
        roots = [s.value]
    elif isinstance(s, SAssert):
        roots = [s.test]
    elif isinstance(s, SReturn) and s.value is not None:
        roots = [s.value]
    while roots:
        e = roots.pop(0)
        yield e
        if isinstance(e, ECall):
            roots.extend(e.args)
        elif isinstance(e, EIndex):
            roots.append(e.seq)
        elif isinstance(e, ECompare):
            roots.extend((e.left, e.right))


def parse_source(text: str, filename: str = "<subject>") -> SubjectAST:
    """Subject AST from source text. Raises SyntaxError on malformed input
    and UnsupportedConstruct on host syntax outside the subset."""
    tree = pyast.parse(text, filename)
    defs = [n for n in tree.body if isinstance(n, pyast.FunctionDef)]
    rest = [n for n in tree.body
            if not isinstance(n, pyast.FunctionDef)
            and not (isinstance(n, pyast.Expr)
                     and isinstance(n.value, pyast.Constant))]
    if defs and rest:
        raise _unsupported(
            "mix of function definitions and module-level statements",
            rest[0], filename)
    if defs:
        return SubjectAST(tuple(_fn_def(d, filename) for d in defs))
    if rest:
        return SubjectAST((_implicit_fn(rest, filename),))
    return SubjectAST(())


# ---------------------------------------------------------------------------
# Lowering to IR
# ---------------------------------------------------------------------------

_OPAQUE = object()  # atom sentinel for values we dropped

_FN_BUILTIN = {"int": "int_py", "strip": "strip_py"}
_STRINGY = (Shape.STR, Shape.STR_LIST)


class _Lowerer:
    def __init__(self, fn: FnDef):
        self.fn = fn
        self.chain: list[tuple[str, IRCall | None, Provenance]] = []
        self.env: dict[str, object] = {fn.param: VarArg(fn.param)}
        self.shapes: dict[str, Shape] = {fn.param: Shape.STR}
        self.user_names = {fn.param}
        for s in fn.body:
            if isinstance(s, SAssign):
                self.user_names.update(s.targets)
        self.counter = 0
        # destructured names not yet projected: name -> (list var, position)
        self.pending: dict[str, tuple[str, int]] = {}

    def fresh(self) -> str:
        self.counter += 1
        name = f"v{self.counter}"
        while name in self.user_names:
            self.counter += 1
            name = f"v{self.counter}"
        return name

    def bind(self, name: str, call: IRCall, prov: Provenance) -> VarArg:
        self.chain.append((name, call, prov))
        arg_shapes = tuple(self.arg_shape(a) for a in call.args)
        self.shapes[name] = result_shape(call.builtin, arg_shapes)
        self.env[name] = VarArg(name)
        return VarArg(name)

    def arg_shape(self, arg: Arg) -> Shape:
        if isinstance(arg, VarArg):
            return self.shapes[arg.name]
        if isinstance(arg, StrArg):
            return Shape.STR
        if isinstance(arg, IntArg):
            return Shape.INT
        return result_shape(arg.name, ())

    def shape_of(self, atom: object) -> Shape | None:
        if isinstance(atom, VarArg):
            return self.shapes[atom.name]
        if isinstance(atom, StrArg):
            return Shape.STR
        if isinstance(atom, IntArg):
            return Shape.INT
        return None

    # -- expressions --------------------------------------------------------

    def atom(self, e: Expr, into: str | None = None) -> object:
        """Lower an expression to an atom, emitting lets for every call.
        `into` names the binding when the expression is an assignment's
        right-hand side (so user names land on their own calls)."""
        if isinstance(e, EVar):
            name = e.name
            if name in self.pending:
                self.project(name, e.prov)
            if name not in self.env:
                raise UnsupportedConstruct(
                    f"unbound variable {name!r}", e.prov)
            return self.env[name]
        if isinstance(e, EStr):
            return StrArg(e.value)
        if isinstance(e, EInt):
            return IntArg(e.value)
        if isinstance(e, EOpaque):
            self.check_opaque(e)
            return _OPAQUE
        if isinstance(e, ECompare):
            left = self.require(self.atom(e.left), Shape.INT, e.prov,
                                "== compares integer values")
            right = self.require(self.atom(e.right), Shape.INT, e.prov,
                                 "== compares integer values")
            # literal-first, the way destructuring length checks read
            if isinstance(right, IntArg) and not isinstance(left, IntArg):
                left, right = right, left
            call = IRCall("equals", (left, right), e.prov)
            return self.bind(into or self.fresh(), call, e.prov)
        if isinstance(e, EIndex):
            seq = self.atom(e.seq)
            seq = self.require(seq, (Shape.STR_LIST, Shape.INT_LIST), e.prov,
                               "indexing wants a list")
            call = IRCall("index", (seq, IntArg(e.index)), e.prov)
            return self.bind(into or self.fresh(), call, e.prov)
        if isinstance(e, EFn):
            raise UnsupportedConstruct(
                "function values only appear as map's first argument", e.prov)
        assert isinstance(e, ECall)
        return self.lower_call(e, into)

    def lower_call(self, e: ECall, into: str | None) -> VarArg:
        if e.fn == "split":
            recv = self.require(self.atom(e.args[0]), Shape.STR, e.prov,
                                "split works on strings")
            sep = e.args[1]
            assert isinstance(sep, EStr)
            call = IRCall("split_py", (StrArg(sep.value), recv), e.prov)
        elif e.fn == "strip":
            recv = self.require(self.atom(e.args[0]), Shape.STR, e.prov,
                                "strip works on strings")
            call = IRCall("strip_py", (recv,), e.prov)
        elif e.fn == "int":
            arg = self.require(self.atom(e.args[0]), Shape.STR, e.prov,
                               "int parses a string here")
            call = IRCall("int_py", (arg,), e.prov)
        elif e.fn == "len":
            arg = self.require(self.atom(e.args[0]),
                               (Shape.STR_LIST, Shape.INT_LIST), e.prov,
                               "len wants a list")
            call = IRCall("len", (arg,), e.prov)
        else:
            assert e.fn == "map"
            fn_arg = e.args[0]
            assert isinstance(fn_arg, EFn)
            xs = self.require(self.atom(e.args[1]), Shape.STR_LIST, e.prov,
                              "map wants the result of a split")
            call = IRCall("map", (FnArg(_FN_BUILTIN[fn_arg.name]), xs),
                          e.prov)
        return self.bind(into or self.fresh(), call, e.prov)

    def require(self, atom: object, shapes, where: Provenance,
                why: str) -> Arg:
        if atom is _OPAQUE:
            raise UnsupportedConstruct(
                "an unmodeled value flows into a string operation", where)
        wanted = shapes if isinstance(shapes, tuple) else (shapes,)
        got = self.shape_of(atom)
        if got not in wanted:
            raise UnsupportedConstruct(
                f"{why} (got {got.value if got else 'nothing'})", where)
        return atom

    def check_opaque(self, e: EOpaque) -> None:
        for name in e.reads:
            if name in self.pending:
                owner, _ = self.pending[name]
                if self.shapes[owner] is Shape.STR_LIST:
                    self.project(name, e.prov)
            atom = self.env.get(name)
            if isinstance(atom, VarArg) and (
                    self.shapes[atom.name] in _STRINGY):
                raise UnsupportedConstruct(
                    f"unmodeled code reads the string value {name!r} derived "
                    "from the input", e.prov)

    def project(self, name: str, where: Provenance) -> None:
        """Emit the index projection for a destructured name on first use."""
        owner, position = self.pending.pop(name)
        call = IRCall("index", (VarArg(owner), IntArg(position)), where)
        self.bind(name, call, where)

    # -- statements ---------------------------------------------------------

    def run(self) -> IRProgram:
        for s in self.fn.body:
            if isinstance(s, SAssign):
                self.lower_assign(s)
            elif isinstance(s, SExpr):
                self.atom(s.value)
            elif isinstance(s, SAssert):
                self.lower_assert(s)
            else:
                assert isinstance(s, SReturn)
                if s.value is not None:
                    self.atom(s.value)
                break  # nothing after a return ever runs
        body: IRExpr = Accept(self.fn.prov)
        for name, call, prov in reversed(self.chain):
            if call is None:
                body = Assert(name, body, prov)
            else:
                body = Let(name, call, body, prov)
        return IRProgram(self.fn.name, self.fn.param, Hole(), body,
                         self.fn.prov)

    def claim(self, name: str, where: Provenance) -> None:
        if name in self.env or name in self.pending:
            raise UnsupportedConstruct(
                f"{name!r} is assigned more than once", where)

    def lower_assign(self, s: SAssign) -> None:
        if not s.pattern:
            name = s.targets[0]
            self.claim(name, s.prov)
            atom = self.atom(s.value, into=name)
            if isinstance(atom, VarArg) and atom.name == name:
                return  # the call bound the user name directly
            self.env[name] = atom
        else:
            for name in s.targets:
                self.claim(name, s.prov)
            value = self.atom(s.value)
            value = self.require(value, (Shape.STR_LIST, Shape.INT_LIST),
                                 s.prov, "destructuring wants a list")
            assert isinstance(value, VarArg)
            count = self.bind(self.fresh(), IRCall("len", (value,), s.prov),
                              s.prov)
            check = self.bind(
                self.fresh(),
                IRCall("equals", (IntArg(len(s.targets)), count), s.prov),
                s.prov)
            self.chain.append((check.name, None, s.prov))  # assert
            for position, name in enumerate(s.targets):
                self.pending[name] = (value.name, position)

    def lower_assert(self, s: SAssert) -> None:
        test = self.atom(s.test)
        if test is _OPAQUE:
            raise UnsupportedConstruct(
                "assert on a condition the model cannot express", s.prov)
        if not isinstance(test, VarArg) or self.shapes[test.name] is not Shape.BOOL:
            raise UnsupportedConstruct(
                "assert wants an == comparison", s.prov)
        self.chain.append((test.name, None, s.prov))


def simplify(subject: SubjectAST) -> IRProgram:
    """Lower the single parser in `subject` to IR. Every emitted node
    carries provenance; code with no path to a reject is dropped."""
    if not subject.items:
        raise UnsupportedConstruct("no parser function found")
    if len(subject.items) > 1:
        raise UnsupportedConstruct(
            f"expected one parser, found {len(subject.items)}",
            subject.items[1].prov)
    return _Lowerer(subject.items[0]).run()
