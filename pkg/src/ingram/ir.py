"""The parsing IR: a tiny A-normal-form let-language over string builtins.

A program is one function of one string parameter whose refinement starts as
an unsolved hole. The body is a let-chain of builtin calls ending in `accept`;
`assert` gates the path on a boolean variable. Concrete syntax (`.pir`):

    let parse = fun(s : *) {
      let v1 = split_py(",", s)
      let xs = map(int_py, v1)
      let v2 = len(xs)
      let v3 = equals(3, v2)
      assert v3
      accept
    }

Equality on IR nodes ignores provenance, so parse_ir(pretty_print(p)) == p.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Union as TyUnion

from .lang import Lang
from .source import Diagnostic, IRSyntaxError, Provenance, SYNTHETIC


class Shape(enum.Enum):
    """Value shapes: the IR types strings, the two list kinds produced by
    split/map, ints, and booleans. Nothing else exists at runtime."""

    STR = "str"
    STR_LIST = "str_list"
    INT_LIST = "int_list"
    INT = "int"
    BOOL = "bool"


# --- refinements -----------------------------------------------------------


@dataclass(frozen=True)
class Hole:
    """The unsolved input refinement; the only form concrete syntax carries."""


@dataclass(frozen=True)
class Solved:
    """A refinement filled in by inference with the input language."""

    lang: Lang


Refinement = TyUnion[Hole, Solved]


# --- call arguments ---------------------------------------------------------


@dataclass(frozen=True)
class VarArg:
    name: str


@dataclass(frozen=True)
class StrArg:
    value: str


@dataclass(frozen=True)
class IntArg:
    value: int


@dataclass(frozen=True)
class FnArg:
    """A builtin passed by name; only `map` takes one."""

    name: str


Arg = TyUnion[VarArg, StrArg, IntArg, FnArg]


@dataclass(frozen=True)
class IRCall:
    builtin: str
    args: tuple[Arg, ...]
    prov: Provenance = field(default=SYNTHETIC, compare=False)


# --- body chain --------------------------------------------------------------


@dataclass(frozen=True)
class Let:
    var: str
    call: IRCall
    body: "IRExpr"
    prov: Provenance = field(default=SYNTHETIC, compare=False)


@dataclass(frozen=True)
class Assert:
    var: str
    body: "IRExpr"
    prov: Provenance = field(default=SYNTHETIC, compare=False)


@dataclass(frozen=True)
class Accept:
    prov: Provenance = field(default=SYNTHETIC, compare=False)


IRExpr = TyUnion[Let, Assert, Accept]


@dataclass(frozen=True)
class IRProgram:
    name: str
    param: str
    input_refinement: Refinement
    body: IRExpr
    prov: Provenance = field(default=SYNTHETIC, compare=False)


def body_nodes(prog: IRProgram) -> list[IRExpr]:
    """The body chain flattened in source order, `accept` included."""
    out: list[IRExpr] = []
    node: IRExpr = prog.body
    while isinstance(node, (Let, Assert)):
        out.append(node)
        node = node.body
    out.append(node)
    return out


# ---------------------------------------------------------------------------
# Well-formedness
# ---------------------------------------------------------------------------

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = frozenset({"let", "fun", "assert", "accept"})


def well_formed(prog: IRProgram) -> list[Diagnostic]:
    """Scoping, arity, and shape diagnostics; empty means the interpreter can
    only reject on data, never on structure."""
    from .models import REGISTRY, result_shape

    out: list[Diagnostic] = []
    env: dict[str, Shape] = {}

    def bindable(name: str, where: Provenance) -> bool:
        if not _IDENT_RE.match(name) or name in _KEYWORDS:
            out.append(Diagnostic(f"invalid identifier {name!r}", where))
            return False
        if name in REGISTRY:
            out.append(Diagnostic(f"{name!r} shadows a builtin", where))
            return False
        if name in env:
            out.append(Diagnostic(f"{name!r} is bound more than once", where))
            return False
        return True

    if bindable(prog.param, prog.prov):
        env[prog.param] = Shape.STR

    def check_call(call: IRCall) -> Shape | None:
        model = REGISTRY.get(call.builtin)
        if model is None:
            out.append(Diagnostic(f"unknown builtin {call.builtin!r}", call.prov))
            return None
        sig = model.signature
        if len(call.args) != len(sig.params):
            out.append(Diagnostic(
                f"{call.builtin} expects {len(sig.params)} argument(s), "
                f"got {len(call.args)}", call.prov))
            return None
        shapes: list[Shape] = []
        ok = True
        for pos, (arg, spec) in enumerate(zip(call.args, sig.params), start=1):
            if isinstance(arg, VarArg):
                got = env.get(arg.name)
                if got is None:
                    out.append(Diagnostic(
                        f"unbound variable {arg.name!r}", call.prov))
                    ok = False
                    continue
                if got not in spec.shapes:
                    out.append(Diagnostic(
                        f"argument {pos} of {call.builtin} has shape "
                        f"{got.value}, expected one of "
                        f"{sorted(s.value for s in spec.shapes)}", call.prov))
                    ok = False
                    continue
                shapes.append(got)
            elif isinstance(arg, StrArg):
                if not spec.str_lit:
                    out.append(Diagnostic(
                        f"argument {pos} of {call.builtin} does not take a "
                        "string literal", call.prov))
                    ok = False
                    continue
                shapes.append(Shape.STR)
            elif isinstance(arg, IntArg):
                if not spec.int_lit:
                    out.append(Diagnostic(
                        f"argument {pos} of {call.builtin} does not take an "
                        "integer literal", call.prov))
                    ok = False
                    continue
                shapes.append(Shape.INT)
            else:
                if not spec.fn:
                    out.append(Diagnostic(
                        f"argument {pos} of {call.builtin} does not take a "
                        "function", call.prov))
                    ok = False
                    continue
                fn = REGISTRY.get(arg.name)
                if fn is None or not fn.mappable:
                    out.append(Diagnostic(
                        f"{arg.name!r} is not a mappable builtin", call.prov))
                    ok = False
                    continue
                shapes.append(result_shape(arg.name, ()))
        if not ok:
            return None
        return result_shape(call.builtin, tuple(shapes))

    node: IRExpr = prog.body
    while True:
        if isinstance(node, Let):
            shape = check_call(node.call)
            if bindable(node.var, node.prov) and shape is not None:
                env[node.var] = shape
            node = node.body
        elif isinstance(node, Assert):
            got = env.get(node.var)
            if got is None:
                out.append(Diagnostic(f"unbound variable {node.var!r}", node.prov))
            elif got is not Shape.BOOL:
                out.append(Diagnostic(
                    f"assert needs a bool, {node.var!r} has shape {got.value}",
                    node.prov))
            node = node.body
        else:
            break
    return out


# ---------------------------------------------------------------------------
# Pretty-printing
# ---------------------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\t": "\\t", "\n": "\\n", "\r": "\\r",
            "\v": "\\v", "\f": "\\f"}


def escape_str(text: str) -> str:
    out = []
    for c in text:
        if c in _ESCAPES:
            out.append(_ESCAPES[c])
        elif " " <= c <= "~":
            out.append(c)
        else:
            out.append(f"\\x{ord(c):02x}")
    return "".join(out)


def _arg_text(arg: Arg) -> str:
    if isinstance(arg, VarArg):
        return arg.name
    if isinstance(arg, StrArg):
        return f'"{escape_str(arg.value)}"'
    if isinstance(arg, IntArg):
        return str(arg.value)
    return arg.name


def pretty_print(prog: IRProgram) -> str:
    """Canonical text; the refinement always prints as the hole `*`."""
    lines = [f"let {prog.name} = fun({prog.param} : *) {{"]
    node: IRExpr = prog.body
    while True:
        if isinstance(node, Let):
            args = ", ".join(_arg_text(a) for a in node.call.args)
            lines.append(f"  let {node.var} = {node.call.builtin}({args})")
            node = node.body
        elif isinstance(node, Assert):
            lines.append(f"  assert {node.var}")
            node = node.body
        else:
            lines.append("  accept")
            break
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r\n]+)
      | (?P<comment>\#[^\n]*)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<int>[0-9]+)
      | (?P<str>"(?:\\.|[^"\\\n])*")
      | (?P<punct>[=(){},:*])
    """,
    re.VERBOSE,
)

_UNESCAPES = {"\\": "\\", '"': '"', "t": "\t", "n": "\n", "r": "\r",
              "v": "\v", "f": "\f"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _err(filename: str, line: int, col: int, msg: str) -> IRSyntaxError:
    e = IRSyntaxError(msg)
    e.filename = filename
    e.lineno = line
    e.offset = col
    return e


def _lex(text: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _err(filename, line, col, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup or ""
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


def _unescape(tok: _Token, filename: str) -> str:
    raw = tok.text[1:-1]
    out: list[str] = []
    i = 0
    while i < len(raw):
        c = raw[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        esc = raw[i + 1]
        if esc in _UNESCAPES:
            out.append(_UNESCAPES[esc])
            i += 2
        elif esc == "x":
            if i + 4 > len(raw):
                raise _err(filename, tok.line, tok.col, "truncated \\x escape")
            try:
                out.append(chr(int(raw[i + 2:i + 4], 16)))
            except ValueError:
                raise _err(filename, tok.line, tok.col,
                           f"bad \\x escape {raw[i:i + 4]!r}") from None
            i += 4
        else:
            raise _err(filename, tok.line, tok.col, f"unknown escape \\{esc}")
    value = "".join(out)
    if any(ord(c) > 127 for c in value):
        raise _err(filename, tok.line, tok.col, "string literal is not ASCII")
    return value


class _Parser:
    def __init__(self, tokens: list[_Token], filename: str) -> None:
        self.tokens = tokens
        self.pos = 0
        self.filename = filename

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, msg: str) -> IRSyntaxError:
        tok = self.peek()
        shown = tok.text or "end of input"
        return _err(self.filename, tok.line, tok.col, f"{msg}, found {shown!r}")

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise self.fail(f"expected {text or kind}")
        return self.next()

    def prov(self, tok: _Token) -> Provenance:
        return Provenance(self.filename, tok.line, tok.col, max(1, len(tok.text)))

    def ident(self, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail(f"expected {what}")
        return self.next()

    def keyword(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise self.fail(f"expected {word!r}")
        return self.next()

    def program(self) -> IRProgram:
        first = self.keyword("let")
        name = self.ident("a parser name")
        self.expect("punct", "=")
        self.keyword("fun")
        self.expect("punct", "(")
        param = self.ident("a parameter name")
        if self.peek().text == ":":  # the refinement annotation is optional
            self.next()
            self.expect("punct", "*")
        self.expect("punct", ")")
        self.expect("punct", "{")
        body = self.body()
        self.expect("punct", "}")
        if self.peek().kind != "eof":
            raise self.fail("expected end of input")
        return IRProgram(name.text, param.text, Hole(), body, self.prov(first))

    def body(self) -> IRExpr:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail("expected let, assert, or accept")
        if tok.text == "let":
            self.next()
            var = self.ident("a variable name")
            self.expect("punct", "=")
            call = self.call()
            return Let(var.text, call, self.body(), self.prov(var))
        if tok.text == "assert":
            self.next()
            var = self.ident("a variable name")
            return Assert(var.text, self.body(), self.prov(var))
        if tok.text == "accept":
            self.next()
            return Accept(self.prov(tok))
        raise self.fail("expected let, assert, or accept")

    def call(self) -> IRCall:
        builtin = self.ident("a builtin name")
        self.expect("punct", "(")
        args: list[Arg] = []
        if self.peek().text != ")":
            while True:
                args.append(self.arg(builtin.text, len(args)))
                if self.peek().text != ",":
                    break
                self.next()
        self.expect("punct", ")")
        return IRCall(builtin.text, tuple(args), self.prov(builtin))

    def arg(self, builtin: str, position: int) -> Arg:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            # map is the only higher-order builtin; its first argument names
            # a function rather than a variable.
            if builtin == "map" and position == 0:
                return FnArg(tok.text)
            return VarArg(tok.text)
        if tok.kind == "int":
            self.next()
            return IntArg(int(tok.text))
        if tok.kind == "str":
            self.next()
            return StrArg(_unescape(tok, self.filename))
        raise self.fail("expected an argument")


def parse_ir(text: str, filename: str = "<ir>") -> IRProgram:
    """Parse `.pir` concrete syntax; raises IRSyntaxError with location."""
    parser = _Parser(_lex(text, filename), filename)
    return parser.program()
