"""Command-line interface: infer, check, fuzz, diff, and corpus.

Exit codes are a stable contract: 0 success, 1 semantic finding
(diagnostics, rejection, inequivalence, failed corpus check), 2 usage or
syntax error, 3 soundness violation (grammar and parser disagree).
"""

from __future__ import annotations

import argparse
import itertools
import json
import pathlib
import random
import sys

from .ebnf import SPACE_GLYPH, parse_ebnf, to_ebnf
from .frontend import parse_source, simplify
from .grammar import (Grammar, compile_dfa, equivalent, generate, member,
                      to_json, to_regex)
from .infer import infer, to_grammar
from .interp import Accept, accepts, run
from .ir import IRProgram, parse_ir
from .lang import CharClass, Literal, walk
from .models import ArgSpec, list_builtins
from .railroad import to_railroad_svg
from .source import EmptyLanguage, ToolError, UnsupportedConstruct


class UsageError(Exception):
    """A bad invocation that argparse itself cannot catch."""


# ---------------------------------------------------------------- escaping

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n",
            "\r": "\\r", "\v": "\\v", "\f": "\\f"}
_UNESCAPES = {esc[1]: raw for raw, esc in _ESCAPES.items()}


def escape_line(text: str) -> str:
    """Encode an ASCII string as one visible line.

    Space becomes the visible glyph, named controls and the backslash get
    backslash escapes, remaining controls become \\xNN. The result contains
    no raw whitespace, so it survives line-oriented transport and diffing.
    """
    out = []
    for c in text:
        if c in _ESCAPES:
            out.append(_ESCAPES[c])
        elif c == " ":
            out.append(SPACE_GLYPH)
        elif "!" <= c <= "~":
            out.append(c)
        elif ord(c) < 0x80:
            out.append(f"\\x{ord(c):02x}")
        else:
            raise ValueError(f"non-ASCII character {c!r}")
    return "".join(out)


def unescape_line(text: str) -> str:
    """Invert escape_line. Raises ValueError on malformed input.

    Raw spaces are rejected too: an encoded line must use the glyph, which
    keeps trailing whitespace visible in fixtures.
    """
    out: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == SPACE_GLYPH:
            out.append(" ")
            i += 1
        elif c == "\\":
            if i + 1 >= len(text):
                raise ValueError("dangling backslash")
            e = text[i + 1]
            if e in _UNESCAPES:
                out.append(_UNESCAPES[e])
                i += 2
            elif e == "x":
                digits = text[i + 2:i + 4]
                if len(digits) != 2:
                    raise ValueError("\\x needs two hex digits")
                try:
                    code = int(digits, 16)
                except ValueError:
                    raise ValueError(f"bad hex escape \\x{digits}") from None
                if code >= 0x80:
                    raise ValueError(f"non-ASCII escape \\x{digits}")
                out.append(chr(code))
                i += 4
            else:
                raise ValueError(f"unknown escape \\{e}")
        elif "!" <= c <= "~":
            out.append(c)
            i += 1
        elif c == " ":
            raise ValueError(f"raw space at position {i}; use {SPACE_GLYPH}")
        else:
            raise ValueError(f"unescapable character {c!r}")
    return "".join(out)


# ------------------------------------------------------------------ loading

def _syntax_error(path: str, message: str) -> SyntaxError:
    err = SyntaxError(message)
    err.filename, err.lineno, err.offset = path, 1, 1
    return err


def _load_program(path: str) -> IRProgram:
    p = pathlib.Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".pir":
        return parse_ir(text, path)
    if p.suffix == ".mpy":
        subject = parse_source(text, path)
        if not subject.items:
            raise _syntax_error(path, "no parser code found")
        return simplify(subject)
    raise UsageError(f"{path}: expected a .mpy or .pir file")


def _load_grammar(path: str) -> Grammar:
    """A diff operand: a grammar file, or a program to infer one from."""
    if path.endswith(".ebnf"):
        text = pathlib.Path(path).read_text(encoding="utf-8")
        return parse_ebnf(text, path)
    return to_grammar(infer(_load_program(path)))


def _parse_seed(text: str) -> int:
    if text == "random":
        seed = random.SystemRandom().getrandbits(32)
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    try:
        return int(text)
    except ValueError:
        raise UsageError("--seed expects an integer or 'random'") from None


# ----------------------------------------------------------------- commands

def _render(g: Grammar, fmt: str) -> str:
    if fmt == "ebnf":
        return to_ebnf(g)
    if fmt == "regex":
        return to_regex(g) + "\n"
    if fmt == "json":
        return json.dumps(to_json(g), indent=2) + "\n"
    return to_railroad_svg(g)


def _spec_text(spec: ArgSpec) -> str:
    parts = sorted(s.value for s in spec.shapes)
    if spec.str_lit:
        parts.append("str-literal")
    if spec.int_lit:
        parts.append("int-literal")
    if spec.fn:
        parts.append("builtin")
    return "|".join(parts) or "?"


def cmd_infer(args: argparse.Namespace) -> int:
    if args.list_builtins:
        for m in list_builtins():
            params = ", ".join(_spec_text(s) for s in m.signature.params)
            print(f"{m.name}({params})")
            print(f"    {m.summary}")
        return 0
    if args.file is None:
        raise UsageError("infer: a file argument is required")
    prog = _load_program(args.file)
    model = infer(prog)
    g = to_grammar(model, style=args.style)
    text = _render(g, args.format)
    if args.output:
        pathlib.Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for d in model.diagnostics:
        print(f"{d.where}: warning: {d.message}", file=sys.stderr)
    return 1 if model.diagnostics else 0


def cmd_check(args: argparse.Namespace) -> int:
    prog = _load_program(args.file)
    if args.grammar:
        text = pathlib.Path(args.grammar).read_text(encoding="utf-8")
        g = parse_ebnf(text, args.grammar)
    else:
        g = to_grammar(infer(prog))
    if args.stdin:
        data = sys.stdin.read()
        if data.endswith("\n"):
            data = data[:-1]
        try:
            word = unescape_line(data)
        except ValueError as e:
            raise UsageError(f"stdin: {e}") from None
    else:
        word = args.input
        if any(ord(c) >= 0x80 for c in word):
            raise UsageError("--input must be ASCII")
    in_grammar = member(compile_dfa(g), word)
    verdict = run(prog, word)
    in_parser = isinstance(verdict, Accept)
    print(f"grammar: {'accept' if in_grammar else 'reject'}")
    if in_parser:
        print("parser:  accept")
    else:
        print(f"parser:  reject ({verdict.where}: {verdict.message})")
    print("AGREE" if in_grammar == in_parser else "DISAGREE")
    if in_grammar and in_parser:
        return 0
    if not in_grammar and not in_parser:
        return 1
    print("soundness violation: grammar and parser disagree", file=sys.stderr)
    return 3


def cmd_fuzz(args: argparse.Namespace) -> int:
    if args.n < 0:
        raise UsageError("-n must be non-negative")
    prog = _load_program(args.file)
    seed = _parse_seed(args.seed)
    # Star-based rendering so --max-rep bounds repetition directly.
    g = to_grammar(infer(prog), style="repetition")
    words = generate(g, seed=seed, max_rep=args.max_rep, count=args.n)
    for w in words:
        print(escape_line(w))
    if args.validate:
        for w in words:
            if not accepts(prog, w):
                print("soundness violation: parser rejects generated input: "
                      + (escape_line(w) or "(empty string)"), file=sys.stderr)
                return 3
    return 0


def cmd_diff(args: argparse.Namespace) -> int:
    ga = _load_grammar(args.file_a)
    gb = _load_grammar(args.file_b)
    eq, witness = equivalent(ga, gb)
    if eq:
        print("equivalent")
        return 0
    assert witness is not None
    side = args.file_a if member(compile_dfa(ga), witness) else args.file_b
    shown = escape_line(witness) or "(empty string)"
    print("not equivalent")
    print(f"witness: {shown} (accepted only by {side})")
    return 1


# ------------------------------------------------------------------- corpus

_CHECKS = ("infer", "equivalent", "truth", "soundness", "exhaustive")
_ALPHABET_TAG = "# alphabet:"


def _error_text(e: Exception) -> str:
    if isinstance(e, SyntaxError):
        where = f"{e.filename or '<input>'}:{e.lineno or 1}:{e.offset or 1}"
        return f"{where}: {e.msg}"
    return str(e)


def default_alphabet(g: Grammar) -> str:
    """A small test alphabet: every literal character, whole small classes,
    three representatives of large ones, plus one canary character the
    grammar never mentions."""
    chosen: set[str] = set()
    full: set[str] = set()
    for body in g.productions.values():
        for node in walk(body):
            if isinstance(node, Literal):
                chosen.update(node.text)
                full.update(node.text)
            elif isinstance(node, CharClass):
                cs = sorted(node.chars)
                full.update(cs)
                if len(cs) <= 4:
                    chosen.update(cs)
                else:
                    chosen.update((cs[0], cs[len(cs) // 2], cs[-1]))
    canary = next((c for c in "#@!~%" if c not in full),
                  next((chr(o) for o in range(33, 127)
                        if chr(o) not in full), ""))
    return "".join(sorted(chosen)) + canary


def max_len_within(alphabet_size: int, budget: int) -> int:
    """Largest n such that sum of alphabet_size**i for i <= n fits budget."""
    if alphabet_size == 0:
        return 0
    total, n = 1, 0
    while n < 32:
        step = alphabet_size ** (n + 1)
        if total + step > budget:
            break
        total += step
        n += 1
    return n


def all_strings(alphabet: str, max_len: int):
    letters = list(dict.fromkeys(alphabet))
    for k in range(max_len + 1):
        for tup in itertools.product(letters, repeat=k):
            yield "".join(tup)


def corpus_entry(path: pathlib.Path, budget: int, samples: int,
                 seed: int = 0) -> dict:
    """Run every corpus check for one program; returns the report entry."""
    name = path.stem
    entry: dict = {"name": name, "file": path.name,
                   "checks": dict.fromkeys(_CHECKS, False), "notes": []}
    checks, notes = entry["checks"], entry["notes"]

    try:
        prog = _load_program(str(path))
        model = infer(prog)
        g = to_grammar(model)
        g_rep = to_grammar(model, style="repetition")
    except (SyntaxError, ToolError) as e:
        notes.append(f"infer: {_error_text(e)}")
        return entry
    if model.diagnostics:
        notes.append(f"infer: {model.diagnostics[0]}")
        return entry
    checks["infer"] = True
    dfa = compile_dfa(g)

    expected = path.parent / f"{name}.expected.ebnf"
    if expected.exists():
        try:
            ref = parse_ebnf(expected.read_text(encoding="utf-8"),
                             str(expected))
            eq, witness = equivalent(g, ref)
            checks["equivalent"] = eq
            if not eq and witness is not None:
                side = "inferred" if member(dfa, witness) else "expected"
                notes.append(f"equivalent: {escape_line(witness) or '(empty)'}"
                             f" accepted only by the {side} grammar")
        except SyntaxError as e:
            notes.append(f"equivalent: {_error_text(e)}")
    else:
        notes.append(f"equivalent: missing {expected.name}")

    alphabet = None
    truth = path.parent / f"{name}.truth.tsv"
    if truth.exists():
        ok = True
        for lineno, raw in enumerate(
                truth.read_text(encoding="utf-8").splitlines(), 1):
            if raw.startswith(_ALPHABET_TAG):
                alphabet = unescape_line(raw[len(_ALPHABET_TAG):].strip())
                continue
            if not raw or raw.startswith("#"):
                continue
            encoded, _, want = raw.partition("\t")
            if want not in ("accept", "reject"):
                ok = False
                notes.append(f"truth:{lineno}: bad verdict {want!r}")
                continue
            try:
                word = unescape_line(encoded)
            except ValueError as e:
                ok = False
                notes.append(f"truth:{lineno}: {e}")
                continue
            expect = want == "accept"
            if accepts(prog, word) != expect:
                ok = False
                notes.append(f"truth:{lineno}: parser disagrees on {encoded}")
            if member(dfa, word) != expect:
                ok = False
                notes.append(f"truth:{lineno}: grammar disagrees on {encoded}")
        checks["truth"] = ok
    else:
        notes.append(f"truth: missing {truth.name}")

    try:
        sample = generate(g_rep, seed=seed, max_rep=8, count=samples)
    except EmptyLanguage:
        sample = []
    bad = next((w for w in sample if not accepts(prog, w)), None)
    checks["soundness"] = bad is None
    if bad is not None:
        notes.append(f"soundness: parser rejects generated "
                     f"{escape_line(bad) or '(empty)'}")

    if alphabet is None:
        alphabet = default_alphabet(g)
    depth = max_len_within(len(dict.fromkeys(alphabet)), budget)
    entry["alphabet"] = escape_line(alphabet)
    entry["max_len"] = depth
    mismatch = next((w for w in all_strings(alphabet, depth)
                     if member(dfa, w) != accepts(prog, w)), None)
    checks["exhaustive"] = mismatch is None
    if mismatch is not None:
        notes.append(f"exhaustive: grammar and parser disagree on "
                     f"{escape_line(mismatch) or '(empty)'}")
    return entry


def cmd_corpus(args: argparse.Namespace) -> int:
    root = pathlib.Path(args.dir)
    if not root.is_dir():
        raise UsageError(f"{args.dir}: not a directory")
    if not 1 <= args.budget <= 10 ** 7:
        raise UsageError("--budget must be between 1 and 10^7")
    programs = sorted((p for p in root.iterdir()
                       if p.suffix in (".mpy", ".pir")),
                      key=lambda p: (p.stem, p.suffix))
    entries = [corpus_entry(p, budget=args.budget, samples=args.fuzz,
                            seed=args.seed) for p in programs]
    passed = all(all(e["checks"].values()) for e in entries)
    report = {"budget": args.budget, "samples": args.fuzz,
              "entries": entries, "passed": passed}
    if args.report == "json":
        print(json.dumps(report, indent=2))
    else:
        for e in entries:
            failing = [k for k, v in e["checks"].items() if not v]
            status = "ok" if not failing else "FAIL " + ",".join(failing)
            print(f"{e['name']}: {status}")
            for note in e["notes"]:
                print(f"    {note}")
        print(f"{len(entries)} entries, "
              f"{sum(1 for e in entries if not all(e['checks'].values()))}"
              " failing")
    return 0 if passed else 1


# -------------------------------------------------------------- entry point

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ingram",
        description="Infer the input grammar of an ad hoc string parser.")
    sub = p.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("infer", help="infer a grammar and render it")
    pi.add_argument("file", nargs="?", help=".mpy source or .pir program")
    pi.add_argument("--format", choices=("ebnf", "regex", "json", "railroad"),
                    default="ebnf")
    pi.add_argument("--style", choices=("recursive", "repetition"),
                    default="recursive")
    pi.add_argument("-o", "--output", metavar="FILE")
    pi.add_argument("--list-builtins", action="store_true",
                    help="list the modeled builtins and exit")
    pi.set_defaults(func=cmd_infer)

    pc = sub.add_parser("check", help="test one input against grammar and parser")
    pc.add_argument("file")
    which = pc.add_mutually_exclusive_group(required=True)
    which.add_argument("--input", metavar="STRING", help="the input, verbatim")
    which.add_argument("--stdin", action="store_true",
                       help="read one escaped line from stdin")
    pc.add_argument("--grammar", metavar="FILE",
                    help="check against this EBNF grammar instead of inferring")
    pc.set_defaults(func=cmd_check)

    pf = sub.add_parser("fuzz", help="generate sentences of the inferred grammar")
    pf.add_argument("file")
    pf.add_argument("-n", type=int, default=10, help="how many (default 10)")
    pf.add_argument("--seed", default="0", help="integer or 'random'")
    pf.add_argument("--max-rep", type=int, default=8)
    pf.add_argument("--validate", action="store_true",
                    help="run each output through the parser")
    pf.set_defaults(func=cmd_fuzz)

    pd = sub.add_parser("diff", help="compare two programs or grammars")
    pd.add_argument("file_a", metavar="A", help=".mpy, .pir or .ebnf")
    pd.add_argument("file_b", metavar="B", help=".mpy, .pir or .ebnf")
    pd.set_defaults(func=cmd_diff)

    pk = sub.add_parser("corpus", help="run every check over a corpus directory")
    pk.add_argument("dir")
    pk.add_argument("--report", choices=("json",),
                    help="emit a machine-readable report")
    pk.add_argument("--budget", type=int, default=250_000,
                    help="exhaustive-check string budget per entry")
    pk.add_argument("--fuzz", type=int, default=100, metavar="N",
                    help="generated strings per entry (default 100)")
    pk.add_argument("--seed", type=int, default=0)
    pk.set_defaults(func=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:  # argparse exits on usage errors and --help
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SyntaxError as e:
        print(f"{_error_text(e)}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UnsupportedConstruct as e:
        for d in e.diagnostics:
            print(f"{d.where}: error: {d.message}", file=sys.stderr)
        return 1
    except ToolError as e:
        print(f"{e.where}: error: {e.args[0]}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
