#!/usr/bin/env python3
"""Regenerate the corpus ground-truth tables (*.truth.tsv).

Each corpus program is executed under real Python semantics and every
curated input is recorded as accept or reject. The toolkit's own
interpreter is deliberately not imported for the verdicts, so these
fixtures stay an independent oracle; only the line-escaping helper is
shared with the package.

Two deviations from plain `exec` of the file:
  * `map` is replaced by a strict version returning a list, matching the
    subject-language semantics (conversion errors surface at the call).
  * Bare-statement programs are wrapped in `def parse(s)` the same way
    the front end treats them.

Programs written directly in the IR (*.pir) have hand-written Python
twins below; keep them in sync with the fixture by eye, they are short.

Usage: python3 tools/record_truth.py [corpus-dir]
"""

import pathlib
import sys
import textwrap

from ingram.cli import escape_line

HERE = pathlib.Path(__file__).resolve().parent
DEFAULT_CORPUS = HERE.parent / "corpus"


def strict_map(fn, xs):
    return list(map(fn, xs))


def load_subject(path: pathlib.Path):
    """Compile a .mpy file into a callable parse function."""
    text = path.read_text(encoding="utf-8")
    ns = {"map": strict_map}
    if any(line.startswith("def ") for line in text.splitlines()):
        exec(compile(text, str(path), "exec"), ns)
        fns = [v for k, v in ns.items()
               if callable(v) and k not in ("map", "__builtins__")]
        assert len(fns) == 1, f"{path}: expected one function"
        return fns[0]
    wrapped = "def parse(s):\n" + textwrap.indent(text, "    ")
    exec(compile(wrapped, str(path), "exec"), ns)
    return ns["parse"]


def verdict(fn, text: str) -> bool:
    """True iff the parser accepts. Only the three rejection channels the
    subject language knows are caught; anything else is a recording bug."""
    try:
        fn(text)
    except (ValueError, IndexError, AssertionError):
        return False
    return True


# --- Python twins for the .pir entries ------------------------------------

def _int_list_ir(s):
    strict_map(int, s.split(","))


def _flags(s):
    xs = s.split(";")
    assert len(xs) == 4


def _trivial(s):
    pass


PIR_TWINS = {
    "int_list_ir": _int_list_ir,
    "flags": _flags,
    "trivial": _trivial,
}


# --- Curated inputs per entry ----------------------------------------------

INT_CASES = [
    "0", "7", "007", "+1", "-1", " 12 ", "\t7\r", "1_2", "12_304",
    "", "+", "-", "x", "12x", "1__2", "_1", "1_", "+ 1", "1 2", "+-1",
]

LIST_CASES = [
    "12,304", "+01_2,3_0_4 ", "", "0", "-3, 7", " 42 ", "1,2,3",
    "5,-0", "+,1", "1,,2", "0,", ",0", "9_", "  -  5", "1,x", "x",
]

INPUTS = {
    "int_list": LIST_CASES,
    "int_list_ir": LIST_CASES,
    "vector_length": [
        "1,2,3", "12,304,5", " 1 , 2 , 3 ", "+1,-2,3", "1_0,2,3",
        "0,0,0", "-1,-2,-3", "9,9,9 ", "", "1", "1,2", "1,2,3,4",
        "1,2,x", "1,,3", ",,", "  ", "1,2,3,", "x,2,3",
    ],
    "single_int": INT_CASES,
    "stripped_int": INT_CASES,
    "first_field": [
        "1", "1;rest", "1;", "12;a;b", " 7 ;x", "+3;??", "1;2;3",
        "5 ;ok", "5; ok", "1_2;", "", ";", ";1", "x;1", "x",
    ],
    "pair": [
        "1:2", " 1 : 2 ", "+1:-2", "12:0", "1_2:3", "", ":", "1:",
        ":2", "1:2:3", "x:1", "1:x", "1::2", "11",
    ],
    "trimmed3": [
        "a,b,c", ",,", " a , b , c ", "1,2,3", "x y,b,", ",,c",
        "a,,c", "\ta,b,c", "", "a,b", "a,b,c,d", ",", "a", ",,,",
    ],
    "count_ge": [
        "1 2 3", "a b 3", "a b \t5", "x y +4", "a b 3_0", "a b 3 c d",
        "x y \t-7 ", "  3", "", "  ", "a b  3", "1 2", "1 2 x",
        " a b 3", "a b x",
    ],
    "assert_len": [
        "a-b", "-", "a-", "-b", "1-2", " - ", "a\t-\nb", "", "a-b-c",
        "--", "ab", "a- -b",
    ],
    "csv_pick": [
        "a,1,b", " a,1,b ", "a, 2 ,b", ",2,", "a,1_2,b",
        "  x , +3 , y  ", "a,+0,", "", "a,1", "a,1,b,c", "a,x,b",
        ",,", "a, ,b",
    ],
    "flags": [
        "a;b;c;d", ";;;", "1;2;3;4", ";;;;", "x y;b;;d", "",
        "a;b;c", "a;b;c;d;e", ";", "abcd",
    ],
    "trivial": ["", "anything", " ", "\t\n", "123", "!@#", "a b c"],
    "mutated": INT_CASES,
}

# Declared test alphabets for the exhaustive-agreement check: literal
# characters, class representatives, and one canary the grammar never
# mentions. Escaped with the same convention as the inputs.
ALPHABETS = {
    "int_list": "09+-,_ x",
    "int_list_ir": "09+-,_ x",
    "vector_length": "09+-,_ x",
    "single_int": "09+-_ x",
    "stripped_int": "09+-_ x",
    "first_field": "09+; x",
    "pair": "09+: x",
    "trimmed3": "0a, x",
    "count_ge": "09+_ \tx",
    "assert_len": "0a- x",
    "csv_pick": "09,+ x",
    "flags": "0a; x",
    "trivial": "a x",
    "mutated": "09+-_ x",
}


def record(path: pathlib.Path) -> None:
    name = path.stem
    fn = PIR_TWINS[name] if path.suffix == ".pir" else load_subject(path)
    lines = [
        "# ground truth recorded by tools/record_truth.py under host Python",
        f"# alphabet: {escape_line(ALPHABETS[name])}",
    ]
    for text in INPUTS[name]:
        word = "accept" if verdict(fn, text) else "reject"
        lines.append(f"{escape_line(text)}\t{word}")
    out = path.parent / f"{name}.truth.tsv"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(INPUTS[name])} rows)")


def main() -> None:
    corpus = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_CORPUS
    for path in sorted(corpus.glob("*.mpy")) + sorted(corpus.glob("*.pir")):
        record(path)
    mutated = corpus / "negative" / "mutated.mpy"
    if mutated.exists():
        record(mutated)


if __name__ == "__main__":
    main()
