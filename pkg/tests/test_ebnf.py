"""EBNF round trips and dialect details.

The renderer is checked two ways: golden text for the int-list grammar, and
language-preserving round trips through parse_ebnf for both the corpus
grammars and a seeded sample of random grammars.
"""

import random

import pytest

from ingram.ebnf import parse_ebnf, to_ebnf
from ingram.grammar import Grammar, compile_dfa, equivalent, member
from ingram.lang import (ANY_STRING, ASCII, EMPTY, EPSILON, CharClass, Ref,
                         alt, cat, chars, lit, opt, plus, rep, star)
from ingram.source import EbnfSyntaxError

from .conftest import CORPUS, GOLDEN, int_list_reference, grammar_of_source
from .strategies import random_grammar


def simple(root, **defs):
    prods = {"s": root}
    prods.update(defs)
    return Grammar("s", prods)


def round_trip_equal(g):
    text = to_ebnf(g)
    back = parse_ebnf(text)
    eq, wit = equivalent(g, back)
    assert eq, f"round trip changed the language on {wit!r}:\n{text}"


# ------------------------------------------------------------------- golden

def test_int_list_golden_text(int_list_grammar):
    assert to_ebnf(int_list_grammar) == (GOLDEN / "int_list.ebnf").read_text()


def test_corpus_expected_files_parse_and_round_trip():
    for path in sorted(CORPUS.glob("*.expected.ebnf")):
        g = parse_ebnf(path.read_text(), str(path))
        round_trip_equal(g)


# -------------------------------------------------------------- round trips

def test_round_trip_int_list(int_list_grammar):
    round_trip_equal(int_list_grammar)
    round_trip_equal(int_list_reference())


def test_round_trip_corpus_programs():
    for path in sorted(CORPUS.glob("*.mpy")):
        round_trip_equal(grammar_of_source(path.read_text(), str(path)))


def test_round_trip_random_grammars():
    for seed in range(150):
        round_trip_equal(random_grammar(random.Random(seed)))


@pytest.mark.parametrize("root", [
    EMPTY,
    EPSILON,
    lit("a b"),
    lit('say "hi"'),
    lit("tab\there"),
    chars("abc"),
    CharClass(ASCII),
    CharClass(ASCII - frozenset(",")),
    star(alt(lit("x"), EPSILON)),
    rep(chars("01"), 4),
    opt(plus(chars("ab"))),
    star(star(lit("a"))),
    cat(alt(lit("a"), lit("b")), lit("c")),
    ANY_STRING,
], ids=repr)
def test_round_trip_tricky_nodes(root):
    round_trip_equal(simple(root))


# ------------------------------------------------------------------ dialect

def test_space_renders_as_glyph():
    text = to_ebnf(simple(lit("a b")))
    assert '"a␣b"' in text
    assert parse_ebnf(text).productions["s"] == lit("a b")


def test_epsilon_and_empty_symbols():
    assert to_ebnf(simple(EPSILON)) == "s → ε\n"
    assert to_ebnf(simple(EMPTY)) == "s → ∅\n"
    assert parse_ebnf("s → ε\n").productions["s"] == EPSILON
    assert parse_ebnf("s → ∅\n").productions["s"] == EMPTY


def test_full_class_renders_as_any():
    assert to_ebnf(simple(CharClass(ASCII))) == "s → any\n"
    assert parse_ebnf("s → any\n").productions["s"] == CharClass(ASCII)


def test_wide_class_renders_as_difference():
    g = simple(CharClass(ASCII - frozenset(";")))
    text = to_ebnf(g)
    assert 'any - ";"' in text
    round_trip_equal(g)


def test_difference_parses_multi_char():
    g = parse_ebnf('s → (any - ";" - ",")*\n')
    d = compile_dfa(g)
    assert member(d, "ab") and not member(d, "a;b") and not member(d, "a,b")


def test_class_reuses_production_name():
    g = Grammar("s", {"s": plus(Ref("digit")), "digit": chars("0123456789")})
    text = to_ebnf(g)
    assert "s → digit+" in text.splitlines()[0]


def test_repeat_count_renders_in_braces():
    text = to_ebnf(simple(rep(chars("ab"), 3)))
    assert "{3}" in text
    back = parse_ebnf(text)
    d = compile_dfa(back)
    assert member(d, "aba") and not member(d, "ab")


def test_nested_postfix_parenthesized():
    text = to_ebnf(simple(star(star(lit("a")))))
    assert "**" not in text
    round_trip_equal(simple(star(star(lit("a")))))


def test_reader_tolerates_stacked_postfix():
    # The renderer never emits `**`, but the reader resolves it as (a*)*.
    g = parse_ebnf('s → "a"**\n')
    d = compile_dfa(g)
    assert member(d, "") and member(d, "aaa")


def test_ascii_arrow_and_comments_accepted():
    g = parse_ebnf("# leading comment\n"
                   "s -> \"a\" t\n"
                   "\n"
                   "t -> \"b\"*\n")
    assert g.start == "s"
    d = compile_dfa(g)
    assert member(d, "abb") and not member(d, "b")


def test_first_production_is_start():
    g = parse_ebnf('helper → "x"\ns → helper+\n')
    assert g.start == "helper"


def test_hex_escape_round_trip():
    g = simple(lit("\x01\x7f"))
    text = to_ebnf(g)
    assert "\\x01" in text and "\\x7f" in text
    assert parse_ebnf(text).productions["s"] == lit("\x01\x7f")


# ----------------------------------------------------------------- errors

@pytest.mark.parametrize("text,fragment", [
    ("", "no productions"),
    ("s = \"a\"\n", "expected"),
    ("any → \"a\"\n", "reserved"),
    ('s → "a"\ns → "b"\n', "defined twice"),
    ('s → "a" |\n', "expected"),
    ('s → "unterminated\n', "unexpected character"),
    ('s → ("a"\n', "expected"),
    ('s → "a") \n', "unexpected"),
    ('s → ghost\n', "undefined"),
    ('s → "é"\n', "ASCII"),
])
def test_syntax_errors(text, fragment):
    with pytest.raises(EbnfSyntaxError) as exc:
        parse_ebnf(text, "bad.ebnf")
    assert fragment in str(exc.value)


def test_error_location_is_reported():
    with pytest.raises(EbnfSyntaxError) as exc:
        parse_ebnf('s → "a"\nt → |\n', "g.ebnf")
    assert exc.value.lineno == 2
    assert exc.value.filename == "g.ebnf"


def test_left_recursion_rejected_at_parse():
    with pytest.raises(EbnfSyntaxError, match="non-tail"):
        parse_ebnf('s → s "a" | "a"\n')
