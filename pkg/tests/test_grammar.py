"""Grammar object: membership, generation, enumeration, equivalence, and
the regex/JSON renderings, each checked against an independent route
(re.fullmatch, brute enumeration, or the naive tree matcher).
"""

import json
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ingram.grammar import (Grammar, compile_dfa, enumerate_shortest,
                            equivalent, from_json, generate, member, to_json,
                            to_regex)
from ingram.lang import (EMPTY, Ref, alt, cat, chars, lit, opt, plus, rep,
                         star)
from ingram.source import EmptyLanguage

from .conftest import int_list_reference, int_defs
from .oracles import all_strings, naive_match
from .strategies import langs, random_grammar


def simple(root, **defs):
    prods = {"s": root}
    prods.update(defs)
    return Grammar("s", prods)


# --------------------------------------------------------------- membership

def test_member_on_int_list(int_list_grammar):
    d = compile_dfa(int_list_grammar)
    assert member(d, "12,304")
    assert member(d, "+01_2,3_0_4 ")
    assert not member(d, "")
    assert not member(d, "12,,304")


def test_member_rejects_non_ascii_with_note(int_list_grammar):
    d = compile_dfa(int_list_grammar)
    notes = []
    assert not member(d, "12é", notes)
    assert notes and "non-ASCII" in notes[0].message


@settings(max_examples=60)
@given(langs(), st.text(alphabet="ab,01x", max_size=5))
def test_member_agrees_with_naive_matcher(tree, w):
    assert member(compile_dfa(simple(tree)), w) == naive_match(tree, w)


# --------------------------------------------------------------- generation

def test_generate_is_deterministic(int_list_grammar):
    a = generate(int_list_grammar, seed=3, count=25)
    b = generate(int_list_grammar, seed=3, count=25)
    assert a == b
    assert generate(int_list_grammar, seed=4, count=25) != a


def test_generated_sentences_are_members(int_list_grammar):
    d = compile_dfa(int_list_grammar)
    for w in generate(int_list_grammar, seed=11, count=2000):
        assert member(d, w), repr(w)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generated_sentences_are_members_random_grammars(seed):
    import random
    g = random_grammar(random.Random(seed))
    d = compile_dfa(g)
    try:
        ws = generate(g, seed=seed, count=40)
    except EmptyLanguage:
        assert not any(member(d, w) for w in all_strings("ab01x", 3))
        return
    for w in ws:
        assert member(d, w), repr(w)


def test_generate_empty_language_raises():
    g = simple(EMPTY)
    with pytest.raises(EmptyLanguage):
        generate(g)


def test_generate_skips_dead_union_arms():
    g = simple(alt(EMPTY, lit("ok")))
    assert generate(g, seed=0, count=5) == ["ok"] * 5


def test_generate_max_rep_bounds_length():
    g = simple(star(lit("a")))
    for w in generate(g, seed=9, count=200, max_rep=3):
        assert len(w) <= 3
    assert any(len(w) == 3 for w in generate(g, seed=9, count=200, max_rep=3))


def test_generate_argument_validation(int_list_grammar):
    with pytest.raises(ValueError):
        generate(int_list_grammar, max_rep=0)
    with pytest.raises(ValueError):
        generate(int_list_grammar, count=-1)


# -------------------------------------------------------------- enumeration

def test_enumerate_shortest_int_list(int_list_grammar):
    assert enumerate_shortest(int_list_grammar, 1) == list("0123456789")


def test_enumerate_shortest_brute_equality(int_list_grammar):
    d = compile_dfa(int_list_grammar)
    got = [w for w in enumerate_shortest(int_list_grammar, 2)
           if set(w) <= set("0+,- ")]
    want = sorted(w for w in all_strings("0+,- ", 2) if member(d, w))
    assert got == want


def test_enumerate_shortest_validation(int_list_grammar):
    with pytest.raises(ValueError):
        enumerate_shortest(int_list_grammar, -1)


# -------------------------------------------------------------- equivalence

def test_equivalent_same_language_different_shape(int_list_grammar):
    eq, wit = equivalent(int_list_grammar, int_list_reference())
    assert eq and wit is None


def test_equivalent_witness_is_shortest(int_list_grammar):
    mutated = int_defs()
    mutated["int"] = cat(star(Ref("space")), Ref("digit"),
                         star(cat(opt(lit("_")), Ref("digit"))),
                         star(Ref("space")))
    bad = Grammar("s", {
        "s": alt(Ref("int"), cat(Ref("int"), lit(","), Ref("s"))),
        **mutated})
    eq, wit = equivalent(int_list_grammar, bad)
    assert not eq
    assert len(wit) == 2 and wit[0] in "+-"


# -------------------------------------------------------------------- regex

def check_regex(g, alphabet, max_len=3):
    rx = re.compile(to_regex(g))
    d = compile_dfa(g)
    for w in all_strings(alphabet, max_len):
        assert (rx.fullmatch(w) is not None) == member(d, w), repr(w)


def test_regex_flat_grammar():
    check_regex(simple(cat(plus(chars("01")), opt(lit("-end")))), "01-en")


def test_regex_recursive_grammar_goes_through_dfa(int_list_grammar):
    check_regex(int_list_grammar, "0+,_ ")


def test_regex_has_no_posix_classes(int_list_grammar):
    rx = to_regex(int_list_grammar)
    assert "[:" not in rx and "\\d" not in rx and "\\s" not in rx
    re.compile(rx)


def test_regex_escapes_metacharacters():
    g = simple(lit("a+b.c*"))
    rx = to_regex(g)
    assert re.fullmatch(rx, "a+b.c*")
    assert not re.fullmatch(rx, "aab.c")


@settings(max_examples=60)
@given(langs())
def test_regex_matches_naive_matcher(tree):
    rx = re.compile(to_regex(simple(tree)))
    for w in all_strings("ab,01x", 3):
        assert (rx.fullmatch(w) is not None) == naive_match(tree, w), repr(w)


def test_rep_renders_as_bounded_count():
    g = simple(rep(chars("ab"), 3))
    rx = re.compile(to_regex(g))
    assert rx.fullmatch("aba") and not rx.fullmatch("ab")


# --------------------------------------------------------------------- JSON

def test_json_round_trip(int_list_grammar):
    doc = to_json(int_list_grammar)
    assert from_json(doc) == int_list_grammar


def test_json_is_plain_data(int_list_grammar):
    doc = to_json(int_list_grammar)
    again = json.loads(json.dumps(doc))
    assert from_json(again) == int_list_grammar


def test_json_schema_fields(int_list_grammar):
    doc = to_json(int_list_grammar)
    assert set(doc) == {"start", "alphabet", "productions", "provenance"}
    assert doc["alphabet"] == "ascii"
    assert doc["start"] in doc["productions"]
    kinds = {node["kind"] for node in doc["productions"].values()}
    assert kinds <= {"empty", "epsilon", "char_class", "literal", "concat",
                     "union", "star", "plus", "optional", "repeat", "ref"}


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_json_round_trip_random(seed):
    import random
    g = random_grammar(random.Random(seed))
    assert from_json(to_json(g)).productions == g.productions


def test_json_rejects_unknown_alphabet(int_list_grammar):
    doc = to_json(int_list_grammar)
    doc["alphabet"] = "unicode"
    with pytest.raises(ValueError, match="alphabet"):
        from_json(doc)


def test_json_rejects_unknown_kind(int_list_grammar):
    doc = to_json(int_list_grammar)
    doc["productions"][doc["start"]] = {"kind": "lookahead"}
    with pytest.raises(ValueError, match="kind"):
        from_json(doc)


# --------------------------------------------------------------- validation

def test_grammar_requires_start_production():
    with pytest.raises(ValueError, match="start"):
        Grammar("s", {"t": lit("a")})


def test_grammar_requires_defined_refs():
    with pytest.raises(ValueError, match="undefined"):
        Grammar("s", {"s": Ref("ghost")})


def test_grammar_rejects_left_recursion():
    with pytest.raises(ValueError, match="non-tail"):
        Grammar("s", {"s": alt(lit("a"), cat(Ref("s"), lit("a")))})
