"""Builtin models: concrete semantics against host Python, and transfer
functions against brute-force pre-image enumeration.

The transfer checks are the heart of soundness. For each builtin and a
family of demands, every string up to length 4 over a test alphabet must
satisfy: w is in the transferred language iff running the concrete builtin
on w succeeds and its result meets the demand.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ingram.dfa import compile_lang
from ingram.ir import IntArg, VarArg
from ingram.lang import ANY_STRING, Ref, cat, chars, lit, star
from ingram.models import (Contradiction, Count, DefEnv, ListDemand,
                           NAMED_LANGS, ConcreteError, _has_border,
                           equals_transfer, index_transfer, int_py_concrete,
                           int_py_transfer, len_transfer, list_builtins,
                           map_transfer, result_shape, split_py_concrete,
                           split_py_transfer, strip_py_concrete,
                           strip_py_transfer)
from ingram.source import SYNTHETIC, UnsupportedConstraint

from .oracles import all_strings

W = SYNTHETIC


def member(tree, defs):
    d = compile_lang(tree, defs)

    def inside(w):
        state = d.start
        for c in w:
            if state == -1:
                return False
            state = d.transitions[state].get(c, -1)
        return state in d.accepting
    return inside


def check_preimage(result, env, oracle, alphabet, max_len=4):
    """result may be None (no constraint)."""
    inside = (lambda w: True) if result is None else member(result, env.defs)
    for w in all_strings(alphabet, max_len):
        assert inside(w) == oracle(w), repr(w)


# ----------------------------------------------------------- concrete: int_py

@pytest.mark.parametrize("text,value", [
    ("12", 12), ("+01_2", 12), ("-3", -3), (" 7\t", 7), ("0_0", 0),
])
def test_int_py_concrete_accepts(text, value):
    assert int_py_concrete(text) == value


@pytest.mark.parametrize("text", [
    "", " ", "+", "1__2", "_1", "1_", "+-1", "1 2", "0x1", "é",
])
def test_int_py_concrete_rejects(text):
    with pytest.raises(ConcreteError):
        int_py_concrete(text)


@given(st.text(alphabet="0123456789+-_ \tx", max_size=8))
def test_int_py_concrete_matches_host_int(text):
    try:
        want = int(text)
    except ValueError:
        want = None
    try:
        got = int_py_concrete(text)
    except ConcreteError:
        got = None
    assert got == want


# ------------------------------------------------- concrete: split and strip

@given(st.text(alphabet="ab,;", max_size=8),
       st.sampled_from([",", ";", "ab", ",;"]))
def test_split_py_concrete_matches_host(text, sep):
    assert split_py_concrete(text, sep) == text.split(sep)


@given(st.text(alphabet="ab \t\n", max_size=8))
def test_strip_py_concrete_matches_host_on_ascii_space(text):
    assert strip_py_concrete(text) == text.strip()


def test_strip_py_is_pinned_to_ascii_whitespace():
    # Host Python also strips \x1c-\x1f; the subject language does not.
    assert strip_py_concrete("\x1ca\x1c") == "\x1ca\x1c"
    assert "\x1ca\x1c".strip() == "a"


# -------------------------------------------------------------- Count algebra

def test_count_meet_table():
    assert Count.eq(3).meet(Count.eq(3)) == Count.eq(3)
    assert Count.eq(3).meet(Count.ge(2)) == Count.eq(3)
    assert Count.ge(2).meet(Count.ge(5)) == Count.ge(5)
    assert Count.top().meet(Count.eq(1)) == Count.eq(1)
    with pytest.raises(Contradiction):
        Count.eq(2).meet(Count.eq(3))
    with pytest.raises(Contradiction):
        Count.eq(1).meet(Count.ge(4))


@given(st.sampled_from([Count.top(), Count.eq(0), Count.eq(2), Count.ge(1),
                        Count.ge(3)]),
       st.sampled_from([Count.top(), Count.eq(0), Count.eq(2), Count.ge(1),
                        Count.ge(3)]))
def test_count_meet_commutes_and_models_sets(a, b):
    def sat(c, n):
        return c.is_top or (n == c.k if c.kind == "eq" else n >= c.k)
    try:
        m = a.meet(b)
    except Contradiction:
        assert not any(sat(a, n) and sat(b, n) for n in range(12))
        return
    assert m == b.meet(a)
    for n in range(12):
        assert sat(m, n) == (sat(a, n) and sat(b, n))


def test_has_border():
    assert not _has_border(",")
    assert not _has_border("ab")
    assert _has_border("aa")
    assert _has_border("aba")
    assert _has_border(",,")


# ------------------------------------------------------------ transfer: int_py

def test_int_py_transfer_is_exact():
    env = DefEnv()
    result = int_py_transfer(Count.top(), env, W)
    oracle = lambda w: _succeeds(int_py_concrete, w)
    check_preimage(result, env, oracle, "09+-_ x")
    check_preimage(result, env, oracle, "0\t\n\v\f\r")


def test_int_py_transfer_refuses_value_constraints():
    with pytest.raises(UnsupportedConstraint):
        int_py_transfer(Count.eq(7), DefEnv(), W)


def _succeeds(fn, *args):
    try:
        fn(*args)
    except ConcreteError:
        return False
    return True


# --------------------------------------------------------- transfer: split_py

def split_oracle(sep, pred):
    return lambda w: pred(split_py_concrete(w, sep))


def test_split_transfer_exact_count():
    env = DefEnv()
    result = split_py_transfer(ListDemand(count=Count.eq(3)), ",", env, W)
    check_preimage(result, env, split_oracle(",", lambda f: len(f) == 3),
                   "a,x")


def test_split_transfer_min_count():
    env = DefEnv()
    result = split_py_transfer(ListDemand(count=Count.ge(2)), ";", env, W)
    check_preimage(result, env, split_oracle(";", lambda f: len(f) >= 2),
                   "a;x")


def test_split_transfer_element_demand():
    env = DefEnv()
    demand = ListDemand(elems={1: lit("a")}, count=Count.eq(2))
    result = split_py_transfer(demand, ",", env, W)
    check_preimage(result, env,
                   split_oracle(",", lambda f: len(f) == 2 and f[1] == "a"),
                   "ab,x")


def test_split_transfer_default_demand():
    env = DefEnv()
    demand = ListDemand(default=chars("ab"), count=Count.ge(1))
    result = split_py_transfer(demand, ",", env, W)
    check_preimage(result, env,
                   split_oracle(",", lambda f: all(x in ("a", "b")
                                                   for x in f)),
                   "ab,x")


def test_split_transfer_multichar_separator():
    env = DefEnv()
    result = split_py_transfer(ListDemand(count=Count.eq(2)), "ab", env, W)
    check_preimage(result, env, split_oracle("ab", lambda f: len(f) == 2),
                   "abx")


def test_split_transfer_index_demand_from_transfer():
    env = DefEnv()
    demand = index_transfer(lit("a"), 1)
    result = split_py_transfer(demand, ";", env, W)
    check_preimage(
        result, env,
        split_oracle(";", lambda f: len(f) >= 2 and f[1] == "a"), "ab;x")


def test_split_transfer_no_demand_is_no_constraint():
    assert split_py_transfer(ListDemand(), ",", DefEnv(), W) is None


def test_split_transfer_contradictions():
    with pytest.raises(Contradiction):
        split_py_transfer(ListDemand(count=Count.eq(0)), ",", DefEnv(), W)
    with pytest.raises(Contradiction):
        split_py_transfer(ListDemand(elems={3: lit("a")}, count=Count.eq(2)),
                          ",", DefEnv(), W)


def test_split_transfer_refuses_bordered_separator():
    with pytest.raises(UnsupportedConstraint, match="overlaps itself"):
        split_py_transfer(ListDemand(count=Count.eq(2)), "aa", DefEnv(), W)
    with pytest.raises(UnsupportedConstraint):
        split_py_transfer(ListDemand(count=Count.eq(2)), "", DefEnv(), W)


# --------------------------------------------------------- transfer: strip_py

def strip_oracle(inside):
    return lambda w: inside(strip_py_concrete(w))


def test_strip_transfer_simple_demand():
    env = DefEnv()
    demand = lit("ab")
    result = strip_py_transfer(demand, env, W)
    check_preimage(result, env, strip_oracle(lambda v: v == "ab"), "ab \t")


def test_strip_transfer_demand_containing_spaces():
    # "a b" has interior whitespace; edges still get trimmed exactly.
    env = DefEnv()
    demand = cat(lit("a"), star(chars(" ")), lit("b"))
    inside = member(demand, {})
    result = strip_py_transfer(demand, env, W)
    check_preimage(result, env, strip_oracle(inside), "ab ")


def test_strip_transfer_int_demand_is_fixed_point():
    # L(int) already absorbs surrounding whitespace.
    env = DefEnv()
    demand = env.use_named("int", W)
    result = strip_py_transfer(demand, env, W)
    assert result == demand
    oracle = strip_oracle(lambda v: _succeeds(int_py_concrete, v))
    check_preimage(result, env, oracle, "0+ _")


def test_strip_transfer_no_demand():
    assert strip_py_transfer(None, DefEnv(), W) is None


# ---------------------------------------------------- transfer: len and equals

def test_len_transfer():
    assert len_transfer(None) is None
    assert len_transfer(Count.top()) is None
    assert len_transfer(Count.eq(4)) == ListDemand(count=Count.eq(4))


def test_index_transfer():
    d = index_transfer(lit("a"), 2)
    assert d.count == Count.ge(3)
    assert d.elems == {2: lit("a")}
    assert index_transfer(None, 0) == ListDemand(count=Count.ge(1))


def test_equals_transfer():
    assert equals_transfer((VarArg("n"), IntArg(3)), W) == [("n", Count.eq(3))]
    assert equals_transfer((IntArg(3), VarArg("n")), W) == [("n", Count.eq(3))]
    assert equals_transfer((IntArg(2), IntArg(2)), W) == []
    with pytest.raises(Contradiction):
        equals_transfer((IntArg(2), IntArg(3)), W)
    with pytest.raises(UnsupportedConstraint):
        equals_transfer((VarArg("n"), VarArg("m")), W)


# -------------------------------------------------------------- transfer: map

def test_map_transfer_composes_with_split():
    # The int_list chain: every split field must be an integer.
    env = DefEnv()
    mapped = map_transfer(ListDemand(), "int_py", env, W)
    result = split_py_transfer(mapped, ",", env, W)
    oracle = split_oracle(
        ",", lambda f: all(_succeeds(int_py_concrete, x) for x in f))
    check_preimage(result, env, oracle, "0+,x")


def test_map_transfer_keeps_count_and_elems():
    env = DefEnv()
    demand = ListDemand(elems={0: lit("1")}, count=Count.eq(2))
    mapped = map_transfer(demand, "strip_py", env, W)
    assert mapped.count == Count.eq(2)
    assert set(mapped.elems) == {0}


def test_map_transfer_refuses_value_demand_on_ints():
    # A value constraint on a mapped int_py element has no regular pre-image
    # the models support; it must be refused, not approximated.
    env = DefEnv()
    demand = ListDemand(elems={0: Count.eq(1)}, count=Count.eq(2))
    with pytest.raises(UnsupportedConstraint):
        map_transfer(demand, "int_py", env, W)


# ------------------------------------------------------------------- registry

def test_registry_is_sorted_and_complete():
    names = [m.name for m in list_builtins()]
    assert names == sorted(names)
    assert set(names) == {"equals", "index", "int_py", "len", "map",
                          "split_py", "strip_py"}


def test_result_shapes():
    from ingram.ir import Shape
    assert result_shape("split_py", (Shape.STR, Shape.STR)) is Shape.STR_LIST
    assert result_shape("index", (Shape.STR_LIST, Shape.INT)) is Shape.STR
    assert result_shape("index", (Shape.INT_LIST, Shape.INT)) is Shape.INT
    assert result_shape("map", (Shape.INT, Shape.STR_LIST)) is Shape.INT_LIST
    assert result_shape("equals", (Shape.INT, Shape.INT)) is Shape.BOOL


def test_named_langs_cover_int():
    inside = member(Ref("int"), NAMED_LANGS)
    assert inside(" +1_2 ")
    assert not inside("1__2")
