"""Shared fixtures: repo paths, hand-transcribed reference grammars, and
small helpers used across the suite."""

from __future__ import annotations

import pathlib

import pytest

from ingram import Grammar, infer, parse_ir, parse_source, simplify, to_grammar
from ingram.lang import Ref, alt, cat, chars, lit, opt, star

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"

# The machine-integer sublanguage, transcribed by hand as a reference:
# optional surrounding whitespace, optional sign, digits with single
# underscores strictly between digits.
DIGITS = "0123456789"
SPACES = "\t\n\v\f\r "


def int_defs() -> dict:
    return {
        "digit": chars(DIGITS),
        "sign": chars("+-"),
        "space": chars(SPACES),
        "int": cat(star(Ref("space")), opt(Ref("sign")), Ref("digit"),
                   star(cat(opt(lit("_")), Ref("digit"))),
                   star(Ref("space"))),
    }


def int_list_reference() -> Grammar:
    """s -> int | int "," s, with the int chain above."""
    prods = {"s": alt(Ref("int"), cat(Ref("int"), lit(","), Ref("s")))}
    prods.update(int_defs())
    return Grammar("s", prods)


def vector_reference() -> Grammar:
    prods = {"s": cat(Ref("int"), lit(","), Ref("int"), lit(","), Ref("int"))}
    prods.update(int_defs())
    return Grammar("s", prods)


def grammar_of_source(src: str, filename: str = "<test>.mpy") -> Grammar:
    return to_grammar(infer(simplify(parse_source(src, filename))))


def grammar_of_ir(text: str, filename: str = "<test>.pir") -> Grammar:
    return to_grammar(infer(parse_ir(text, filename)))


@pytest.fixture(scope="session")
def int_list_ref() -> Grammar:
    return int_list_reference()


@pytest.fixture(scope="session")
def int_list_grammar() -> Grammar:
    src = (CORPUS / "int_list.mpy").read_text(encoding="utf-8")
    return grammar_of_source(src, "int_list.mpy")


def corpus_programs() -> list[pathlib.Path]:
    return sorted((p for p in CORPUS.iterdir()
                   if p.suffix in (".mpy", ".pir")),
                  key=lambda p: (p.stem, p.suffix))
