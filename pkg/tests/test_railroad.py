"""Railroad SVG rendering: structural checks only (well-formed XML, one
diagram per production, deterministic output) plus a golden SVG file.
Geometry is the renderer's business; these tests pin the contract.
"""

import xml.etree.ElementTree as ET

from ingram.grammar import Grammar
from ingram.lang import (ASCII, EMPTY, EPSILON, CharClass, Ref, alt, cat,
                         chars, lit, opt, plus, rep, star)
from ingram.railroad import to_railroad_svg

from .conftest import GOLDEN


def simple(root, **defs):
    prods = {"s": root}
    prods.update(defs)
    return Grammar("s", prods)


KITCHEN_SINK = Grammar("s", {
    "s": alt(cat(lit("a b"), star(Ref("digit")), opt(lit("<&>"))),
             plus(chars("xy")), rep(chars("01"), 3), EPSILON),
    "digit": chars("0123456789"),
    "wild": CharClass(ASCII),
    "none": EMPTY,
})


def test_int_list_golden(int_list_grammar):
    assert to_railroad_svg(int_list_grammar) == (GOLDEN / "int_list.svg").read_text()


def test_output_is_well_formed_xml(int_list_grammar):
    root = ET.fromstring(to_railroad_svg(int_list_grammar))
    assert root.tag.endswith("svg")


def test_every_node_kind_renders():
    root = ET.fromstring(to_railroad_svg(KITCHEN_SINK))
    assert root.tag.endswith("svg")


def test_one_title_per_production():
    svg = to_railroad_svg(KITCHEN_SINK)
    titles = [el for el in ET.fromstring(svg).iter()
              if el.tag.endswith("text") and el.get("class") == "title"]
    assert len(titles) == len(KITCHEN_SINK.productions)
    assert [t.text for t in titles] == [f"{n}:" for n in KITCHEN_SINK.productions]


def test_output_is_deterministic(int_list_grammar):
    assert to_railroad_svg(int_list_grammar) == to_railroad_svg(int_list_grammar)


def test_special_characters_are_escaped():
    svg = to_railroad_svg(simple(lit('<a> & "b"')))
    ET.fromstring(svg)
    assert "<a>" not in svg.split("<svg", 1)[1]


def test_space_shown_as_glyph():
    svg = to_railroad_svg(simple(lit("a b")))
    assert "a␣b" in svg
