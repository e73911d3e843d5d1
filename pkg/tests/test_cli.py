"""Command-line interface: exit codes, output formats, stdin escaping, and
the corpus runner, all through main(argv) in-process.
"""

import json
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ingram.cli import escape_line, main, unescape_line

from .conftest import CORPUS, GOLDEN, ROOT

INT_LIST = str(CORPUS / "int_list.mpy")
INT_LIST_IR = str(CORPUS / "int_list_ir.pir")
VECTOR = str(CORPUS / "vector_length.mpy")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- escaping

@given(st.text(alphabet=st.characters(max_codepoint=127), max_size=30))
def test_escape_round_trips(w):
    line = escape_line(w)
    assert "\n" not in line and " " not in line
    assert unescape_line(line) == w


def test_escape_examples():
    assert escape_line("a b") == "a␣b"
    assert escape_line("1\t2") == "1\\t2"
    assert escape_line("\x00") == "\\x00"
    assert escape_line("back\\slash") == "back\\\\slash"


@pytest.mark.parametrize("bad", ["a b", "\\q", "\\x9", "café", "tail\\"])
def test_unescape_rejects_malformed(bad):
    with pytest.raises(ValueError):
        unescape_line(bad)


# ------------------------------------------------------------------- infer

def test_infer_ebnf_matches_golden(capsys):
    code, out, err = run_cli(capsys, "infer", INT_LIST)
    assert code == 0 and err == ""
    assert out == (GOLDEN / "int_list.ebnf").read_text()


def test_infer_regex_compiles(capsys):
    import re
    code, out, _ = run_cli(capsys, "infer", INT_LIST, "--format", "regex")
    assert code == 0
    rx = re.compile(out.strip())
    assert rx.fullmatch("12,304") and not rx.fullmatch("")


def test_infer_json_schema(capsys):
    code, out, _ = run_cli(capsys, "infer", INT_LIST, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["alphabet"] == "ascii"
    assert doc["start"] in doc["productions"]


def test_infer_railroad_is_xml(capsys):
    code, out, _ = run_cli(capsys, "infer", INT_LIST, "--format", "railroad")
    assert code == 0
    assert ET.fromstring(out).tag.endswith("svg")


def test_infer_output_file(capsys, tmp_path):
    target = tmp_path / "g.ebnf"
    code, out, _ = run_cli(capsys, "infer", INT_LIST, "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == (GOLDEN / "int_list.ebnf").read_text()


def test_infer_styles_differ_but_agree(capsys):
    _, rec, _ = run_cli(capsys, "infer", INT_LIST, "--style", "recursive")
    _, rep, _ = run_cli(capsys, "infer", INT_LIST, "--style", "repetition")
    assert rec != rep
    from ingram.ebnf import parse_ebnf
    from ingram.grammar import equivalent
    assert equivalent(parse_ebnf(rec), parse_ebnf(rep))[0]


def test_infer_ir_program(capsys):
    code, out, _ = run_cli(capsys, "infer", INT_LIST_IR)
    assert code == 0 and "int" in out


def test_infer_contradiction_warns_and_fails(capsys, tmp_path):
    src = tmp_path / "never.mpy"
    src.write_text("xs = s.split(',')\nassert len(xs) == 0\n")
    code, out, err = run_cli(capsys, "infer", str(src))
    assert code == 1
    assert "∅" in out
    assert "warning" in err and "unsatisfiable" in err


def test_list_builtins(capsys):
    code, out, _ = run_cli(capsys, "infer", "--list-builtins")
    assert code == 0
    for name in ("int_py", "split_py", "strip_py", "len", "equals",
                 "index", "map"):
        assert f"{name}(" in out


# ----------------------------------------------------------------- errors

def test_unsupported_source_exits_1(capsys):
    code, _, err = run_cli(capsys, "infer",
                           str(CORPUS / "negative" / "unmodeled.mpy"))
    assert code == 1
    assert "error:" in err and "unmodeled.mpy:3:" in err
    assert "consumes the parameter 's'" in err


def test_syntax_error_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.mpy"
    bad.write_text("def f(s:\n")
    code, _, err = run_cli(capsys, "infer", str(bad))
    assert code == 2
    assert "bad.mpy:1:" in err


def test_empty_file_exits_2(capsys, tmp_path):
    empty = tmp_path / "empty.mpy"
    empty.write_text("")
    code, _, err = run_cli(capsys, "infer", str(empty))
    assert code == 2


def test_missing_file_exits_2(capsys):
    code, _, err = run_cli(capsys, "infer", "no/such/file.mpy")
    assert code == 2 and "error" in err


def test_unknown_extension_exits_2(capsys, tmp_path):
    f = tmp_path / "prog.txt"
    f.write_text("return int(s)\n")
    code, _, err = run_cli(capsys, "infer", str(f))
    assert code == 2


def test_bad_flag_exits_2(capsys):
    assert main(["infer", INT_LIST, "--format", "yaml"]) == 2
    capsys.readouterr()


def test_no_command_exits_2(capsys):
    assert main([]) == 2
    capsys.readouterr()


# ------------------------------------------------------------------- check

def test_check_agreeing_accept(capsys):
    code, out, _ = run_cli(capsys, "check", INT_LIST, "--input", "12,304")
    assert code == 0
    assert "grammar: accept" in out and "parser:  accept" in out
    assert "AGREE" in out


def test_check_agreeing_reject(capsys):
    code, out, _ = run_cli(capsys, "check", INT_LIST, "--input", "12,,304")
    assert code == 1
    assert "grammar: reject" in out
    assert "parser:  reject" in out and "AGREE" in out


def test_check_stdin_unescapes(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("+01_2,3_0_4␣\n"))
    code, out, _ = run_cli(capsys, "check", INT_LIST, "--stdin")
    assert code == 0 and "AGREE" in out


def test_check_stdin_empty_line_is_empty_string(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("\n"))
    code, out, _ = run_cli(capsys, "check", INT_LIST, "--stdin")
    assert code == 1  # both reject the empty string


def test_check_grammar_override_disagrees(capsys):
    code, out, err = run_cli(
        capsys, "check", str(CORPUS / "negative" / "mutated.mpy"),
        "--grammar", str(CORPUS / "negative" / "mutated.expected.ebnf"),
        "--input", "7")
    assert code == 3
    assert "DISAGREE" in out
    assert "soundness violation" in err


def test_check_non_ascii_input_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "check", INT_LIST, "--input", "12é")
    assert code == 2 and "ASCII" in err


def test_check_reject_shows_location(capsys):
    code, out, _ = run_cli(capsys, "check", INT_LIST, "--input", "x")
    assert code == 1
    assert "int_list.mpy:" in out  # parser reject cites the source span


# -------------------------------------------------------------------- fuzz

def test_fuzz_golden_seed(capsys):
    code, out, _ = run_cli(capsys, "fuzz", INT_LIST, "-n", "10", "--seed", "42")
    assert code == 0
    assert out == (GOLDEN / "fuzz_int_list_seed42.txt").read_text()


def test_fuzz_validate_all_accepted(capsys):
    code, out, err = run_cli(capsys, "fuzz", VECTOR, "-n", "200",
                             "--seed", "7", "--validate")
    assert code == 0 and err == ""
    assert len(out.splitlines()) == 200


def test_fuzz_lines_round_trip_through_check(capsys, monkeypatch):
    import io
    _, out, _ = run_cli(capsys, "fuzz", INT_LIST, "-n", "5", "--seed", "1")
    for line in out.splitlines():
        monkeypatch.setattr("sys.stdin", io.StringIO(line + "\n"))
        code, body, _ = run_cli(capsys, "check", INT_LIST, "--stdin")
        assert code == 0, line


def test_fuzz_random_seed_reported(capsys):
    code, out, err = run_cli(capsys, "fuzz", INT_LIST, "-n", "2",
                             "--seed", "random")
    assert code == 0
    assert err.startswith("seed: ")
    seed = err.split()[1]
    code2, out2, _ = run_cli(capsys, "fuzz", INT_LIST, "-n", "2", "--seed", seed)
    assert out2 == out


def test_fuzz_bad_seed_exits_2(capsys):
    code, _, err = run_cli(capsys, "fuzz", INT_LIST, "--seed", "banana")
    assert code == 2


def test_fuzz_empty_language_exits_1(capsys, tmp_path):
    src = tmp_path / "never.mpy"
    src.write_text("xs = s.split(',')\nassert len(xs) == 0\n")
    code, _, err = run_cli(capsys, "fuzz", str(src), "-n", "1")
    assert code == 1


# -------------------------------------------------------------------- diff

def test_diff_program_vs_reference_grammar(capsys):
    code, out, _ = run_cli(capsys, "diff", INT_LIST,
                           str(CORPUS / "int_list.expected.ebnf"))
    assert code == 0 and out == "equivalent\n"


def test_diff_source_vs_ir_twin(capsys):
    code, out, _ = run_cli(capsys, "diff", INT_LIST, INT_LIST_IR)
    assert code == 0


def test_diff_inequivalent_prints_witness(capsys):
    code, out, _ = run_cli(capsys, "diff", INT_LIST, VECTOR)
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "not equivalent"
    assert lines[1].startswith("witness: ")
    assert "accepted only by" in lines[1]


def test_diff_witness_is_checkable(capsys, monkeypatch):
    import io
    _, out, _ = run_cli(capsys, "diff", INT_LIST, VECTOR)
    witness = out.splitlines()[1].split()[1]
    # the witness is escaped; feed it back through check on each side
    monkeypatch.setattr("sys.stdin", io.StringIO(witness + "\n"))
    a = main(["check", INT_LIST, "--stdin"])
    monkeypatch.setattr("sys.stdin", io.StringIO(witness + "\n"))
    b = main(["check", VECTOR, "--stdin"])
    capsys.readouterr()
    assert {a, b} == {0, 1}  # accepted by exactly one program


# ------------------------------------------------------------------ corpus

def test_corpus_runs_green(capsys):
    code, out, _ = run_cli(capsys, "corpus", str(CORPUS),
                           "--budget", "20000", "--fuzz", "5")
    assert code == 0
    assert "0 failing" in out


def test_corpus_json_report(capsys):
    code, out, _ = run_cli(capsys, "corpus", str(CORPUS), "--report", "json",
                           "--budget", "20000", "--fuzz", "5")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert len(report["entries"]) >= 10
    for entry in report["entries"]:
        assert set(entry) >= {"name", "file", "checks", "notes"}
        assert set(entry["checks"]) == {"infer", "equivalent", "truth",
                                        "soundness", "exhaustive"}
        assert all(entry["checks"].values())


def test_corpus_negative_controls_fail(capsys):
    code, out, _ = run_cli(capsys, "corpus", str(CORPUS / "negative"),
                           "--report", "json", "--budget", "20000",
                           "--fuzz", "5")
    assert code == 1
    report = json.loads(out)
    assert report["passed"] is False
    by_name = {e["name"]: e for e in report["entries"]}
    mutated = by_name["mutated"]
    assert mutated["checks"]["infer"] is True
    assert mutated["checks"]["equivalent"] is False
    unmodeled = by_name["unmodeled"]
    assert unmodeled["checks"]["infer"] is False


def test_corpus_missing_dir_exits_2(capsys):
    code, _, err = run_cli(capsys, "corpus", "no/such/dir")
    assert code == 2
