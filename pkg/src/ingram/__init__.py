"""ingram: static grammar inference for ad hoc string parsers.

Give it a small string-parsing program (a Python-like subset, or the
let-based parsing IR directly) and it computes a formal grammar of the
program's input language, renders it as EBNF, a regex, JSON or a railroad
diagram, and can cross-check the grammar against a reference interpreter.

The pipeline: frontend (source -> IR), infer (IR -> language model),
grammar (model -> rendered grammar + DFA machinery). interp executes the
IR concretely and serves as the ground-truth oracle.
"""

from .dfa import DFA, compile_lang, equivalent_dfa, intersect_dfa
from .ebnf import EbnfSyntaxError, parse_ebnf, to_ebnf
from .frontend import SubjectAST, parse_source, simplify
from .grammar import (Grammar, compile_dfa, enumerate_shortest, equivalent,
                      from_json, generate, member, to_json, to_regex)
from .infer import LanguageModel, infer, intersect, to_grammar
from .interp import Accept, Reject, Verdict, accepts, run
from .ir import (IRProgram, IRSyntaxError, Shape, parse_ir, pretty_print,
                 well_formed)
from .lang import (ANY_STRING, EMPTY, EPSILON, Lang, alt, cat, char, chars,
                   lit, opt, plus, rep, star)
from .models import BuiltinModel, list_builtins, register
from .railroad import to_railroad_svg
from .source import (Diagnostic, EmptyLanguage, Provenance, ToolError,
                     UnsupportedConstraint, UnsupportedConstruct)

__version__ = "0.1.0"

__all__ = [
    "ANY_STRING", "Accept", "BuiltinModel", "DFA", "Diagnostic", "EMPTY",
    "EPSILON", "EbnfSyntaxError", "EmptyLanguage", "Grammar", "IRProgram",
    "IRSyntaxError", "Lang", "LanguageModel", "Provenance", "Reject",
    "Shape", "SubjectAST", "ToolError", "UnsupportedConstraint",
    "UnsupportedConstruct", "Verdict", "accepts", "alt", "cat", "char",
    "chars", "compile_dfa", "compile_lang", "enumerate_shortest",
    "equivalent", "equivalent_dfa", "from_json", "generate", "infer",
    "intersect", "intersect_dfa", "list_builtins", "lit", "member", "opt",
    "parse_ebnf", "parse_ir", "parse_source", "plus", "pretty_print",
    "register", "rep", "run", "simplify", "star", "to_ebnf", "to_grammar",
    "to_json", "to_railroad_svg", "to_regex", "well_formed",
]
