"""Reference interpreter for the IR: the executable semantics.

This is the single source of truth for what a program accepts. Inference
never feeds it, and it never feeds inference; soundness tests compare the
two through generated strings only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .ir import Accept as AcceptNode
from .ir import Arg, Assert, FnArg, IntArg, IRProgram, Let, StrArg, VarArg
from .models import BUILTIN_ERROR, ConcreteError, REGISTRY
from .source import Provenance


class RejectReason(enum.Enum):
    BUILTIN_ERROR = "builtin_error"
    ASSERT_FAILED = "assert_failed"
    INDEX_OUT_OF_RANGE = "index_out_of_range"


@dataclass
class Accept:
    """Execution reached `accept`; carries the final variable environment."""

    env: dict[str, object]


@dataclass
class Reject:
    reason: RejectReason
    where: Provenance
    message: str


Verdict = Accept | Reject


def _resolve(arg: Arg, env: dict[str, object]) -> object:
    if isinstance(arg, VarArg):
        return env[arg.name]
    if isinstance(arg, (StrArg, IntArg)):
        return arg.value
    return arg.name  # FnArg: builtins are passed by name


def run(prog: IRProgram, text: str) -> Verdict:
    """Evaluate the let-chain on `text`. Requires well_formed(prog) == [];
    on malformed programs this may raise instead of returning a Verdict."""
    env: dict[str, object] = {prog.param: text}
    node = prog.body
    while True:
        if isinstance(node, Let):
            call = node.call
            model = REGISTRY[call.builtin]
            values = [_resolve(a, env) for a in call.args]
            try:
                env[node.var] = model.concrete(*values)
            except ConcreteError as e:
                reason = (RejectReason.BUILTIN_ERROR if e.kind == BUILTIN_ERROR
                          else RejectReason.INDEX_OUT_OF_RANGE)
                return Reject(reason, call.prov, str(e))
            node = node.body
        elif isinstance(node, Assert):
            if not env[node.var]:
                return Reject(RejectReason.ASSERT_FAILED, node.prov,
                              f"assert {node.var} failed")
            node = node.body
        else:
            assert isinstance(node, AcceptNode)
            return Accept(dict(env))


def accepts(prog: IRProgram, text: str) -> bool:
    return isinstance(run(prog, text), Accept)
