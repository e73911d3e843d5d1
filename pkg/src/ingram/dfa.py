"""Finite-automata backend: compile language trees to minimal DFAs.

Pipeline: regex tree (with named refs) -> epsilon-NFA -> subset construction
-> Hopcroft minimization -> canonical renumbering. Named references may be
cyclic as long as every cycle passes only through tail positions (the
right-linear fragment); anything else is rejected before compilation.

The DFA transition function is total over ASCII: characters missing from a
state's table go to the explicit dead state `DEAD`, which self-loops.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from .lang import (
    CharClass,
    Concat,
    Empty,
    Epsilon,
    Lang,
    Literal,
    Optional,
    Plus,
    Ref,
    Repeat,
    Star,
    Union,
    alt,
    cat,
    star,
)

#: The explicit dead state. Every character without a table entry leads here,
#: and the dead state maps every character to itself.
DEAD = -1


@dataclass(frozen=True)
class DFA:
    """A minimal DFA with canonical state numbering.

    States are 0..n-1 plus the implicit-but-explicitly-defined dead state
    `DEAD`; `transitions[q]` maps characters to successor states and any
    missing character goes to `DEAD`. Two DFAs for the same language are
    structurally identical.
    """

    start: int
    accepting: frozenset[int]
    transitions: tuple[dict[str, int], ...]

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    @property
    def alphabet(self) -> frozenset[str]:
        out: set[str] = set()
        for row in self.transitions:
            out.update(row)
        return frozenset(out)

    def step(self, state: int, c: str) -> int:
        if state == DEAD:
            return DEAD
        return self.transitions[state].get(c, DEAD)

    def walk(self, text: str) -> int:
        state = self.start
        for c in text:
            if state == DEAD:
                return DEAD
            state = self.transitions[state].get(c, DEAD)
        return state

    def member(self, text: str) -> bool:
        return self.walk(text) in self.accepting

    def is_empty(self) -> bool:
        return not self.accepting


# ---------------------------------------------------------------------------
# Reference-graph validation (tail-position cycles only)
# ---------------------------------------------------------------------------


def ref_edges(body: Lang) -> list[tuple[str, bool]]:
    """All (referenced name, occurs in tail position) pairs in a tree."""
    out: list[tuple[str, bool]] = []

    def go(n: Lang, tail: bool) -> None:
        if isinstance(n, Ref):
            out.append((n.name, tail))
        elif isinstance(n, Concat):
            for item in n.items[:-1]:
                go(item, False)
            if n.items:
                go(n.items[-1], tail)
        elif isinstance(n, Union):
            for item in n.items:
                go(item, tail)
        elif isinstance(n, Optional):
            go(n.item, tail)
        elif isinstance(n, (Star, Plus, Repeat)):
            go(n.item, False)

    go(body, True)
    return out


def check_compilable(defs: Mapping[str, Lang], roots: list[Lang]) -> None:
    """Reject undefined references and cycles through non-tail positions."""
    for root in roots:
        for name, _ in ref_edges(root):
            if name not in defs:
                raise ValueError(f"undefined sublanguage {name!r}")
    edges: dict[str, list[tuple[str, bool]]] = {}
    for name, body in defs.items():
        edges[name] = ref_edges(body)
        for target, _ in edges[name]:
            if target not in defs:
                raise ValueError(f"undefined sublanguage {target!r}")
    scc = _scc_of(defs.keys(), edges)
    for name, body_edges in edges.items():
        for target, tail in body_edges:
            if scc[name] == scc[target] and not tail:
                raise ValueError(
                    f"reference to {target!r} from {name!r} is cyclic through a "
                    "non-tail position; only right-linear recursion is supported"
                )


def _scc_of(names, edges: Mapping[str, list[tuple[str, bool]]]) -> dict[str, int]:
    """Tarjan strongly-connected components; singletons count as their own
    component unless they self-loop, which the caller's same-SCC test covers
    via scc[x] == scc[x]."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    comp: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    counter = [0]
    n_comp = [0]

    def strongconnect(v: str) -> None:
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w, _ in edges.get(v, ()):
            if w not in index:
                strongconnect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp[w] = n_comp[0]
                if w == v:
                    break
            n_comp[0] += 1

    for v in sorted(names):
        if v not in index:
            strongconnect(v)
    return comp


# ---------------------------------------------------------------------------
# NFA construction (Thompson-style, continuation form)
# ---------------------------------------------------------------------------


class _Nfa:
    def __init__(self) -> None:
        self.eps: list[list[int]] = []
        self.edges: list[dict[str, list[int]]] = []

    def new_state(self) -> int:
        self.eps.append([])
        self.edges.append({})
        return len(self.eps) - 1

    def add_eps(self, a: int, b: int) -> None:
        self.eps[a].append(b)

    def add_edge(self, a: int, c: str, b: int) -> None:
        self.edges[a].setdefault(c, []).append(b)


def _build_nfa(root: Lang, defs: Mapping[str, Lang]) -> tuple[_Nfa, int, int]:
    """Compile with an explicit continuation state per subexpression. Cyclic
    refs in tail position share one entry state per (name, continuation)."""
    nfa = _Nfa()
    accept = nfa.new_state()
    entries: dict[tuple[str, int], int] = {}

    def compile_ref(name: str, cont: int) -> int:
        key = (name, cont)
        if key in entries:
            return entries[key]
        s = nfa.new_state()
        entries[key] = s
        nfa.add_eps(s, compile_expr(defs[name], cont))
        return s

    def compile_expr(e: Lang, cont: int) -> int:
        if isinstance(e, Empty):
            return nfa.new_state()
        if isinstance(e, Epsilon):
            return cont
        if isinstance(e, CharClass):
            s = nfa.new_state()
            for c in e.chars:
                nfa.add_edge(s, c, cont)
            return s
        if isinstance(e, Literal):
            cur = cont
            for c in reversed(e.text):
                s = nfa.new_state()
                nfa.add_edge(s, c, cur)
                cur = s
            return cur
        if isinstance(e, Concat):
            cur = cont
            for item in reversed(e.items):
                cur = compile_expr(item, cur)
            return cur
        if isinstance(e, Union):
            s = nfa.new_state()
            for item in e.items:
                nfa.add_eps(s, compile_expr(item, cont))
            return s
        if isinstance(e, Star):
            s = nfa.new_state()
            nfa.add_eps(s, cont)
            nfa.add_eps(s, compile_expr(e.item, s))
            return s
        if isinstance(e, Plus):
            s = nfa.new_state()
            nfa.add_eps(s, cont)
            body = compile_expr(e.item, s)
            nfa.add_eps(s, body)
            return body
        if isinstance(e, Optional):
            s = nfa.new_state()
            nfa.add_eps(s, cont)
            nfa.add_eps(s, compile_expr(e.item, cont))
            return s
        if isinstance(e, Repeat):
            cur = cont
            for _ in range(e.count):
                cur = compile_expr(e.item, cur)
            return cur
        if isinstance(e, Ref):
            return compile_ref(e.name, cont)
        raise TypeError(f"unknown language node {e!r}")

    start = compile_expr(root, accept)
    return nfa, start, accept


# ---------------------------------------------------------------------------
# Subset construction + Hopcroft minimization
# ---------------------------------------------------------------------------


def _eps_closure(nfa: _Nfa, states: frozenset[int]) -> frozenset[int]:
    out = set(states)
    stack = list(states)
    while stack:
        q = stack.pop()
        for t in nfa.eps[q]:
            if t not in out:
                out.add(t)
                stack.append(t)
    return frozenset(out)


def _subset(nfa: _Nfa, start: int, accept: int) -> tuple[list[dict[str, int]], int, set[int]]:
    init = _eps_closure(nfa, frozenset((start,)))
    ids: dict[frozenset[int], int] = {init: 0}
    trans: list[dict[str, int]] = [{}]
    accepting: set[int] = set()
    if accept in init:
        accepting.add(0)
    queue = deque([init])
    while queue:
        cur = queue.popleft()
        cur_id = ids[cur]
        moves: dict[str, set[int]] = {}
        for q in cur:
            for c, targets in nfa.edges[q].items():
                moves.setdefault(c, set()).update(targets)
        for c in sorted(moves):
            nxt = _eps_closure(nfa, frozenset(moves[c]))
            if nxt not in ids:
                ids[nxt] = len(trans)
                trans.append({})
                if accept in nxt:
                    accepting.add(ids[nxt])
                queue.append(nxt)
            trans[cur_id][c] = ids[nxt]
    return trans, 0, accepting


def _hopcroft(trans: list[dict[str, int]], accepting: set[int]) -> list[int]:
    """Partition-refinement minimization over the effective alphabet, with a
    materialized dead state. Returns the block id of every state; the dead
    state is the last entry."""
    n = len(trans)
    dead = n
    total = n + 1
    alphabet = sorted({c for row in trans for c in row})

    inv: dict[str, list[list[int]]] = {c: [[] for _ in range(total)] for c in alphabet}
    for p in range(n):
        row = trans[p]
        for c in alphabet:
            inv[c][row.get(c, dead)].append(p)
    for c in alphabet:
        inv[c][dead].append(dead)

    blocks: list[set[int]] = []
    block_of = [0] * total
    final = set(accepting)
    nonfinal = set(range(total)) - final
    for group in (final, nonfinal):
        if group:
            idx = len(blocks)
            blocks.append(set(group))
            for q in group:
                block_of[q] = idx

    work: set[int] = set(range(len(blocks)))
    while work:
        i = work.pop()
        splitter = frozenset(blocks[i])
        for c in alphabet:
            preds: set[int] = set()
            for q in splitter:
                preds.update(inv[c][q])
            touched: dict[int, set[int]] = {}
            for p in preds:
                touched.setdefault(block_of[p], set()).add(p)
            for j, inter in touched.items():
                block = blocks[j]
                if len(inter) == len(block):
                    continue
                k = len(blocks)
                block.difference_update(inter)
                blocks.append(inter)
                for q in inter:
                    block_of[q] = k
                if j in work:
                    work.add(k)
                else:
                    work.add(k if len(inter) <= len(block) else j)
    return block_of


def _canonicalize(trans: list[dict[str, int]], start: int,
                  accepting: set[int]) -> DFA:
    """Merge equivalent states, drop the dead class, renumber by BFS order."""
    block_of = _hopcroft(trans, accepting)
    dead_block = block_of[len(trans)]

    block_start = block_of[start]
    if block_start == dead_block:
        return DFA(start=DEAD, accepting=frozenset(), transitions=())

    order: dict[int, int] = {block_start: 0}
    rows: list[dict[str, int]] = [{}]
    rep_of_block: dict[int, int] = {}
    for q, b in enumerate(block_of[:-1]):
        rep_of_block.setdefault(b, q)
    queue = deque([block_start])
    while queue:
        b = queue.popleft()
        rep = rep_of_block[b]
        new_row: dict[str, int] = {}
        for c in sorted(trans[rep]):
            tb = block_of[trans[rep][c]]
            if tb == dead_block:
                continue
            if tb not in order:
                order[tb] = len(order)
                rows.append({})
                queue.append(tb)
            new_row[c] = order[tb]
        rows[order[b]] = new_row
    acc = frozenset(order[block_of[q]] for q in accepting if block_of[q] in order)
    return DFA(start=0, accepting=acc, transitions=tuple(rows))


def compile_lang(root: Lang, defs: Mapping[str, Lang] = {}) -> DFA:
    """Compile a regex tree (plus named definitions) to its minimal DFA."""
    check_compilable(defs, [root])
    nfa, start, accept = _build_nfa(root, defs)
    trans, dstart, accepting = _subset(nfa, start, accept)
    return _canonicalize(trans, dstart, accepting)


# ---------------------------------------------------------------------------
# Boolean operations and decision procedures
# ---------------------------------------------------------------------------


def product(a: DFA, b: DFA, keep: Callable[[bool, bool], bool]) -> DFA:
    """Pair construction over the union of effective alphabets.

    `keep(in_a, in_b)` decides acceptance of a pair state. It must map
    (False, False) to False: a pair DFA cannot represent strings that both
    operands reject into their dead states on unseen characters.
    """
    if keep(False, False):
        raise ValueError("product acceptance must reject the (dead, dead) pair")
    alphabet = sorted(a.alphabet | b.alphabet)
    start = (a.start, b.start)
    ids: dict[tuple[int, int], int] = {start: 0}
    rows: list[dict[str, int]] = [{}]
    accepting: set[int] = set()
    if keep(a.start in a.accepting, b.start in b.accepting):
        accepting.add(0)
    queue = deque([start])
    while queue:
        pa, pb = queue.popleft()
        row = rows[ids[(pa, pb)]]
        for c in alphabet:
            qa, qb = a.step(pa, c), b.step(pb, c)
            if qa == DEAD and qb == DEAD:
                continue
            key = (qa, qb)
            if key not in ids:
                ids[key] = len(rows)
                rows.append({})
                if keep(qa in a.accepting, qb in b.accepting):
                    accepting.add(ids[key])
                queue.append(key)
            row[c] = ids[key]
    return _canonicalize(rows, 0, accepting)


def intersect_dfa(a: DFA, b: DFA) -> DFA:
    return product(a, b, lambda x, y: x and y)


def difference_dfa(a: DFA, b: DFA) -> DFA:
    return product(a, b, lambda x, y: x and not y)


def is_subset(a: DFA, b: DFA) -> bool:
    return difference_dfa(a, b).is_empty()


def equivalent_dfa(a: DFA, b: DFA) -> tuple[bool, str | None]:
    """Language equality via union-find state merging; on inequality, also a
    shortest distinguishing witness (lexicographically least among them)."""
    if _hk_equivalent(a, b):
        return True, None
    return False, _shortest_difference(a, b)


def _hk_equivalent(a: DFA, b: DFA) -> bool:
    alphabet = sorted(a.alphabet | b.alphabet)
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x: tuple[int, int]) -> tuple[int, int]:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    def accepts(node: tuple[int, int]) -> bool:
        side, q = node
        if q == DEAD:
            return False
        return q in (a.accepting if side == 0 else b.accepting)

    def step(node: tuple[int, int], c: str) -> tuple[int, int]:
        side, q = node
        return (side, (a if side == 0 else b).step(q, c))

    stack = [((0, a.start), (1, b.start))]
    while stack:
        x, y = stack.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        if accepts(rx) != accepts(ry):
            return False
        parent[rx] = ry
        for c in alphabet:
            stack.append((step(x, c), step(y, c)))
    return True


def _shortest_difference(a: DFA, b: DFA) -> str:
    """BFS over the pair graph for the shortest string in exactly one language."""
    alphabet = sorted(a.alphabet | b.alphabet)
    start = (a.start, b.start)
    seen = {start}
    queue: deque[tuple[tuple[int, int], str]] = deque([(start, "")])
    while queue:
        (pa, pb), prefix = queue.popleft()
        if (pa in a.accepting) != (pb in b.accepting):
            return prefix
        for c in alphabet:
            key = (a.step(pa, c), b.step(pb, c))
            if key not in seen:
                seen.add(key)
                queue.append((key, prefix + c))
    raise AssertionError("no witness found for inequivalent DFAs")


def shortest_member(d: DFA) -> str | None:
    """A shortest member of L(d), lexicographically least; None if empty."""
    if d.start == DEAD:
        return None
    seen = {d.start}
    queue: deque[tuple[int, str]] = deque([(d.start, "")])
    while queue:
        q, prefix = queue.popleft()
        if q in d.accepting:
            return prefix
        for c in sorted(d.transitions[q]):
            t = d.transitions[q][c]
            if t not in seen:
                seen.add(t)
                queue.append((t, prefix + c))
    return None


def enumerate_upto(d: DFA, max_len: int,
                   alphabet: frozenset[str] | None = None) -> list[str]:
    """All members of L(d) of length <= max_len, sorted lexicographically.

    Restricting `alphabet` enumerates the sublanguage over those characters.
    Dead-state pruning keeps the walk proportional to viable prefixes.
    """
    chars = sorted(alphabet if alphabet is not None else d.alphabet)
    out: list[str] = []

    def go(state: int, prefix: list[str], depth: int) -> None:
        if state in d.accepting:
            out.append("".join(prefix))
        if depth == max_len:
            return
        row = d.transitions[state] if state != DEAD else {}
        for c in chars:
            t = row.get(c, DEAD)
            if t != DEAD:
                prefix.append(c)
                go(t, prefix, depth + 1)
                prefix.pop()

    if d.start != DEAD:
        go(d.start, [], 0)
    return sorted(out)


def iter_members(d: DFA, max_len: int) -> Iterator[str]:
    for w in enumerate_upto(d, max_len):
        yield w


# ---------------------------------------------------------------------------
# DFA -> regex tree (state elimination)
# ---------------------------------------------------------------------------


def dfa_to_lang(d: DFA) -> Lang:
    """Extract an equivalent regex tree by GNFA state elimination.

    States with the fewest incident transitions go first; this tends to keep
    the result readable, but only equivalence is guaranteed.
    """
    if d.start == DEAD or not d.accepting:
        return Empty()

    src = d.n_states  # fresh start
    snk = d.n_states + 1  # fresh accept
    edges: dict[int, dict[int, Lang]] = {src: {d.start: Epsilon()}}

    def add(p: int, q: int, label: Lang) -> None:
        if isinstance(label, Empty):
            return
        row = edges.setdefault(p, {})
        row[q] = alt(row[q], label) if q in row else label

    for p in range(d.n_states):
        by_target: dict[int, set[str]] = {}
        for c, t in d.transitions[p].items():
            by_target.setdefault(t, set()).add(c)
        for t in sorted(by_target):
            add(p, t, CharClass(frozenset(by_target[t])))
    for q in d.accepting:
        add(q, snk, Epsilon())

    remaining = set(range(d.n_states))
    while remaining:
        victim = min(
            remaining,
            key=lambda s: (
                sum(1 for p in edges if s in edges.get(p, {}) and p != s)
                * sum(1 for q in edges.get(s, {}) if q != s),
                s,
            ),
        )
        remaining.discard(victim)
        loop = edges.get(victim, {}).get(victim, Empty())
        mid = Epsilon() if isinstance(loop, Empty) else star(loop)
        ins = [(p, lbl) for p, row in edges.items() for q, lbl in row.items()
               if q == victim and p != victim]
        outs = [(q, lbl) for q, lbl in edges.get(victim, {}).items() if q != victim]
        for p, lin in ins:
            del edges[p][victim]
        for p, lin in sorted(ins, key=lambda e: e[0]):
            for q, lout in sorted(outs, key=lambda e: e[0]):
                add(p, q, cat(lin, mid, lout))
        edges.pop(victim, None)

    return edges.get(src, {}).get(snk, Empty())
