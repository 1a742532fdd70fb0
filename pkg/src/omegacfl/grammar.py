"""Context-free grammars, plain and ownership-partitioned, and their rewrite graph.

Symbols are plain interned strings; a grammar classifies each name as terminal
or nonterminal, and the two name spaces must be disjoint.  The empty right-hand
side represents epsilon (never a dedicated symbol).  Right-infinite derivations
of a grammar correspond to infinite paths in its rewrite graph, which has one
edge per rule whose right-hand side ends in a nonterminal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

PROVER = "prover"
REFUTER = "refuter"

Word = tuple[str, ...]
SententialForm = tuple[str, ...]

# Comment marker: a '#' at line start or after whitespace.  Symbol names that
# begin with '#' are escaped as '\#' on disk so they survive round trips.
_COMMENT_RE = re.compile(r"(^|\s)#.*$")


class GrammarFormatError(ValueError):
    """Malformed grammar text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: SententialForm

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(self.rhs)}".rstrip()


@dataclass(frozen=True)
class OmegaEdge:
    src: str
    label: SententialForm
    dst: str


@dataclass(frozen=True)
class OmegaGraph:
    vertices: tuple[str, ...]
    edges: tuple[OmegaEdge, ...]

    def edges_from(self, x: str) -> tuple[OmegaEdge, ...]:
        return tuple(e for e in self.edges if e.src == x)


@dataclass(frozen=True, eq=False)
class Grammar:
    """A context-free grammar, optionally with a prover/refuter ownership map.

    Immutable after construction; the ownership map, when present, must be
    total on the nonterminals.
    """

    nonterminals: tuple[str, ...]
    terminals: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: str
    ownership: dict[str, str] | None = None

    @cached_property
    def nt_set(self) -> frozenset[str]:
        return frozenset(self.nonterminals)

    @cached_property
    def t_set(self) -> frozenset[str]:
        return frozenset(self.terminals)

    @cached_property
    def rules_by_lhs(self) -> dict[str, tuple[Rule, ...]]:
        out: dict[str, list[Rule]] = {x: [] for x in self.nonterminals}
        for r in self.rules:
            out.setdefault(r.lhs, []).append(r)
        return {x: tuple(rs) for x, rs in out.items()}

    def rules_for(self, x: str) -> tuple[Rule, ...]:
        return self.rules_by_lhs.get(x, ())

    def is_terminal(self, sym: str) -> bool:
        return sym in self.t_set

    def is_nonterminal(self, sym: str) -> bool:
        return sym in self.nt_set

    def owner(self, x: str) -> str:
        if self.ownership is None:
            raise ValueError("grammar carries no ownership partition")
        return self.ownership[x]


def make_grammar(
    nonterminals: Iterable[str],
    terminals: Iterable[str],
    rules: Iterable[tuple[str, Sequence[str]]],
    start: str,
    ownership: dict[str, str] | None = None,
) -> Grammar:
    """Convenience constructor taking rules as (lhs, rhs-sequence) pairs."""
    return Grammar(
        nonterminals=tuple(dict.fromkeys(nonterminals)),
        terminals=tuple(dict.fromkeys(terminals)),
        rules=tuple(Rule(lhs, tuple(rhs)) for lhs, rhs in rules),
        start=start,
        ownership=dict(ownership) if ownership is not None else None,
    )


def terminal_prefix(g: Grammar, form: SententialForm) -> Word:
    """Longest prefix of terminals of a sentential form."""
    out = []
    for sym in form:
        if not g.is_terminal(sym):
            break
        out.append(sym)
    return tuple(out)


def leftmost_nonterminal(g: Grammar, form: SententialForm) -> int | None:
    """Index of the leftmost nonterminal, or None for a terminal word."""
    for i, sym in enumerate(form):
        if g.is_nonterminal(sym):
            return i
    return None


def validate(g: Grammar) -> list[str]:
    """Check grammar well-formedness; returns a list of violations (empty = ok)."""
    violations = []
    overlap = g.nt_set & g.t_set
    if overlap:
        violations.append(f"names used as both terminal and nonterminal: {sorted(overlap)}")
    if g.start not in g.nt_set:
        violations.append(f"start symbol {g.start!r} is not a declared nonterminal")
    with_rules = {r.lhs for r in g.rules}
    for x in g.nonterminals:
        if x not in with_rules:
            violations.append(f"no rule for nonterminal {x!r}")
    for r in g.rules:
        if r.lhs not in g.nt_set:
            violations.append(f"rule lhs {r.lhs!r} is not a declared nonterminal")
        for sym in r.rhs:
            if sym not in g.nt_set and sym not in g.t_set:
                violations.append(f"undeclared symbol {sym!r} in rule {r}")
    if g.ownership is not None:
        missing = g.nt_set - set(g.ownership)
        if missing:
            violations.append(f"ownership missing for nonterminals: {sorted(missing)}")
        for x, o in g.ownership.items():
            if o not in (PROVER, REFUTER):
                violations.append(f"unknown owner {o!r} for {x!r}")
            if x not in g.nt_set:
                violations.append(f"ownership declared for unknown symbol {x!r}")
    return violations


def omega_graph(g: Grammar) -> OmegaGraph:
    """One edge (X, alpha, Y) per rule X -> alpha Y with a rightmost nonterminal."""
    edges = []
    for r in g.rules:
        if r.rhs and g.is_nonterminal(r.rhs[-1]):
            edges.append(OmegaEdge(r.lhs, r.rhs[:-1], r.rhs[-1]))
    return OmegaGraph(vertices=g.nonterminals, edges=tuple(edges))


def _fresh_name(base: str, used: set[str]) -> str:
    """Deterministic renaming: suffix with the smallest unused natural number."""
    if base not in used:
        return base
    k = 1
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def grammar_from_union(parts: Sequence[tuple[Grammar, Grammar]]) -> Grammar:
    """Combine pairs (V_i, U_i) into a grammar whose infinite-word language is
    the union of V_i U_i^omega.

    A fresh start symbol S gets one rule S -> S_{V_i} R_i per pair, and each
    fresh R_i loops via R_i -> S_{U_i} R_i.  Nonterminals of the input
    grammars are renamed apart where they collide.
    """
    if not parts:
        raise ValueError("need at least one (V, U) pair")
    used: set[str] = set()
    terminals: list[str] = []
    for v, u in parts:
        for t in (*v.terminals, *u.terminals):
            if t not in terminals:
                terminals.append(t)
    used.update(terminals)

    renamed: list[tuple[dict[str, str], dict[str, str]]] = []
    for v, u in parts:
        maps = []
        for part in (v, u):
            m = {}
            for x in part.nonterminals:
                fresh = _fresh_name(x, used)
                used.add(fresh)
                m[x] = fresh
            maps.append(m)
        renamed.append((maps[0], maps[1]))

    start = _fresh_name("S", used)
    used.add(start)
    loops = []
    for i in range(len(parts)):
        r = _fresh_name(f"R{i + 1}", used)
        used.add(r)
        loops.append(r)

    nonterminals = [start, *loops]
    rules: list[tuple[str, Sequence[str]]] = []
    for i, ((v, u), (vmap, umap)) in enumerate(zip(parts, renamed)):
        rules.append((start, (vmap[v.start], loops[i])))
        rules.append((loops[i], (umap[u.start], loops[i])))
    for (v, u), (vmap, umap) in zip(parts, renamed):
        for part, m in ((v, vmap), (u, umap)):
            nonterminals.extend(m[x] for x in part.nonterminals)
            for r in part.rules:
                rules.append((m[r.lhs], tuple(m.get(s, s) for s in r.rhs)))
    return make_grammar(nonterminals, terminals, rules, start)


def lift_finite_game(g: Grammar, a):
    """Turn a finite-word game instance into an infinite-word one.

    The grammar gains a fresh start that appends an endless stream of a fresh
    padding terminal after the original derivation; the automaton gains a
    single fresh final state that is entered by copying every transition into
    an old final state and then loops on the padding terminal.  On samples,
    the lifted grammar derives exactly the original finite words followed by
    padding.
    """
    from . import automata  # local import to avoid a cycle

    pad = "#"
    while pad in g.t_set or pad in g.nt_set:
        pad += "'"
    used = set(g.nonterminals) | set(g.terminals) | {pad}
    s_inf = _fresh_name("S_omega", used)
    used.add(s_inf)
    h_inf = _fresh_name("H_omega", used)

    ownership = None
    if g.ownership is not None:
        # Both fresh symbols have a single rule, so either owner is sound.
        ownership = {**g.ownership, s_inf: REFUTER, h_inf: REFUTER}
    lifted_g = make_grammar(
        nonterminals=(*g.nonterminals, s_inf, h_inf),
        terminals=(*g.terminals, pad),
        rules=[(r.lhs, r.rhs) for r in g.rules]
        + [(s_inf, (g.start, h_inf)), (h_inf, (pad, h_inf))],
        start=s_inf,
        ownership=ownership,
    )

    used_states = set(a.states)
    q_inf = _fresh_name("q_omega", used_states)
    transitions = set(a.transitions)
    for (q, c, q2) in a.transitions:
        if q2 in a.finals:
            transitions.add((q, c, q_inf))
    transitions.add((q_inf, pad, q_inf))
    lifted_a = automata.NBA(
        states=(*a.states, q_inf),
        alphabet=(*a.alphabet, pad),
        initial=a.initial,
        finals=frozenset({q_inf}),
        transitions=frozenset(transitions),
    )
    return lifted_g, lifted_a


# ---------------------------------------------------------------------------
# Text format

def strip_comment(line: str) -> str:
    return _COMMENT_RE.sub(lambda m: m.group(1), line)


def unescape_token(tok: str) -> str:
    return tok[1:] if tok.startswith("\\") else tok


def escape_token(name: str) -> str:
    return "\\" + name if name.startswith("#") else name


def parse_grammar(text: str) -> Grammar:
    nonterminals: list[str] = []
    terminals: list[str] = []
    rules: list[tuple[str, tuple[str, ...]]] = []
    ownership: dict[str, str] = {}
    start: str | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw).strip()
        if not line:
            continue
        toks = [unescape_token(t) for t in line.split()]
        head = toks[0]
        if head == "nonterminals":
            nonterminals.extend(t for t in toks[1:] if t not in nonterminals)
        elif head == "terminals":
            terminals.extend(t for t in toks[1:] if t not in terminals)
        elif head == "start":
            if len(toks) != 2:
                raise GrammarFormatError("start expects exactly one symbol", lineno)
            start = toks[1]
        elif head == "owner":
            if len(toks) < 3 or toks[1] not in (PROVER, REFUTER):
                raise GrammarFormatError("owner expects 'prover'|'refuter' and symbols", lineno)
            for sym in toks[2:]:
                ownership[sym] = toks[1]
        elif len(toks) >= 2 and toks[1] == "->":
            rules.append((head, tuple(toks[2:])))
        else:
            raise GrammarFormatError(f"cannot parse {raw.strip()!r}", lineno)

    if start is None:
        raise GrammarFormatError("missing 'start' declaration")
    g = make_grammar(nonterminals, terminals, rules, start, ownership or None)
    problems = validate(g)
    if problems:
        raise GrammarFormatError("; ".join(problems))
    return g


def format_grammar(g: Grammar) -> str:
    lines = [
        "nonterminals " + " ".join(escape_token(x) for x in g.nonterminals),
        "terminals " + " ".join(escape_token(t) for t in g.terminals),
        f"start {escape_token(g.start)}",
    ]
    if g.ownership is not None:
        for x in g.nonterminals:
            lines.append(f"owner {g.ownership[x]} {escape_token(x)}")
    for r in g.rules:
        rhs = " ".join(escape_token(s) for s in r.rhs)
        lines.append(f"{escape_token(r.lhs)} -> {rhs}".rstrip())
    return "\n".join(lines) + "\n"
