"""The synthesis front half: formula summaries per (parity state, nonterminal),
their Kleene iterate history, the extension with target nonterminals, and the
reduction to a finite parity game.

The equation system assigns every pair (q, X) a positive Boolean formula
describing the effects of the finite plays from X read against the parity
automaton started in q: prover-owned nonterminals combine their rules by
conjunction, refuter-owned ones by disjunction.  Iterates start at FALSE and
ascend under implication; the full history is kept (as per-round change
lists) because refuter strategies descend through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .automata import DPA, validate_dpa
from .formulas import (
    FALSE,
    Cnf,
    attach_nonterminal,
    cnf,
    compose_family,
    conj_all,
    disj_all,
    implies,
)
from .grammar import PROVER, REFUTER, Grammar, SententialForm, validate
from .paritygame import ParityGameSpec

VarKey = tuple[str, str]  # (dpa state, nonterminal)


class LspGuardError(RuntimeError):
    """A structural iteration ceiling was exceeded; indicates a solver bug."""


@dataclass
class LspSystem:
    grammar: Grammar
    dpa: DPA
    rounds: list[dict[VarKey, Cnf]]  # per-round change lists; round 0 is all-FALSE
    stats: dict
    _level_cache: dict[int, dict[VarKey, Cnf]] = field(default_factory=dict, repr=False)

    @property
    def fixpoint_level(self) -> int:
        return len(self.rounds) - 1

    def at_level(self, level: int) -> dict[VarKey, Cnf]:
        """Reconstruct the solution of the given Kleene round."""
        level = min(level, self.fixpoint_level)
        if level not in self._level_cache:
            sol: dict[VarKey, Cnf] = {}
            for rnd in self.rounds[: level + 1]:
                sol.update(rnd)
            self._level_cache[level] = sol
        return self._level_cache[level]

    @property
    def solution(self) -> dict[VarKey, Cnf]:
        return self.at_level(self.fixpoint_level)


def formula_of_symbol(d: DPA, q: str, s: str | None) -> Cnf:
    """Formula of one terminal (or None for epsilon) read from state q.

    A terminal maps to the singleton atom (successor, max of the endpoint
    priorities); epsilon maps to (q, 0), deliberately priority zero so that
    deriving only empty words never produces a significant priority.
    """
    if s is None:
        return cnf([[(q, 0)]])
    p = d.delta[(q, s)]
    return cnf([[(p, max(d.priority[q], d.priority[p]))]])


def _formula_fold(
    g: Grammar,
    d: DPA,
    q: str,
    alpha: SententialForm,
    entry,
) -> Cnf:
    """Left fold of the composition over a sentential form; entry(p, sym)
    supplies the formula of a symbol from state p."""
    if not alpha:
        return formula_of_symbol(d, q, None)
    acc = entry(q, alpha[0])
    for sym in alpha[1:]:
        fam = {p: entry(p, sym) for p in d.states}
        acc = compose_family(acc, fam)
    return acc


def formula_of_sentential(
    sys: LspSystem, q: str, alpha: SententialForm, level: int | None = None
) -> Cnf:
    """Formula of a sentential form, reading nonterminal entries from the
    requested iterate (None = the fixpoint)."""
    sol = sys.solution if level is None else sys.at_level(level)

    def entry(p: str, sym: str) -> Cnf:
        if sys.grammar.is_nonterminal(sym):
            return sol[(p, sym)]
        return formula_of_symbol(sys.dpa, p, sym)

    return _formula_fold(sys.grammar, sys.dpa, q, alpha, entry)


def formula_at_levels(
    sys: LspSystem, q: str, alpha: SententialForm, levels: Sequence[int]
) -> Cnf:
    """Formula of a sentential form with a per-symbol iteration level, as
    needed by descending refuter strategies.  Terminal entries ignore their
    level."""
    if len(levels) != len(alpha):
        raise ValueError("levels must align with the sentential form")
    if not alpha:
        return formula_of_symbol(sys.dpa, q, None)
    per_symbol = list(zip(alpha, levels))

    acc = None
    for i, (sym, lvl) in enumerate(per_symbol):
        def entry(p: str, sym=sym, lvl=lvl) -> Cnf:
            if sys.grammar.is_nonterminal(sym):
                return sys.at_level(lvl)[(p, sym)]
            return formula_of_symbol(sys.dpa, p, sym)

        if i == 0:
            acc = entry(q)
        else:
            fam = {p: entry(p) for p in sys.dpa.states}
            acc = compose_family(acc, fam)
    return acc


def solve_lsp_system(g: Grammar, d: DPA, *, round_cap: int | None = None) -> LspSystem:
    """Least fixpoint of the formula equation system, with iterate history.

    Stops once a round leaves every component implication-equivalent to the
    previous one; since formulas are kept canonical this is an equality test.
    Structural guards bound the round count and each component's strict
    ascent by the lattice height.
    """
    problems = validate(g)
    if problems:
        raise ValueError("invalid grammar: " + "; ".join(problems))
    if g.ownership is None:
        raise ValueError("the synthesis solver needs an ownership partition")
    problems = validate_dpa(d)
    if problems:
        raise ValueError("invalid parity automaton: " + "; ".join(problems))
    missing = set(g.terminals) - set(d.alphabet)
    if missing:
        raise ValueError(f"parity automaton alphabet misses terminals: {sorted(missing)}")

    n_atoms = len(d.states) * (d.max_priority + 1)
    chain_bound = 2 ** n_atoms
    bound = round_cap if round_cap is not None else len(g.nonterminals) * len(d.states) * chain_bound + 2

    keys = [(q, x) for q in d.states for x in g.nonterminals]
    current: dict[VarKey, Cnf] = {k: FALSE for k in keys}
    rounds: list[dict[VarKey, Cnf]] = [dict(current)]
    changes_per_var: dict[VarKey, int] = {k: 0 for k in keys}

    def entry_factory(sol):
        def entry(p: str, sym: str) -> Cnf:
            if g.is_nonterminal(sym):
                return sol[(p, sym)]
            return formula_of_symbol(d, p, sym)

        return entry

    while True:
        entry = entry_factory(current)
        delta: dict[VarKey, Cnf] = {}
        for (q, x) in keys:
            pieces = [
                _formula_fold(g, d, q, r.rhs, entry) for r in g.rules_for(x)
            ]
            new = conj_all(pieces) if g.owner(x) == PROVER else disj_all(pieces)
            if new != current[(q, x)]:
                if not implies(current[(q, x)], new):
                    raise LspGuardError(f"non-monotone update for {(q, x)}")
                delta[(q, x)] = new
        if not delta:
            break
        for k, v in delta.items():
            changes_per_var[k] += 1
            if changes_per_var[k] > chain_bound:
                raise LspGuardError(
                    f"implication chain for {k} exceeded 2^{n_atoms} strict steps"
                )
        rounds.append(delta)
        current = {**current, **delta}
        if len(rounds) > bound:
            raise LspGuardError(f"round count exceeded the bound {bound}")

    stats = {
        "rounds": len(rounds) - 1,
        "round_bound": bound,
        "atoms": n_atoms,
        "chain_bound": chain_bound,
        "max_component_changes": max(changes_per_var.values(), default=0),
    }
    return LspSystem(grammar=g, dpa=d, rounds=rounds, stats=stats)


def extend_solution(sys: LspSystem) -> dict[VarKey, Cnf]:
    """Per (q, X): combine, over the rules X -> eta Y with a rightmost
    nonterminal, the formula of eta with Y attached to every atom; FALSE when
    no such rule exists (prover then wins from X regardless of its owner)."""
    g = sys.grammar
    esol: dict[VarKey, Cnf] = {}
    for q in sys.dpa.states:
        for x in g.nonterminals:
            pieces = []
            for r in g.rules_for(x):
                if r.rhs and g.is_nonterminal(r.rhs[-1]):
                    eta, y = r.rhs[:-1], r.rhs[-1]
                    pieces.append(attach_nonterminal(formula_of_sentential(sys, q, eta), y))
            if not pieces:
                esol[(q, x)] = FALSE
            elif g.owner(x) == PROVER:
                esol[(q, x)] = conj_all(pieces)
            else:
                esol[(q, x)] = disj_all(pieces)
    return esol


def build_parity_game(sys: LspSystem, esol: dict[VarKey, Cnf]) -> ParityGameSpec:
    """The finite parity game over formula, clause, and helper vertices,
    restricted to what is reachable from the initial formula vertex.

    Formula vertices (q, X) belong to prover and pick a clause; clause and
    helper vertices belong to refuter.  Only helper vertices carry a nonzero
    priority, namely the priority of their atom.  An empty clause (the
    formula was FALSE) self-loops at priority zero, which makes it winning
    for prover.
    """
    owner: dict = {}
    priority: dict = {}
    succ: dict = {}
    initial = ("f", sys.dpa.initial, sys.grammar.start)
    queue = [initial]
    while queue:
        v = queue.pop()
        if v in owner:
            continue
        kind = v[0]
        if kind == "f":
            _, q, x = v
            owner[v] = PROVER
            priority[v] = 0
            outs = []
            for k in esol[(q, x)].clauses:
                outs.append(("c", q, x, k))
            succ[v] = tuple(outs)
            queue.extend(outs)
        elif kind == "c":
            _, q, x, k = v
            owner[v] = REFUTER
            priority[v] = 0
            if not k:
                succ[v] = (v,)
            else:
                outs = [("h", q, x, k, atom) for atom in k]
                succ[v] = tuple(outs)
                queue.extend(outs)
        else:
            _, q, x, k, atom = v
            p, i, y = atom
            owner[v] = REFUTER
            priority[v] = i
            tgt = ("f", p, y)
            succ[v] = (tgt,)
            queue.append(tgt)
    return ParityGameSpec(owner=owner, priority=priority, succ=succ, initial=initial)


def dump_parity_game(pg: ParityGameSpec) -> str:
    """Stable textual dump: vertex lines then edge lines."""
    ids = {v: i for i, v in enumerate(pg.owner)}
    lines = []
    for v, i in ids.items():
        tag = "P" if pg.owner[v] == PROVER else "R"
        lines.append(f"vertex {i} owner {tag} prio {pg.priority[v]}  # {v!r}")
    for v in ids:
        for w in pg.succ[v]:
            lines.append(f"edge {ids[v]} {ids[w]}")
    return "\n".join(lines) + "\n"


def parity_game_json(pg: ParityGameSpec) -> dict:
    ids = {v: i for i, v in enumerate(pg.owner)}
    return {
        "vertices": [
            {"id": ids[v], "owner": pg.owner[v], "priority": pg.priority[v], "label": repr(v)}
            for v in ids
        ],
        "edges": [[ids[v], ids[w]] for v in ids for w in pg.succ[v]],
        "initial": ids.get(pg.initial),
    }
