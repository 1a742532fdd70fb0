"""Lifting parity-game strategies to executable strategies on the grammar
game, and simulating plays segment by segment.

A play is cut at anchor positions wY (a terminal prefix followed by a single
nonterminal).  Between anchors the winning player steers the finite part:
prover tracks a clause of the current position's formula that only ever
shrinks; refuter tracks a choice function together with a sequence of
iteration levels that strictly descends in a well-founded order, which forces
her segments to terminate.  Each finished segment reports the emitted word's
effect atom (next parity state, max priority, next anchor nonterminal), and
the sequence of those priorities is what the parity game reasons about.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .automata import NBA, DPA, dpa_step
from .determinize import determinize
from .formulas import Atom, Clause, Cnf, cnf, compose_family
from .grammar import PROVER, REFUTER, Grammar, Rule, SententialForm, Word
from .lsp import (
    LspSystem,
    build_parity_game,
    extend_solution,
    formula_at_levels,
    formula_of_symbol,
    solve_lsp_system,
)
from .paritygame import ParityGameSpec, Solution, solve


class StrategyInvariantError(RuntimeError):
    """A lemma-backed step failed; signals a solver bug, not a user error."""


def level_less(v: Sequence[int], w: Sequence[int]) -> bool:
    """The well-founded order on level sequences: v < w iff w = x i z with
    i > 0 and v = x y z where every entry of y is strictly below i."""
    v = tuple(v)
    w = tuple(w)
    for j, i in enumerate(w):
        if i <= 0:
            continue
        x, z = w[:j], w[j + 1 :]
        if len(v) < len(x) + len(z):
            continue
        if v[: len(x)] != x:
            continue
        if len(z) and v[len(v) - len(z) :] != z:
            continue
        y = v[len(x) : len(v) - len(z)] if len(z) else v[len(x) :]
        if all(e < i for e in y):
            return True
    return False


# ---------------------------------------------------------------------------
# Synthesized strategies


@dataclass
class SynthesizedStrategy:
    winner: str
    grammar: Grammar
    dpa: DPA
    system: LspSystem
    esol: dict[tuple[str, str], Cnf]
    game: ParityGameSpec
    solution: Solution
    prover_clause: dict[tuple[str, str], Clause]
    refuter_choice: dict[tuple[str, str], dict[Clause, Atom]]


def synthesize_from_dpa(g: Grammar, d: DPA) -> SynthesizedStrategy:
    """Solve the game for a grammar against an already deterministic parity
    automaton and read off the action tables."""
    system = solve_lsp_system(g, d)
    esol = extend_solution(system)
    game = build_parity_game(system, esol)
    solution = solve(game)
    winner = solution.winner_from(game.initial)

    prover_clause: dict[tuple[str, str], Clause] = {}
    refuter_choice: dict[tuple[str, str], dict[Clause, Atom]] = {}
    for v in game.owner:
        if v[0] != "f":
            continue
        _, q, x = v
        if v in solution.win_prover:
            tgt = solution.strat_prover.get(v)
            if tgt is not None:
                prover_clause[(q, x)] = tgt[3]
        else:
            choice: dict[Clause, Atom] = {}
            for k in esol[(q, x)].clauses:
                cv = ("c", q, x, k)
                helper = solution.strat_refuter.get(cv)
                if helper is not None and helper[0] == "h":
                    choice[k] = helper[4]
            refuter_choice[(q, x)] = choice
    return SynthesizedStrategy(
        winner=winner,
        grammar=g,
        dpa=d,
        system=system,
        esol=esol,
        game=game,
        solution=solution,
        prover_clause=prover_clause,
        refuter_choice=refuter_choice,
    )


def synthesize(g: Grammar, a: NBA, *, state_cap: int = 100_000) -> SynthesizedStrategy:
    """Full pipeline: determinize, solve the formula system, extend, build
    and solve the parity game."""
    report = determinize(a, state_cap=state_cap)
    return synthesize_from_dpa(g, report.dpa)


# ---------------------------------------------------------------------------
# Adversary policies


AdversaryPolicy = Callable[[SententialForm, Sequence[Rule]], Rule]


def make_adversary(kind, seed: int | None = None) -> AdversaryPolicy:
    """Adversary policies: 'random' (seeded), 'first', or a scripted list of
    rule indices (consumed one per move, falling back to the first rule)."""
    if kind == "first":
        return lambda form, legal: legal[0]
    if kind == "random":
        rng = random.Random(seed)
        return lambda form, legal: legal[rng.randrange(len(legal))]
    if isinstance(kind, (list, tuple)):
        script = list(kind)

        def scripted(form, legal):
            if script:
                i = script.pop(0)
                return legal[i % len(legal)]
            return legal[0]

        return scripted
    raise ValueError(f"unknown adversary policy {kind!r}")


# ---------------------------------------------------------------------------
# Segment machinery


@dataclass
class ProverSegmentState:
    """Prover's bookkeeping inside one segment: the clause of the formula of
    the emitted word plus the pending form, which may only shrink."""

    q0: str
    eff: Atom  # effect atom of the emitted word, starting at (q0, 0)
    form: SententialForm  # pending part, trailing anchor nonterminal excluded
    target: str
    clause: Clause
    emitted: Word = ()
    rules: list[Rule] = field(default_factory=list)


@dataclass
class RefuterSegmentState:
    """Refuter's bookkeeping: a choice function on the formula at the current
    levels; the level sequence strictly descends in the well-founded order."""

    q0: str
    eff: Atom
    form: SententialForm
    target: str
    levels: tuple[int, ...]
    choice: dict[Clause, Atom]
    emitted: Word = ()
    rules: list[Rule] = field(default_factory=list)


def _advance_eff(d: DPA, eff: Atom, letters: Word) -> Atom:
    p, i = eff
    for a in letters:
        p2 = d.delta[(p, a)]
        i = max(i, d.priority[p], d.priority[p2])
        p = p2
    return (p, i)


def _normalize(
    d: DPA, g: Grammar, eff: Atom, form: SententialForm
) -> tuple[Atom, SententialForm, Word]:
    """Move the terminal prefix of the form into the effect atom."""
    k = 0
    while k < len(form) and g.is_terminal(form[k]):
        k += 1
    emitted = form[:k]
    return _advance_eff(d, eff, emitted), form[k:], emitted


def _formula_from_eff(sys: LspSystem, eff: Atom, form: SententialForm, levels=None) -> Cnf:
    """Formula of (emitted word, pending form): fold the form on top of the
    singleton effect atom; identical to folding the whole position at once."""
    acc = cnf([[eff]])
    for j, sym in enumerate(form):
        if sys.grammar.is_nonterminal(sym):
            sol = sys.solution if levels is None else sys.at_level(levels[j])
            fam = {p: sol[(p, sym)] for p in sys.dpa.states}
        else:
            fam = {p: formula_of_symbol(sys.dpa, p, sym) for p in sys.dpa.states}
        acc = compose_family(acc, fam)
    return acc


def _sub_clause(f: Cnf, k: Clause) -> Clause | None:
    ks = set(k)
    for cand in f.clauses:
        if set(cand) <= ks:
            return cand
    return None


def _refine_choice(f: Cnf, image: frozenset[Atom]) -> dict[Clause, Atom] | None:
    """Choice function on f whose image stays inside the given atom set, if
    one exists; per clause the smallest admissible atom is taken."""
    out: dict[Clause, Atom] = {}
    for k in f.clauses:
        picks = [a for a in k if a in image]
        if not picks:
            return None
        out[k] = min(picks)
    return out


def prover_segment_step(
    strat: SynthesizedStrategy, st: ProverSegmentState, rule: Rule | None
) -> ProverSegmentState:
    """One derivation step inside a prover segment.  When rule is None the
    leftmost nonterminal is prover's and a rule admitting a sub-clause is
    chosen; otherwise the adversary's rule is applied and the tracked clause
    is refined.  Failure of either search is an invariant violation."""
    g = strat.grammar
    idx = next((i for i, s in enumerate(st.form) if g.is_nonterminal(s)), None)
    if idx is None:
        raise StrategyInvariantError("segment step on a terminal-only form")
    x = st.form[idx]

    def apply(r: Rule) -> tuple[Atom, SententialForm, Word]:
        new_form = st.form[:idx] + r.rhs + st.form[idx + 1 :]
        return _normalize(strat.dpa, g, st.eff, new_form)

    candidates = g.rules_for(x) if rule is None else (rule,)
    for r in candidates:
        eff2, form2, emitted = apply(r)
        f2 = _formula_from_eff(strat.system, eff2, form2)
        k2 = _sub_clause(f2, st.clause)
        if k2 is not None:
            return ProverSegmentState(
                q0=st.q0,
                eff=eff2,
                form=form2,
                target=st.target,
                clause=k2,
                emitted=st.emitted + emitted,
                rules=st.rules + [r],
            )
    raise StrategyInvariantError(f"no sub-clause refinement at {x!r} (clause {st.clause})")


def refuter_segment_step(
    strat: SynthesizedStrategy, st: RefuterSegmentState, rule: Rule | None
) -> RefuterSegmentState:
    """One derivation step inside a refuter segment.  Replacement symbols get
    the replaced symbol's level minus one, so the level sequence strictly
    descends; the choice function is refined to the new formula."""
    g = strat.grammar
    idx = next((i for i, s in enumerate(st.form) if g.is_nonterminal(s)), None)
    if idx is None:
        raise StrategyInvariantError("segment step on a terminal-only form")
    x = st.form[idx]
    lvl = st.levels[idx]
    if lvl <= 0:
        raise StrategyInvariantError(f"nonterminal {x!r} at level 0 with a pending choice")
    image = frozenset(st.choice.values())

    def apply(r: Rule):
        new_form = st.form[:idx] + r.rhs + st.form[idx + 1 :]
        new_levels = st.levels[:idx] + (lvl - 1,) * len(r.rhs) + st.levels[idx + 1 :]
        if not level_less(new_levels, st.levels):
            raise StrategyInvariantError("levels failed to descend")
        # normalize while keeping levels aligned with the pending form
        k = 0
        while k < len(new_form) and g.is_terminal(new_form[k]):
            k += 1
        eff2 = _advance_eff(strat.dpa, st.eff, new_form[:k])
        return eff2, new_form[k:], new_levels[k:], new_form[:k]

    candidates = g.rules_for(x) if rule is None else (rule,)
    for r in candidates:
        eff2, form2, levels2, emitted = apply(r)
        f2 = _formula_from_eff(strat.system, eff2, form2, levels2)
        choice2 = _refine_choice(f2, image)
        if choice2 is not None:
            return RefuterSegmentState(
                q0=st.q0,
                eff=eff2,
                form=form2,
                target=st.target,
                levels=levels2,
                choice=choice2,
                emitted=st.emitted + emitted,
                rules=st.rules + [r],
            )
    raise StrategyInvariantError(f"no refining rule at {x!r} (image {sorted(image)})")


# ---------------------------------------------------------------------------
# Play simulation


@dataclass
class Segment:
    rules: list[Rule]
    emitted: Word
    state: str
    priority: int
    target: str | None
    terminated: bool


@dataclass
class PlayTrace:
    winner: str
    segments: list[Segment]
    outcome: str  # 'segments-exhausted' | 'prover-wins-deadlock' | 'prover-wins-infinite-segment'
    window: int
    window_max: int | None
    all_segments_terminated: bool

    def to_json(self) -> dict:
        return {
            "winner": self.winner,
            "outcome": self.outcome,
            "window": self.window,
            "window_max": self.window_max,
            "all_segments_terminated": self.all_segments_terminated,
            "segments": [
                {
                    "rules": [str(r) for r in s.rules],
                    "emitted": list(s.emitted),
                    "state": s.state,
                    "priority": s.priority,
                    "target": s.target,
                    "terminated": s.terminated,
                }
                for s in self.segments
            ],
        }


def _anchor_rules(g: Grammar, x: str) -> tuple[Rule, ...]:
    """At an anchor only rules with a rightmost nonterminal are playable."""
    return tuple(r for r in g.rules_for(x) if r.rhs and g.is_nonterminal(r.rhs[-1]))


def _start_prover_segment(
    strat: SynthesizedStrategy, q: str, x: str, adversary: AdversaryPolicy
) -> ProverSegmentState | None:
    """Resolve the anchor move for a prover-winning play; returns None when
    the anchor deadlocks (no rule keeps the derivation right-infinite)."""
    g = strat.grammar
    legal = _anchor_rules(g, x)
    if not legal:
        return None
    k_ext = strat.prover_clause.get((q, x))
    if k_ext is None:
        raise StrategyInvariantError(f"prover has no clause at anchor ({q}, {x})")

    def seed(r: Rule) -> ProverSegmentState | None:
        eta, y = r.rhs[:-1], r.rhs[-1]
        wanted = set(k_ext)
        eff2, form2, emitted = _normalize(strat.dpa, g, (q, 0), eta)
        f2 = _formula_from_eff(strat.system, eff2, form2)
        for cand in f2.clauses:
            if {(a[0], a[1], y) for a in cand} <= wanted:
                return ProverSegmentState(
                    q0=q, eff=eff2, form=form2, target=y, clause=cand,
                    emitted=emitted, rules=[r],
                )
        return None

    if g.owner(x) == PROVER:
        for r in legal:
            st = seed(r)
            if st is not None:
                return st
        raise StrategyInvariantError(f"prover cannot realize clause {k_ext} at ({q}, {x})")
    r = adversary(tuple([x]), legal)
    st = seed(r)
    if st is None:
        raise StrategyInvariantError(f"no clause refinement after adversary rule {r}")
    return st


def _start_refuter_segment(
    strat: SynthesizedStrategy, q: str, x: str, adversary: AdversaryPolicy
) -> RefuterSegmentState | None:
    g = strat.grammar
    legal = _anchor_rules(g, x)
    if not legal:
        return None
    choice_ext = strat.refuter_choice.get((q, x))
    if choice_ext is None:
        raise StrategyInvariantError(f"refuter has no choice function at anchor ({q}, {x})")
    image_ext = frozenset(choice_ext.values())
    i0 = strat.system.fixpoint_level

    def seed(r: Rule) -> RefuterSegmentState | None:
        eta, y = r.rhs[:-1], r.rhs[-1]
        allowed = frozenset((a[0], a[1]) for a in image_ext if a[2] == y)
        eff2, form2, emitted = _normalize(strat.dpa, g, (q, 0), eta)
        levels2 = (i0,) * len(form2)
        f2 = _formula_from_eff(strat.system, eff2, form2, levels2)
        choice2 = _refine_choice(f2, allowed)
        if choice2 is None:
            return None
        return RefuterSegmentState(
            q0=q, eff=eff2, form=form2, target=y, levels=levels2,
            choice=choice2, emitted=emitted, rules=[r],
        )

    if g.owner(x) == REFUTER:
        for r in legal:
            st = seed(r)
            if st is not None:
                return st
        raise StrategyInvariantError(f"refuter finds no admissible anchor rule at ({q}, {x})")
    r = adversary(tuple([x]), legal)
    st = seed(r)
    if st is None:
        raise StrategyInvariantError(f"no choice refinement after adversary rule {r}")
    return st


def simulate(
    strat: SynthesizedStrategy,
    adversary: AdversaryPolicy,
    max_segments: int,
    *,
    segment_budget: int = 2000,
) -> PlayTrace:
    """Alternate segments from anchor to anchor for the winner's side, with
    the adversary playing the opponent's moves.

    A refuter segment must terminate within its budget (its level sequence is
    well founded); exceeding it raises.  A prover segment exceeding the
    budget means prover forces an infinite play without further anchors and
    wins by definition.  After the last segment the maximum priority over a
    trailing window of segments approximates the priority seen infinitely
    often; the window size is the parity game's vertex count, enough to cover
    any cycle of positional play.
    """
    g = strat.grammar
    d = strat.dpa
    segments: list[Segment] = []
    outcome = "segments-exhausted"
    q = d.initial
    x = g.start
    prover_side = strat.winner == PROVER

    for _ in range(max_segments):
        st = (
            _start_prover_segment(strat, q, x, adversary)
            if prover_side
            else _start_refuter_segment(strat, q, x, adversary)
        )
        if st is None:
            outcome = "prover-wins-deadlock"
            break
        steps = 0
        infinite = False
        while st.form:
            idx = next(i for i, s in enumerate(st.form) if g.is_nonterminal(s))
            owner = g.owner(st.form[idx])
            if prover_side:
                rule = None if owner == PROVER else adversary(st.form, g.rules_for(st.form[idx]))
                st = prover_segment_step(strat, st, rule)
            else:
                rule = None if owner == REFUTER else adversary(st.form, g.rules_for(st.form[idx]))
                st = refuter_segment_step(strat, st, rule)
            steps += 1
            if steps > segment_budget:
                if prover_side:
                    outcome = "prover-wins-infinite-segment"
                    infinite = True
                    break
                raise StrategyInvariantError(
                    f"refuter segment exceeded its budget of {segment_budget} steps"
                )
        if infinite:
            segments.append(
                Segment(rules=st.rules, emitted=st.emitted, state=st.eff[0],
                        priority=st.eff[1], target=None, terminated=False)
            )
            break
        # segment complete: the effect atom is the recorded summary
        p, i = st.eff
        if prover_side:
            if (p, i) not in set(st.clause):
                raise StrategyInvariantError("terminal effect escaped the tracked clause")
        else:
            img = set(st.choice.values())
            if (p, i) not in img:
                raise StrategyInvariantError("terminal effect escaped the choice image")
        if st.emitted:
            endpoint, prio = dpa_step(d, q, st.emitted)
            if (endpoint, prio) != (p, i):
                raise StrategyInvariantError("segment effect disagrees with the parity run")
        elif i != 0:
            raise StrategyInvariantError("empty segment must carry priority zero")
        segments.append(
            Segment(rules=st.rules, emitted=st.emitted, state=p, priority=i,
                    target=st.target, terminated=True)
        )
        q, x = p, st.target

    window = len(strat.game.owner)
    done = [s for s in segments if s.terminated]
    window_max = max((s.priority for s in done[-window:]), default=None) if done else None
    return PlayTrace(
        winner=strat.winner,
        segments=segments,
        outcome=outcome,
        window=window,
        window_max=window_max,
        all_segments_terminated=all(s.terminated for s in segments),
    )
