"""Inclusion checking for omega-context-free languages against Buechi automata.

The solver computes, per nonterminal, the set of boxes of all derivable
terminal words, and per nonterminal pair (X, Y) the boxes of all words w with
X derivable to wY along the rewrite graph.  Both live in the finite lattice
of box sets, so a worklist (chaotic) iteration reaches the least solution.
The verdict then checks every pair from (start -> X) and (X -> X) entries for
the lasso property; a failing pair yields a concrete stem/loop counterexample
assembled from witness words tracked alongside the boxes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .automata import NBA
from .boxes import Box, ID, compose, is_lasso, letter_box
from .grammar import Grammar, Word, omega_graph, validate

#: A box set with one witness word per box (first witness found is kept).
WitnessedSet = dict[Box, Word]


@dataclass
class LvpSystem:
    grammar: Grammar
    nba: NBA
    fin: dict[str, WitnessedSet]
    inf: dict[tuple[str, str], WitnessedSet]
    iterate_log: list[tuple[str, object, Box]] | None
    stats: dict

    def fin_boxes(self, x: str) -> frozenset[Box]:
        return frozenset(self.fin[x])

    def inf_boxes(self, x: str, y: str) -> frozenset[Box]:
        return frozenset(self.inf[(x, y)])


@dataclass(frozen=True)
class Counterexample:
    nonterminal: str
    tau: Box
    rho: Box
    stem: Word
    loop: Word


@dataclass(frozen=True)
class LvpVerdict:
    included: bool
    counterexample: Counterexample | None
    stats: dict


class FixpointGuardError(RuntimeError):
    """The structural iteration ceiling was exceeded; indicates a solver bug."""


def _compose_sets(left: WitnessedSet, right: WitnessedSet) -> WitnessedSet:
    out: WitnessedSet = {}
    for b1, w1 in left.items():
        for b2, w2 in right.items():
            b = compose(b1, b2)
            if b not in out:
                out[b] = w1 + w2
    return out


def boxset_of_sentential(a: NBA, sol: "LvpSystem | dict[str, WitnessedSet]", alpha) -> WitnessedSet:
    """Left fold of per-symbol box sets under setwise composition; the empty
    form yields {identity}.  Nonterminal entries are read from the given
    (possibly intermediate) solution."""
    fin = sol.fin if isinstance(sol, LvpSystem) else sol
    acc: WitnessedSet = {ID: ()}
    for sym in alpha:
        if sym in fin:
            acc = _compose_sets(acc, fin[sym])
        else:
            acc = _compose_sets(acc, {letter_box(a, sym): (sym,)})
        if not acc:
            break
    return acc


def _merge(target: WitnessedSet, extra: WitnessedSet) -> list[Box]:
    added = []
    for b, w in extra.items():
        if b not in target:
            target[b] = w
            added.append(b)
    return added


def _guard_bound(g: Grammar, a: NBA) -> int:
    n = len(g.nonterminals)
    q = len(a.states)
    return n * (n + 1) * (3 ** (q * q) + 1)


def _solve(
    g: Grammar,
    a: NBA,
    *,
    check_lassos: bool,
    log_iterates: bool = False,
    guard_bound: int | None = None,
) -> tuple[LvpSystem, Counterexample | None]:
    problems = validate(g)
    if problems:
        raise ValueError("invalid grammar: " + "; ".join(problems))
    graph = omega_graph(g)
    q_init = a.state_index[a.initial]
    start = g.start

    fin: dict[str, WitnessedSet] = {x: {} for x in g.nonterminals}
    inf: dict[tuple[str, str], WitnessedSet] = {
        (x, y): {} for x in g.nonterminals for y in g.nonterminals
    }
    log: list | None = [] if log_iterates else None
    bound = guard_bound if guard_bound is not None else _guard_bound(g, a)
    stats = {"evaluations": 0, "growth_events": 0, "guard_bound": bound, "lasso_checks": 0}

    # Tasks are inequality instances; dependents re-queue on variable growth.
    fin_tasks = [("fin", r.lhs, r.rhs) for r in g.rules]
    inf_tasks = [
        ("inf", e.src, e.label, e.dst, y) for e in graph.edges for y in g.nonterminals
    ]
    tasks = fin_tasks + inf_tasks
    deps: dict[object, list] = {}
    for t in fin_tasks:
        for sym in t[2]:
            if g.is_nonterminal(sym):
                deps.setdefault(("fin", sym), []).append(t)
    for t in inf_tasks:
        _, _, label, z, y = t
        for sym in label:
            if g.is_nonterminal(sym):
                deps.setdefault(("fin", sym), []).append(t)
        deps.setdefault(("inf", z, y), []).append(t)

    queue: deque = deque(tasks)
    queued = set(tasks)
    counterexample: Counterexample | None = None

    def note_growth(var_key, box) -> None:
        stats["growth_events"] += 1
        if stats["growth_events"] > bound:
            raise FixpointGuardError(
                f"fixpoint guard exceeded: {stats['growth_events']} growth events"
            )
        if log is not None:
            log.append((*var_key, box))
        for dep in deps.get(var_key, ()):
            if dep not in queued:
                queued.add(dep)
                queue.append(dep)

    def check_pairs(x: str, new_taus: WitnessedSet, new_rhos: WitnessedSet):
        # Early termination: test only pairs involving a new box.
        taus = inf[(start, x)]
        rhos = inf[(x, x)]
        for tau, u in list(taus.items()):
            for rho, v in rhos.items():
                if tau not in new_taus and rho not in new_rhos:
                    continue
                stats["lasso_checks"] += 1
                if not is_lasso(tau, rho, q_init):
                    return Counterexample(x, tau, rho, stem=u, loop=v)
        return None

    # Base case: the empty path keeps every nonterminal at itself.
    for y in g.nonterminals:
        inf[(y, y)][ID] = ()
        note_growth(("inf", y, y), ID)
        if check_lassos and counterexample is None:
            new = {ID: ()}
            counterexample = check_pairs(y, new if y == start else {}, new)
    if counterexample is None:
        while queue:
            task = queue.popleft()
            queued.discard(task)
            stats["evaluations"] += 1
            if task[0] == "fin":
                _, x, rhs = task
                rhs_set = boxset_of_sentential(a, fin, rhs)
                added = _merge(fin[x], rhs_set)
                for b in added:
                    note_growth(("fin", x), b)
            else:
                _, x, label, z, y = task
                rhs_set = _compose_sets(boxset_of_sentential(a, fin, label), inf[(z, y)])
                added = _merge(inf[(x, y)], rhs_set)
                if added:
                    for b in added:
                        note_growth(("inf", x, y), b)
                    if check_lassos and (x == start or x == y):
                        new = {b: inf[(x, y)][b] for b in added}
                        if x == start:
                            counterexample = check_pairs(y, new, {})
                        if counterexample is None and x == y:
                            counterexample = check_pairs(x, {}, new)
                        if counterexample is not None:
                            break

    system = LvpSystem(grammar=g, nba=a, fin=fin, inf=inf, iterate_log=log, stats=stats)
    return system, counterexample


def solve_lvp_system(
    g: Grammar, a: NBA, *, log_iterates: bool = False, guard_bound: int | None = None
) -> LvpSystem:
    """Least solution of the box-set inequality system for (g, a)."""
    system, _ = _solve(g, a, check_lassos=False, log_iterates=log_iterates, guard_bound=guard_bound)
    return system


def check_inclusion(g: Grammar, a: NBA) -> LvpVerdict:
    """Decide whether every infinite word derivable in g is accepted by a.

    Lasso pairs are checked incrementally while the fixpoint grows, so a
    failing pair stops the computation early; the verdict then carries the
    nonterminal, the box pair, and stem/loop witness words.
    """
    missing = set(g.terminals) - set(a.alphabet)
    if missing:
        raise ValueError(f"automaton alphabet misses terminals: {sorted(missing)}")
    system, cex = _solve(g, a, check_lassos=True)
    stats = dict(system.stats)
    stats["boxes"] = sum(len(s) for s in system.fin.values()) + sum(
        len(s) for s in system.inf.values()
    )
    return LvpVerdict(included=cex is None, counterexample=cex, stats=stats)


def lvp_report(verdict: LvpVerdict) -> dict:
    """JSON-ready report of an inclusion check."""
    cex = None
    if verdict.counterexample is not None:
        cex = {
            "nonterminal": verdict.counterexample.nonterminal,
            "stem": list(verdict.counterexample.stem),
            "loop": list(verdict.counterexample.loop),
        }
    return {
        "included": verdict.included,
        "counterexample": cex,
        "stats": {
            "iterations": verdict.stats.get("evaluations", 0),
            "boxes": verdict.stats.get("boxes", 0),
        },
    }
