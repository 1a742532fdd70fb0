"""Finite parity games under max-even semantics, solved by recursive
attractor decomposition with positional strategy extraction.

Prover wins a play iff the highest priority seen infinitely often is even.
Successor ties are broken by vertex declaration order, so strategies are
deterministic across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .automata import _sccs
from .grammar import PROVER, REFUTER

Vertex = Hashable


@dataclass(frozen=True, eq=False)
class ParityGameSpec:
    owner: dict[Vertex, str]
    priority: dict[Vertex, int]
    succ: dict[Vertex, tuple[Vertex, ...]]
    initial: Vertex | None = None

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(self.owner)


@dataclass
class Solution:
    win_prover: frozenset
    win_refuter: frozenset
    strat_prover: dict
    strat_refuter: dict

    def winner_from(self, v: Vertex) -> str:
        return PROVER if v in self.win_prover else REFUTER


class DeadlockError(ValueError):
    pass


def make_game(
    owner: Mapping[Vertex, str],
    priority: Mapping[Vertex, int],
    edges: Iterable[tuple[Vertex, Vertex]],
    initial: Vertex | None = None,
) -> ParityGameSpec:
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in owner}
    for (u, v) in edges:
        succ[u].append(v)
    return ParityGameSpec(
        owner=dict(owner),
        priority=dict(priority),
        succ={v: tuple(s) for v, s in succ.items()},
        initial=initial,
    )


def _attractor(
    target: set,
    player: str,
    region: set,
    owner: Mapping,
    succ: Mapping,
    pred: Mapping,
    order: Mapping,
):
    """Player's attractor to target within region, with the pulling strategy
    for the player's newly attracted vertices."""
    attr = set(target)
    strategy: dict = {}
    counts = {}
    frontier = list(target)
    while frontier:
        v = frontier.pop()
        for u in pred.get(v, ()):
            if u not in region or u in attr:
                continue
            if owner[u] == player:
                # pick the pulling edge before u joins, so the attractor rank
                # strictly decreases along the strategy
                strategy[u] = min(
                    (w for w in succ[u] if w in attr), key=lambda w: order[w]
                )
                attr.add(u)
                frontier.append(u)
            else:
                if u not in counts:
                    counts[u] = sum(1 for w in succ[u] if w in region)
                counts[u] -= 1
                if counts[u] == 0:
                    attr.add(u)
                    frontier.append(u)
    return attr, strategy


def solve(pg: ParityGameSpec) -> Solution:
    """Winning regions and positional strategies for both players."""
    for v, ss in pg.succ.items():
        if not ss:
            raise DeadlockError(f"vertex {v!r} has no successor")
    order = {v: i for i, v in enumerate(pg.owner)}
    pred: dict[Vertex, list[Vertex]] = {v: [] for v in pg.owner}
    for v, ss in pg.succ.items():
        for w in ss:
            pred[w].append(v)

    def other(p: str) -> str:
        return REFUTER if p == PROVER else PROVER

    def rec(region: set) -> tuple[dict[str, set], dict[str, dict]]:
        if not region:
            return {PROVER: set(), REFUTER: set()}, {PROVER: {}, REFUTER: {}}
        p = max(pg.priority[v] for v in region)
        player = PROVER if p % 2 == 0 else REFUTER
        opp = other(player)
        top = {v for v in region if pg.priority[v] == p}
        attr, attr_strat = _attractor(top, player, region, pg.owner, pg.succ, pred, order)
        win, strat = rec(region - attr)
        if not win[opp]:
            full_strat = dict(strat[player])
            full_strat.update(attr_strat)
            for v in top:
                if pg.owner[v] == player and v not in full_strat:
                    full_strat[v] = min(
                        (w for w in pg.succ[v] if w in region), key=lambda w: order[w]
                    )
            return {player: set(region), opp: set()}, {player: full_strat, opp: {}}
        escape, escape_strat = _attractor(win[opp], opp, region, pg.owner, pg.succ, pred, order)
        win2, strat2 = rec(region - escape)
        opp_strat = dict(strat2[opp])
        opp_strat.update(strat[opp])
        opp_strat.update(escape_strat)
        for v in win[opp]:
            if pg.owner[v] == opp and v not in opp_strat:
                opp_strat[v] = min(
                    (w for w in pg.succ[v] if w in win[opp]), key=lambda w: order[w]
                )
        return (
            {player: win2[player], opp: win2[opp] | escape},
            {player: strat2[player], opp: opp_strat},
        )

    win, strat = rec(set(pg.owner))
    return Solution(
        win_prover=frozenset(win[PROVER]),
        win_refuter=frozenset(win[REFUTER]),
        strat_prover=strat[PROVER],
        strat_refuter=strat[REFUTER],
    )


def verify_strategy(
    pg: ParityGameSpec, strat: Mapping[Vertex, Vertex], player: str, region: Iterable[Vertex]
) -> bool:
    """Check that following strat from region never lets the opponent close a
    cycle of their parity.

    The player's vertices are restricted to the strategy edge; everything the
    opponent can still reach is explored.  A cycle whose maximum priority has
    the opponent's parity refutes the strategy; it is found by, per bad
    priority p, restricting to vertices of priority <= p and asking whether a
    strongly connected component with an internal edge contains a priority-p
    vertex.
    """
    region = set(region)
    if not region:
        return True
    order = {v: i for i, v in enumerate(pg.owner)}

    def restricted_succ(v):
        if pg.owner[v] == player:
            s = strat.get(v)
            if s is None or s not in pg.succ[v]:
                return None  # uncovered vertex or edge not in the game
            return (s,)
        return pg.succ[v]

    reach: set = set()
    frontier = list(region)
    while frontier:
        v = frontier.pop()
        if v in reach:
            continue
        reach.add(v)
        succs = restricted_succ(v)
        if succs is None:
            return False
        frontier.extend(succs)

    bad_parity = 1 if player == PROVER else 0
    for p in {pg.priority[v] for v in reach}:
        if p % 2 != bad_parity:
            continue
        sub = {v for v in reach if pg.priority[v] <= p}

        def sub_succ(v):
            return tuple(w for w in restricted_succ(v) if w in sub)

        comp = _sccs(sorted(sub, key=order.get), sub_succ)
        cyclic = {
            comp[v] for v in sub for w in sub_succ(v) if comp[w] == comp[v]
        }
        if any(pg.priority[v] == p and comp[v] in cyclic for v in sub):
            return False
    return True
