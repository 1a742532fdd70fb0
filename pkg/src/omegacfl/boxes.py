"""The transition monoid of a Buechi automaton: boxes and the lasso test.

A box is a labeled relation over automaton states summarizing the state
changes a set of finite words can induce; the label flags whether a final
state can be visited on the way.  Boxes are encoded as two bit-matrix rows
per state (reachability, reachability-with-final-visit), so composition is a
Boolean matrix product and equality is bitwise.  The distinguished identity
element stands for the empty word only and never materializes a relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .automata import NBA, _sccs


@dataclass(frozen=True)
class Box:
    """reach[i] and final[i] are bitmasks of successor states of state i;
    final[i] is always a submask of reach[i]."""

    reach: tuple[int, ...]
    final: tuple[int, ...]

    def __post_init__(self):
        for r, f in zip(self.reach, self.final):
            if f & ~r:
                raise ValueError("final-visit edges must be a subset of reach edges")

    @property
    def is_identity(self) -> bool:
        return not self.reach

    @property
    def size(self) -> int:
        return len(self.reach)

    def triples(self) -> frozenset[tuple[int, int, int]]:
        out = set()
        for i, row in enumerate(self.reach):
            j = 0
            while row:
                if row & 1:
                    out.add((i, j, 1 if (self.final[i] >> j) & 1 else 0))
                row >>= 1
                j += 1
        return frozenset(out)


#: The neutral element of the monoid; its language is {epsilon}.  Distinct
#: from the diagonal flag-0 relation, which summarizes nonempty words.
ID = Box((), ())


def box_from_triples(n: int, triples: Iterable[tuple[int, int, int]]) -> Box:
    reach = [0] * n
    final = [0] * n
    for (i, j, flag) in triples:
        reach[i] |= 1 << j
        if flag:
            final[i] |= 1 << j
    return Box(tuple(reach), tuple(final))


def compose(r: Box, t: Box) -> Box:
    """Relational composition remembering final visits: the composed pair
    carries flag 1 iff some connecting path does."""
    if r.is_identity:
        return t
    if t.is_identity:
        return r
    n = r.size
    reach = [0] * n
    final = [0] * n
    for i in range(n):
        row = r.reach[i]
        frow = r.final[i]
        acc_r = 0
        acc_f = 0
        j = 0
        while row:
            if row & 1:
                acc_r |= t.reach[j]
                if (frow >> j) & 1:
                    acc_f |= t.reach[j]
                else:
                    acc_f |= t.final[j]
            row >>= 1
            j += 1
        reach[i] = acc_r
        final[i] = acc_f
    return Box(tuple(reach), tuple(final))


def letter_box(a: NBA, c: str) -> Box:
    """The box of a single letter: one edge per transition, flagged 1 iff the
    source or the target is final."""
    if c not in set(a.alphabet):
        raise ValueError(f"unknown letter {c!r}")
    n = len(a.states)
    idx = a.state_index
    finals = {idx[q] for q in a.finals}
    reach = [0] * n
    final = [0] * n
    for (q, q2) in a.letter_rel[c]:
        i, j = idx[q], idx[q2]
        reach[i] |= 1 << j
        if i in finals or j in finals:
            final[i] |= 1 << j
    return Box(tuple(reach), tuple(final))


def box_of_word(a: NBA, w: Sequence[str]) -> Box:
    """Fold of letter boxes; the empty word maps to the identity."""
    return reduce(compose, (letter_box(a, c) for c in w), ID)


def is_lasso(tau: Box, rho: Box, q_init: int) -> bool:
    """Decide whether tau takes the initial state into a part of rho's graph
    that can reach a cycle containing a final-visit edge.

    The identity in the rho position is a lasso by definition (it cannot be
    omega-iterated into an infinite word).  An identity tau leaves the start
    at q_init.  The empty path counts: a start state lying on an accepting
    cycle qualifies.
    """
    if rho.is_identity:
        return True
    if tau.is_identity:
        starts = {q_init}
    else:
        starts = set()
        row = tau.reach[q_init]
        j = 0
        while row:
            if row & 1:
                starts.add(j)
            row >>= 1
            j += 1
    if not starts:
        return False
    n = rho.size

    def succ(i):
        row = rho.reach[i]
        j = 0
        while row:
            if row & 1:
                yield j
            row >>= 1
            j += 1

    reach = set()
    frontier = list(starts)
    while frontier:
        i = frontier.pop()
        if i in reach:
            continue
        reach.add(i)
        frontier.extend(succ(i))
    comp = _sccs(list(range(n)), succ)
    for i in reach:
        frow = rho.final[i]
        j = 0
        while frow:
            if frow & 1 and comp[i] == comp[j]:
                return True
            frow >>= 1
            j += 1
    return False


def box_closure(a: NBA) -> frozenset[Box]:
    """All boxes with nonempty language, plus the identity: the closure of
    the letter boxes under composition."""
    letters = [letter_box(a, c) for c in a.alphabet]
    seen: set[Box] = set(letters)
    frontier = list(letters)
    while frontier:
        b = frontier.pop()
        for l in letters:
            for nb in (compose(b, l), compose(l, b)):
                if nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
    return frozenset(seen | {ID})


def render_box(a: NBA, b: Box) -> str:
    """Matrix rendering with '.' for a final-visit edge, 'o' for a plain
    edge, '-' for no edge; rows and columns follow the automaton's state
    order, so output is stable."""
    if b.is_identity:
        return "id"
    names = a.states
    width = max(len(q) for q in names)
    header = " " * (width + 1) + " ".join(q.rjust(width) for q in names)
    lines = [header]
    for i, q in enumerate(names):
        cells = []
        for j in range(len(names)):
            if (b.final[i] >> j) & 1:
                cells.append(".".rjust(width))
            elif (b.reach[i] >> j) & 1:
                cells.append("o".rjust(width))
            else:
                cells.append("-".rjust(width))
        lines.append(q.rjust(width) + " " + " ".join(cells))
    return "\n".join(lines)
