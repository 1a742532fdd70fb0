"""Determinization of Buechi automata into deterministic parity automata.

The construction tracks compact history trees: ordered trees whose nodes
carry disjoint-sibling subsets of automaton states and age-ordered names.
Per transition, every node sprouts a youngest child holding its final
states, labels are stepped through the transition relation, older siblings
steal shared states, empty nodes die, and a node whose children cover it is
"greened" (its children are discarded).  Deaths and greens of the smallest
pre-existing name decide the transition's priority; surviving names are
compacted order-preservingly, so names never exceed the automaton size and
priorities stay below 2n+2.  The builder works in min-parity internally and
flips to the max-even convention on output.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import DPA, NBA, make_nba

_SINK = "sink"


class ResourceCapError(RuntimeError):
    """The construction exceeded the configured state cap."""


@dataclass
class DeterminizationReport:
    dpa: DPA
    state_count: int
    max_priority: int
    stats: dict
    debug: dict[str, str] | None = None


def _prune_unreachable(a: NBA) -> NBA:
    reach = {a.initial}
    frontier = [a.initial]
    while frontier:
        q = frontier.pop()
        for c in a.alphabet:
            for q2 in a.successors(q, c):
                if q2 not in reach:
                    reach.add(q2)
                    frontier.append(q2)
    if reach == set(a.states):
        return a
    return make_nba(
        states=[q for q in a.states if q in reach],
        alphabet=a.alphabet,
        initial=a.initial,
        finals=[q for q in a.finals if q in reach],
        transitions=[(q, c, q2) for (q, c, q2) in a.transitions if q in reach and q2 in reach],
    )


class _Node:
    __slots__ = ("name", "label", "children")

    def __init__(self, name: int, label: int, children=None):
        self.name = name
        self.label = label
        self.children = children if children is not None else []


def _to_mutable(t) -> _Node:
    name, label, kids = t
    return _Node(name, label, [_to_mutable(k) for k in kids])


def _to_tuple(n: _Node):
    return (n.name, n.label, tuple(_to_tuple(k) for k in n.children))


def _all_nodes(n: _Node):
    yield n
    for c in n.children:
        yield from _all_nodes(c)


def _tree_step(tree, rel_rows: list[int], finals_mask: int, n_states: int):
    """One transition of the tree automaton; returns (new tree or None, priority
    in min-parity convention)."""
    root = _to_mutable(tree)
    existing = list(_all_nodes(root))
    fresh = max(nd.name for nd in existing) + 1

    # sprout: youngest child per node holding the node's final states
    counter = fresh
    for nd in existing:
        hit = nd.label & finals_mask
        if hit:
            nd.children.append(_Node(counter, hit, []))
            counter += 1

    # subset step on every node, sprouts included
    def image(mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= rel_rows[i]
            mask >>= 1
            i += 1
        return out

    for nd in _all_nodes(root):
        nd.label = image(nd.label)

    # horizontal steal: older siblings keep shared states, whole subtrees lose them
    def remove_mask(nd: _Node, mask: int) -> None:
        nd.label &= ~mask
        for c in nd.children:
            remove_mask(c, mask)

    def steal(nd: _Node) -> None:
        taken = 0
        for c in nd.children:
            remove_mask(c, taken)
            taken |= c.label
        for c in nd.children:
            steal(c)

    steal(root)

    deaths: list[int] = []
    greens: list[int] = []

    def bury(nd: _Node) -> None:
        deaths.append(nd.name)
        for c in nd.children:
            bury(c)

    def prune_empty(nd: _Node) -> None:
        kept = []
        for c in nd.children:
            if c.label == 0:
                bury(c)
            else:
                prune_empty(c)
                kept.append(c)
        nd.children = kept

    if root.label == 0:
        deaths.append(root.name)
        root = None
    else:
        prune_empty(root)

        # vertical merge: children covering the parent are discarded, parent greens
        def vmerge(nd: _Node) -> None:
            union = 0
            for c in nd.children:
                union |= c.label
            if nd.children and union == nd.label:
                greens.append(nd.name)
                for c in nd.children:
                    bury(c)
                nd.children = []
            else:
                for c in nd.children:
                    vmerge(c)

        vmerge(root)

    # events count only for names that existed in the previous state
    e = min((d for d in deaths if d < fresh), default=None)
    g = min((x for x in greens if x < fresh), default=None)
    sentinel = 2 * n_states + 1
    prio = sentinel
    if e is not None:
        prio = min(prio, 2 * e - 1)
    if g is not None:
        prio = min(prio, 2 * g)

    if root is None:
        return None, 1  # rejecting sink, strongest odd priority

    # order-preserving renaming back to 1..m
    survivors = sorted(nd.name for nd in _all_nodes(root))
    renaming = {old: i + 1 for i, old in enumerate(survivors)}
    for nd in _all_nodes(root):
        nd.name = renaming[nd.name]
    return _to_tuple(root), prio


def determinize(a: NBA, *, state_cap: int = 100_000, debug: bool = False) -> DeterminizationReport:
    """Build a deterministic parity automaton with the same infinite-word
    language, total transition function, and max priority at most 2n+2."""
    if not a.alphabet:
        raise ValueError("cannot determinize over an empty alphabet")
    a = _prune_unreachable(a)
    n = len(a.states)
    idx = a.state_index
    finals_mask = 0
    for q in a.finals:
        finals_mask |= 1 << idx[q]
    rel = {
        c: [0] * n for c in a.alphabet
    }
    for (q, c, q2) in a.transitions:
        rel[c][idx[q]] |= 1 << idx[q2]

    sentinel = 2 * n + 1
    init_tree = (1, 1 << idx[a.initial], ())
    init_state = (init_tree, sentinel)

    ids: dict = {init_state: 0}
    order: list = [init_state]
    delta_idx: dict[tuple[int, str], int] = {}
    queue = deque([init_state])
    sink_id: int | None = None

    while queue:
        state = queue.popleft()
        sid = ids[state]
        if state == _SINK:
            for c in a.alphabet:
                delta_idx[(sid, c)] = sid
            continue
        tree, _ = state
        for c in a.alphabet:
            new_tree, prio = _tree_step(tree, rel[c], finals_mask, n)
            nxt = _SINK if new_tree is None else (new_tree, prio)
            if nxt not in ids:
                if len(ids) >= state_cap:
                    raise ResourceCapError(
                        f"determinization exceeded the cap of {state_cap} states"
                    )
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
                if nxt == _SINK:
                    sink_id = ids[nxt]
            delta_idx[(sid, c)] = ids[nxt]

    # flip min-parity to the max-even convention
    names = [str(i) for i in range(len(order))]
    priority: dict[str, int] = {}
    for state in order:
        sid = ids[state]
        p = 1 if state == _SINK else state[1]
        priority[names[sid]] = (2 * n + 2) - p
    delta = {(names[q], c): names[q2] for (q, c), q2 in delta_idx.items()}
    dpa = DPA(
        states=tuple(names),
        alphabet=a.alphabet,
        initial=names[0],
        delta=delta,
        priority=priority,
    )
    dbg = None
    if debug:
        dbg = {
            names[ids[s]]: ("sink" if s == _SINK else f"tree={s[0]} prio_in={s[1]}")
            for s in order
        }
    return DeterminizationReport(
        dpa=dpa,
        state_count=len(order),
        max_priority=max(priority.values()),
        stats={
            "nba_states": n,
            "dpa_states": len(order),
            "max_priority": max(priority.values()),
            "priority_bound": 2 * n + 2,
            "has_sink": sink_id is not None,
        },
        debug=dbg,
    )
