"""Nondeterministic Buechi automata, deterministic parity automata, and
membership oracles for ultimately periodic words.

The oracles here are deliberately independent of the summary machinery: word
membership for an NBA is decided on the product of the automaton with the
loop positions, and for a DPA by plain deterministic simulation.  They serve
as the ground truth the rest of the toolkit is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .grammar import GrammarFormatError, escape_token, strip_comment, unescape_token

Word = tuple[str, ...]


class AutomatonFormatError(GrammarFormatError):
    pass


@dataclass(frozen=True, eq=False)
class NBA:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    finals: frozenset[str]
    transitions: frozenset[tuple[str, str, str]]

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def succ(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for (q, a, q2) in sorted(self.transitions):
            out.setdefault((q, a), []).append(q2)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def letter_rel(self) -> dict[str, tuple[tuple[str, str], ...]]:
        out: dict[str, list[tuple[str, str]]] = {a: [] for a in self.alphabet}
        for (q, a, q2) in sorted(self.transitions):
            out[a].append((q, q2))
        return {a: tuple(v) for a, v in out.items()}

    def successors(self, q: str, a: str) -> tuple[str, ...]:
        return self.succ.get((q, a), ())


def make_nba(
    states: Iterable[str],
    alphabet: Iterable[str],
    initial: str,
    finals: Iterable[str],
    transitions: Iterable[tuple[str, str, str]],
) -> NBA:
    return NBA(
        states=tuple(dict.fromkeys(states)),
        alphabet=tuple(dict.fromkeys(alphabet)),
        initial=initial,
        finals=frozenset(finals),
        transitions=frozenset(transitions),
    )


def validate_nba(a: NBA) -> list[str]:
    problems = []
    if a.initial not in a.states:
        problems.append(f"initial state {a.initial!r} not declared")
    for q in a.finals:
        if q not in a.states:
            problems.append(f"final state {q!r} not declared")
    states = set(a.states)
    letters = set(a.alphabet)
    for (q, c, q2) in a.transitions:
        if q not in states or q2 not in states:
            problems.append(f"transition {q} {c} -> {q2} uses undeclared state")
        if c not in letters:
            problems.append(f"transition {q} {c} -> {q2} uses undeclared letter")
    return problems


@dataclass(frozen=True)
class UPWord:
    """Ultimately periodic word stem . loop^omega; the loop is nonempty."""

    stem: Word
    loop: Word

    def __post_init__(self):
        if not self.loop:
            raise ValueError("loop of an ultimately periodic word must be nonempty")

    def prefix(self, n: int) -> Word:
        out = list(self.stem)
        while len(out) < n:
            out.extend(self.loop)
        return tuple(out[:n])


def _check_letters(alphabet: Iterable[str], w: Sequence[str]) -> None:
    bad = [c for c in w if c not in set(alphabet)]
    if bad:
        raise ValueError(f"letters outside the alphabet: {bad}")


def nba_step_sets(a: NBA, q: str, w: Sequence[str]) -> frozenset[tuple[str, int]]:
    """All states reachable from q on w, each flagged 1 iff some w-labeled
    path there touches a final state (endpoints included, per letter)."""
    _check_letters(a.alphabet, w)
    current: dict[str, int] = {q: 0}
    for c in w:
        nxt: dict[str, int] = {}
        for s, flag in current.items():
            for s2 in a.successors(s, c):
                step_flag = 1 if (s in a.finals or s2 in a.finals) else 0
                f = max(flag, step_flag)
                if f > nxt.get(s2, -1):
                    nxt[s2] = f
        current = nxt
    return frozenset(current.items())


def _sccs(nodes: Sequence, succ) -> dict:
    """Iterative Tarjan; returns a node -> component-id map."""
    index: dict = {}
    low: dict = {}
    comp: dict = {}
    on_stack: set = set()
    stack: list = []
    counter = 0
    n_comp = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w_ in it:
                if w_ not in index:
                    index[w_] = low[w_] = counter
                    counter += 1
                    stack.append(w_)
                    on_stack.add(w_)
                    work.append((w_, iter(succ(w_))))
                    advanced = True
                    break
                elif w_ in on_stack:
                    low[v] = min(low[v], index[w_])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                while True:
                    w_ = stack.pop()
                    on_stack.discard(w_)
                    comp[w_] = n_comp
                    if w_ == v:
                        break
                n_comp += 1
    return comp


def nba_accepts_up(a: NBA, w: UPWord) -> bool:
    """Membership of stem.loop^omega, decided on the product of the automaton
    with the loop positions: accept iff a cycle touching a final state is
    reachable from the states the stem can reach."""
    _check_letters(a.alphabet, w.stem)
    _check_letters(a.alphabet, w.loop)
    if not a.finals:
        return False
    after_stem = {s for s, _ in nba_step_sets(a, a.initial, w.stem)}
    if not after_stem:
        return False
    k = len(w.loop)
    nodes = [(q, i) for q in a.states for i in range(k)]

    def succ(node):
        q, i = node
        for q2 in a.successors(q, w.loop[i]):
            yield (q2, (i + 1) % k)

    comp = _sccs(nodes, succ)
    # reachable product nodes from the stem frontier
    reach = set()
    frontier = [(q, 0) for q in after_stem]
    while frontier:
        n = frontier.pop()
        if n in reach:
            continue
        reach.add(n)
        frontier.extend(succ(n))
    for (q, i) in reach:
        for q2 in a.successors(q, w.loop[i]):
            tgt = (q2, (i + 1) % k)
            if comp[(q, i)] == comp[tgt] and (q in a.finals or q2 in a.finals):
                return True
    return False


# ---------------------------------------------------------------------------
# Deterministic parity automata


@dataclass(frozen=True, eq=False)
class DPA:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    delta: dict[tuple[str, str], str]
    priority: dict[str, int]

    @cached_property
    def max_priority(self) -> int:
        return max(self.priority.values())


def validate_dpa(d: DPA) -> list[str]:
    problems = []
    if d.initial not in d.states:
        problems.append(f"initial state {d.initial!r} not declared")
    states = set(d.states)
    for q in d.states:
        if q not in d.priority:
            problems.append(f"no priority for state {q!r}")
        for a in d.alphabet:
            if (q, a) not in d.delta:
                problems.append(f"missing transition for ({q!r}, {a!r})")
    for (q, a), q2 in d.delta.items():
        if q not in states or q2 not in states:
            problems.append(f"transition ({q}, {a}) -> {q2} uses undeclared state")
        if a not in set(d.alphabet):
            problems.append(f"transition ({q}, {a}) uses undeclared letter")
    return problems


def dpa_step(d: DPA, q: str, w: Sequence[str]) -> tuple[str, int]:
    """Deterministic run endpoint and the maximum priority over all visited
    states, both endpoints included.  The empty word yields (q, priority(q))."""
    _check_letters(d.alphabet, w)
    best = d.priority[q]
    cur = q
    for c in w:
        cur = d.delta[(cur, c)]
        best = max(best, d.priority[cur])
    return cur, best


def dpa_accepts_up(d: DPA, w: UPWord) -> bool:
    """Run the stem, then iterate the loop until the entry state repeats; the
    word is accepted iff the max priority on the repeating cycle is even."""
    q, _ = dpa_step(d, d.initial, w.stem)
    seen: dict[str, int] = {}
    trace: list[tuple[str, int]] = []
    while q not in seen:
        seen[q] = len(trace)
        q2, prio = dpa_step(d, q, w.loop)
        trace.append((q, prio))
        q = q2
    start = seen[q]
    cycle_max = max(prio for _, prio in trace[start:])
    return cycle_max % 2 == 0


# ---------------------------------------------------------------------------
# Text formats


def parse_nba(text: str) -> NBA:
    states: list[str] = []
    alphabet: list[str] = []
    finals: list[str] = []
    transitions: list[tuple[str, str, str]] = []
    initial: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw).strip()
        if not line:
            continue
        toks = [unescape_token(t) for t in line.split()]
        head = toks[0]
        if head == "states":
            states.extend(t for t in toks[1:] if t not in states)
        elif head == "alphabet":
            alphabet.extend(t for t in toks[1:] if t not in alphabet)
        elif head == "initial":
            if len(toks) != 2:
                raise AutomatonFormatError("initial expects exactly one state", lineno)
            initial = toks[1]
        elif head == "final":
            finals.extend(toks[1:])
        elif len(toks) == 4 and toks[2] == "->":
            transitions.append((toks[0], toks[1], toks[3]))
        else:
            raise AutomatonFormatError(f"cannot parse {raw.strip()!r}", lineno)
    if initial is None:
        raise AutomatonFormatError("missing 'initial' declaration")
    a = make_nba(states, alphabet, initial, finals, transitions)
    problems = validate_nba(a)
    if problems:
        raise AutomatonFormatError("; ".join(problems))
    return a


def format_nba(a: NBA) -> str:
    lines = [
        "states " + " ".join(escape_token(q) for q in a.states),
        "alphabet " + " ".join(escape_token(c) for c in a.alphabet),
        f"initial {escape_token(a.initial)}",
    ]
    if a.finals:
        lines.append("final " + " ".join(escape_token(q) for q in a.states if q in a.finals))
    for (q, c, q2) in sorted(a.transitions):
        lines.append(f"{escape_token(q)} {escape_token(c)} -> {escape_token(q2)}")
    return "\n".join(lines) + "\n"


def parse_dpa(text: str) -> DPA:
    states: list[str] = []
    alphabet: list[str] = []
    priority: dict[str, int] = {}
    delta: dict[tuple[str, str], str] = {}
    initial: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw).strip()
        if not line:
            continue
        toks = [unescape_token(t) for t in line.split()]
        head = toks[0]
        if head == "states":
            states.extend(t for t in toks[1:] if t not in states)
        elif head == "alphabet":
            alphabet.extend(t for t in toks[1:] if t not in alphabet)
        elif head == "initial":
            if len(toks) != 2:
                raise AutomatonFormatError("initial expects exactly one state", lineno)
            initial = toks[1]
        elif head == "priority":
            if len(toks) != 3:
                raise AutomatonFormatError("priority expects a state and a number", lineno)
            try:
                priority[toks[1]] = int(toks[2])
            except ValueError:
                raise AutomatonFormatError(f"bad priority {toks[2]!r}", lineno) from None
        elif len(toks) == 4 and toks[2] == "->":
            key = (toks[0], toks[1])
            if key in delta and delta[key] != toks[3]:
                raise AutomatonFormatError(f"duplicate transition for {key}", lineno)
            delta[key] = toks[3]
        else:
            raise AutomatonFormatError(f"cannot parse {raw.strip()!r}", lineno)
    if initial is None:
        raise AutomatonFormatError("missing 'initial' declaration")
    d = DPA(
        states=tuple(dict.fromkeys(states)),
        alphabet=tuple(dict.fromkeys(alphabet)),
        initial=initial,
        delta=delta,
        priority=priority,
    )
    problems = validate_dpa(d)
    if problems:
        raise AutomatonFormatError("; ".join(problems))
    return d


def format_dpa(d: DPA) -> str:
    lines = [
        "states " + " ".join(escape_token(q) for q in d.states),
        "alphabet " + " ".join(escape_token(c) for c in d.alphabet),
        f"initial {escape_token(d.initial)}",
    ]
    for q in d.states:
        lines.append(f"priority {escape_token(q)} {d.priority[q]}")
    for q in d.states:
        for a in d.alphabet:
            lines.append(f"{escape_token(q)} {escape_token(a)} -> {escape_token(d.delta[(q, a)])}")
    return "\n".join(lines) + "\n"
