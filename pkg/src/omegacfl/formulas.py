"""Positive Boolean formulas in canonical CNF over (state, priority) atoms.

Formulas are sets of clauses, clauses are sets of atoms; an atom is either a
pair (state, priority) or, once a target nonterminal is attached, a triple
(state, priority, nonterminal).  TRUE is the empty clause set and FALSE the
set containing only the empty clause, so absorption laws fall out of plain
set operations.  The canonical representative is the subsumption-free clause
set with sorted atoms and clauses; for monotone formulas this is exactly the
set of prime implicates, so canonical equality is logical equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

#: (state, priority) or (state, priority, nonterminal)
Atom = tuple
Clause = tuple


@dataclass(frozen=True)
class Cnf:
    clauses: tuple[Clause, ...]

    @property
    def is_true(self) -> bool:
        return not self.clauses

    @property
    def is_false(self) -> bool:
        return self.clauses == ((),)

    def atoms(self) -> frozenset[Atom]:
        return frozenset(a for k in self.clauses for a in k)


TRUE = Cnf(())
FALSE = Cnf(((),))


def cnf(clauses: Iterable[Iterable[Atom]]) -> Cnf:
    """Canonicalize: dedupe and sort atoms per clause, drop every clause that
    is a superset of another, sort the survivors."""
    cleaned = {tuple(sorted(set(k))) for k in clauses}
    kept: list[tuple] = []
    for k in sorted(cleaned, key=len):
        ks = set(k)
        if any(set(other) <= ks for other in kept):
            continue
        kept.append(k)
    return Cnf(tuple(sorted(kept)))


def conj(f: Cnf, g: Cnf) -> Cnf:
    return cnf(f.clauses + g.clauses)


def disj(f: Cnf, g: Cnf) -> Cnf:
    return cnf(tuple(k + h for k in f.clauses for h in g.clauses))


def conj_all(fs: Iterable[Cnf]) -> Cnf:
    out = TRUE
    for f in fs:
        out = conj(out, f)
    return out


def disj_all(fs: Iterable[Cnf]) -> Cnf:
    fs = list(fs)
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = disj(out, f)
    return out


def atom_compose(x: Atom, y: Atom) -> Atom:
    """Sequential composition of effects: end in y's state, keep the highest
    priority seen on either part."""
    if len(x) != 2 or len(y) != 2:
        raise ValueError("composition is defined on plain (state, priority) atoms")
    return (y[0], max(x[1], y[1]))


def compose_family(f: Cnf, fam: Mapping[str, Cnf]) -> Cnf:
    """Compose a formula with a family of continuation formulas, one per
    state: every atom (p, i) is replaced by fam[p] with priorities maxed
    against i.  Computed directly in CNF: each output clause picks one clause
    of the continuation per atom of an input clause."""
    out_clauses: list[tuple] = []
    for k in f.clauses:
        for a in k:
            if len(a) != 2:
                raise ValueError("cannot compose a formula with attached nonterminals")
        factors = [fam[a[0]].clauses for a in k]
        for choice in itertools.product(*factors):
            new_clause: set[Atom] = set()
            for a, h in zip(k, choice):
                new_clause.update(atom_compose(a, b) for b in h)
            out_clauses.append(tuple(new_clause))
    return cnf(out_clauses)


def implies(f: Cnf, g: Cnf) -> bool:
    """Negation-free implication: every clause of g must contain a clause of f."""
    f_sets = [set(k) for k in f.clauses]
    return all(any(c <= set(h) for c in f_sets) for h in g.clauses)


def equivalent(f: Cnf, g: Cnf) -> bool:
    return f == g or (implies(f, g) and implies(g, f))


def attach_nonterminal(f: Cnf, y: str) -> Cnf:
    """Tag every atom with the target nonterminal; clause structure unchanged."""
    return Cnf(tuple(tuple((a[0], a[1], y) for a in k) for k in f.clauses))


def strip_nonterminal(k: Clause) -> tuple[Clause, set[str]]:
    """Drop the nonterminal component of a clause's atoms; also reports the
    set of nonterminals that occurred."""
    return tuple(sorted({(a[0], a[1]) for a in k})), {a[2] for a in k}


def choice_functions(f: Cnf) -> Iterator[dict[Clause, Atom]]:
    """Enumerate all selections of one atom per clause.  A formula containing
    an empty clause admits none; TRUE admits exactly the empty selection."""
    for picks in itertools.product(*f.clauses):
        yield dict(zip(f.clauses, picks))


def choice_images(f: Cnf) -> Iterator[frozenset[Atom]]:
    seen = set()
    for c in choice_functions(f):
        img = frozenset(c.values())
        if img not in seen:
            seen.add(img)
            yield img


def render(f: Cnf) -> str:
    if f.is_true:
        return "TRUE"
    if f.is_false:
        return "FALSE"

    def show_atom(a: Atom) -> str:
        return "(" + ",".join(str(x) for x in a) + ")"

    return " & ".join("(" + " | ".join(show_atom(a) for a in k) + ")" for k in f.clauses)
