import itertools
import random

import pytest

from omegacfl.automata import DPA
from omegacfl.formulas import FALSE, choice_images, cnf, implies
from omegacfl.grammar import PROVER, REFUTER, make_grammar
from omegacfl.lsp import (
    LspGuardError,
    build_parity_game,
    dump_parity_game,
    extend_solution,
    formula_at_levels,
    formula_of_sentential,
    formula_of_symbol,
    parity_game_json,
    solve_lsp_system,
)
from omegacfl.paritygame import solve

from .oracles import random_dpa, random_game_grammar, refuter_forces, refuter_forces_outside


def dpa1(prio=1):
    return DPA(states=("p",), alphabet=("a",), initial="p",
               delta={("p", "a"): "p"}, priority={"p": prio})


def dpa_chain():
    return DPA(
        states=("p", "r"),
        alphabet=("a", "b"),
        initial="p",
        delta={("p", "a"): "r", ("p", "b"): "p", ("r", "a"): "r", ("r", "b"): "r"},
        priority={"p": 1, "r": 2},
    )


def test_formula_of_symbol_epsilon():
    d = dpa_chain()
    assert formula_of_symbol(d, "p", None) == cnf([[("p", 0)]])


def test_formula_of_symbol_terminal_max_rule():
    d = dpa_chain()
    assert formula_of_symbol(d, "p", "a") == cnf([[("r", 2)]])
    assert formula_of_symbol(d, "r", "b") == cnf([[("r", 2)]])


def test_single_refuter_rule_fixpoint():
    d = dpa_chain()
    g = make_grammar(["X"], ["a", "b"], [("X", ("a",))], "X", {"X": REFUTER})
    sys_ = solve_lsp_system(g, d)
    assert sys_.solution[("p", "X")] == cnf([[("r", 2)]])


def test_nonterminating_prover_is_false():
    d = dpa1()
    g = make_grammar(["X"], ["a"], [("X", ("X",))], "X", {"X": PROVER})
    sys_ = solve_lsp_system(g, d)
    assert sys_.solution[("p", "X")] == FALSE


def test_iterates_ascend_under_implication():
    rng = random.Random(5)
    for _ in range(12):
        g = random_game_grammar(rng, ["a", "b"], max_nts=3)
        d = random_dpa(rng, ["a", "b"], max_states=2, max_prio=2)
        sys_ = solve_lsp_system(g, d)
        for lvl in range(sys_.fixpoint_level):
            lo = sys_.at_level(lvl)
            hi = sys_.at_level(lvl + 1)
            for k in lo:
                assert implies(lo[k], hi[k]), (k, lvl)
        assert sys_.stats["rounds"] <= sys_.stats["round_bound"]
        assert sys_.stats["max_component_changes"] <= sys_.stats["chain_bound"]


def test_round_cap_guard_fires():
    d = dpa_chain()
    g = make_grammar(["X"], ["a", "b"], [("X", ("a", "X")), ("X", ())], "X", {"X": REFUTER})
    with pytest.raises(LspGuardError):
        solve_lsp_system(g, d, round_cap=1)


def test_sentential_split_independence():
    rng = random.Random(6)
    for _ in range(10):
        g = random_game_grammar(rng, ["a", "b"], max_nts=2)
        d = random_dpa(rng, ["a", "b"], max_states=2, max_prio=2)
        sys_ = solve_lsp_system(g, d)
        symbols = list(g.terminals) + list(g.nonterminals)
        alpha = tuple(rng.choice(symbols) for _ in range(rng.randrange(0, 4)))
        q = d.initial
        whole = formula_of_sentential(sys_, q, alpha)
        # composing any split must be equivalent; canonical forms are equal
        from omegacfl.formulas import compose_family

        for cut in range(len(alpha) + 1):
            left, right = alpha[:cut], alpha[cut:]
            lf = formula_of_sentential(sys_, q, left)
            fam = {p: formula_of_sentential(sys_, p, right) for p in d.states}
            assert compose_family(lf, fam) == whole


def test_formula_levels_zero_is_false():
    d = dpa1()
    g = make_grammar(["X"], ["a"], [("X", ("a",)), ("X", ("a", "X"))], "X", {"X": REFUTER})
    sys_ = solve_lsp_system(g, d)
    assert formula_at_levels(sys_, "p", ("X",), (0,)) == FALSE
    top = formula_at_levels(sys_, "p", ("X",), (sys_.fixpoint_level,))
    assert top == sys_.solution[("p", "X")]


def test_extend_solution_tail_recursion():
    d = dpa1()
    g = make_grammar(["X"], ["a"], [("X", ("a", "X"))], "X", {"X": REFUTER})
    sys_ = solve_lsp_system(g, d)
    esol = extend_solution(sys_)
    assert esol[("p", "X")] == cnf([[("p", 1, "X")]])


def test_extend_solution_no_tail_rule_is_false():
    d = dpa1()
    g = make_grammar(["X"], ["a"], [("X", ("a",))], "X", {"X": REFUTER})
    esol = extend_solution(solve_lsp_system(g, d))
    assert esol[("p", "X")] == FALSE


def test_extend_handles_bare_nonterminal_rule():
    # X -> Y uses the epsilon convention: priority zero, state unchanged
    d = dpa1()
    g = make_grammar(
        ["X", "Y"], ["a"], [("X", ("Y",)), ("Y", ("a", "Y"))], "X",
        {"X": REFUTER, "Y": REFUTER},
    )
    esol = extend_solution(solve_lsp_system(g, d))
    assert esol[("p", "X")] == cnf([[("p", 0, "Y")]])


def test_parity_game_desk_counts():
    # S -> a S against the one-state odd automaton: one formula vertex, one
    # clause vertex, one helper, cycling at priority 1
    d = dpa1()
    g = make_grammar(["S"], ["a"], [("S", ("a", "S"))], "S", {"S": REFUTER})
    sys_ = solve_lsp_system(g, d)
    pg = build_parity_game(sys_, extend_solution(sys_))
    kinds = sorted(v[0] for v in pg.owner)
    assert kinds == ["c", "f", "h"]
    helper = next(v for v in pg.owner if v[0] == "h")
    assert pg.priority[helper] == 1
    assert sum(len(s) for s in pg.succ.values()) == 3
    sol = solve(pg)
    assert pg.initial in sol.win_refuter


def test_parity_game_false_formula_self_loop():
    d = dpa1()
    g = make_grammar(["S"], ["a"], [("S", ("a",))], "S", {"S": REFUTER})
    sys_ = solve_lsp_system(g, d)
    pg = build_parity_game(sys_, extend_solution(sys_))
    clause = next(v for v in pg.owner if v[0] == "c")
    assert pg.succ[clause] == (clause,)
    assert pg.priority[clause] == 0
    sol = solve(pg)
    assert pg.initial in sol.win_prover


def test_parity_game_deadlock_free_and_priorities():
    rng = random.Random(7)
    for _ in range(15):
        g = random_game_grammar(rng, ["a", "b"], max_nts=3)
        d = random_dpa(rng, ["a", "b"], max_states=2, max_prio=2)
        sys_ = solve_lsp_system(g, d)
        pg = build_parity_game(sys_, extend_solution(sys_))
        for v, succs in pg.succ.items():
            assert succs, v
            assert pg.priority[v] == (v[4][1] if v[0] == "h" else 0)


def test_dump_and_json_stable():
    d = dpa1()
    g = make_grammar(["S"], ["a"], [("S", ("a", "S"))], "S", {"S": REFUTER})
    sys_ = solve_lsp_system(g, d)
    pg = build_parity_game(sys_, extend_solution(sys_))
    assert dump_parity_game(pg) == dump_parity_game(pg)
    j = parity_game_json(pg)
    assert len(j["vertices"]) == len(pg.owner)
    assert j["initial"] is not None


def test_formula_semantics_via_game_tree():
    # clauses are prover guarantees, choice images are refuter guarantees,
    # checked by exhaustive bounded search over the finite word game
    rng = random.Random(8)
    checked_clauses = 0
    checked_images = 0
    for _ in range(25):
        g = random_game_grammar(rng, ["a", "b"], max_nts=2, max_rules_per_nt=2, max_body=2)
        d = random_dpa(rng, ["a", "b"], max_states=2, max_prio=2)
        sys_ = solve_lsp_system(g, d)
        for q in d.states:
            for x in g.nonterminals:
                f = sys_.solution[(q, x)]
                if f.is_false:
                    continue
                for k in f.clauses:
                    assert not refuter_forces_outside(g, d, q, (x,), set(k), depth=10)
                    checked_clauses += 1
                for img in itertools.islice(choice_images(f), 12):
                    assert refuter_forces(g, d, q, (x,), set(img), depth=12)
                    checked_images += 1
    assert checked_clauses >= 20 and checked_images >= 20
