import json
import random

import pytest

from omegacfl.automata import UPWord, make_nba, nba_accepts_up
from omegacfl.boxes import ID, box_of_word, is_lasso, letter_box
from omegacfl.grammar import make_grammar
from omegacfl.lvp import (
    FixpointGuardError,
    boxset_of_sentential,
    check_inclusion,
    lvp_report,
    solve_lvp_system,
)

from .oracles import bounded_words, can_derive, random_grammar, random_nba, reaches_anchor


def test_least_solution_golden(g_ex, a_ex):
    sys_ = solve_lvp_system(g_ex, a_ex)
    ack = letter_box(a_ex, "ack")
    s = letter_box(a_ex, "s")
    assert sys_.fin_boxes("X") == {ack}
    assert sys_.fin_boxes("Y") == {ID, s}
    assert sys_.inf_boxes("X", "X") == {ID, ack}
    assert sys_.inf_boxes("Y", "Y") == {ID}
    assert sys_.inf_boxes("X", "Y") == frozenset()
    assert sys_.inf_boxes("Y", "X") == frozenset()


def test_inclusion_running_example(g_ex, a_ex):
    verdict = check_inclusion(g_ex, a_ex)
    assert verdict.included is True
    assert verdict.counterexample is None


def test_unproductive_nonterminal_empty():
    g = make_grammar(["S", "Z"], ["a"], [("S", ("a",)), ("Z", ("Z",))], "S")
    a = make_nba(["q0"], ["a"], "q0", ["q0"], [("q0", "a", "q0")])
    sys_ = solve_lvp_system(g, a)
    assert sys_.fin_boxes("Z") == frozenset()


def test_boxset_of_sentential_examples(g_ex, a_ex):
    sys_ = solve_lvp_system(g_ex, a_ex)
    assert set(boxset_of_sentential(a_ex, sys_, ())) == {ID}
    assert set(boxset_of_sentential(a_ex, sys_, ("req", "Y", "ack"))) == {
        letter_box(a_ex, "ack")
    }
    assert set(boxset_of_sentential(a_ex, sys_, ("s",))) == {letter_box(a_ex, "s")}


def test_unanswered_requests_counterexample(a_ex):
    g = make_grammar(["S"], ["req", "ack", "s", "t"], [("S", ("req", "S"))], "S")
    verdict = check_inclusion(g, a_ex)
    assert verdict.included is False
    cex = verdict.counterexample
    assert cex is not None
    assert set(cex.stem) <= {"req"} and set(cex.loop) == {"req"}
    assert len(cex.loop) >= 1
    assert nba_accepts_up(a_ex, UPWord(cex.stem, cex.loop)) is False


def test_vacuous_inclusion_only_identity_pair():
    # S -> a S is never completed: no terminal rules, so only the identity
    # reaches the Delta entries and inclusion holds vacuously
    g = make_grammar(["S"], ["a"], [("S", ("S", "a"))], "S")
    a = make_nba(["q0"], ["a"], "q0", [], [("q0", "a", "q0")])
    verdict = check_inclusion(g, a)
    assert verdict.included is True


def test_counterexample_words_are_derivable(a_ex):
    rng = random.Random(17)
    found = 0
    for _ in range(40):
        g = random_grammar(rng, list(a_ex.alphabet), max_nts=3)
        verdict = check_inclusion(g, a_ex)
        if verdict.included:
            continue
        found += 1
        cex = verdict.counterexample
        assert nba_accepts_up(a_ex, UPWord(cex.stem, cex.loop)) is False
        assert reaches_anchor(g, g.start, cex.stem, cex.nonterminal)
        assert reaches_anchor(g, cex.nonterminal, cex.loop, cex.nonterminal)
        assert box_of_word(a_ex, cex.stem) == cex.tau
        assert box_of_word(a_ex, cex.loop) == cex.rho
    assert found >= 3


def test_bounded_enumeration_soundness():
    rng = random.Random(23)
    for _ in range(15):
        a = random_nba(rng, max_states=3)
        g = random_grammar(rng, list(a.alphabet), max_nts=4)
        sys_ = solve_lvp_system(g, a)
        words = bounded_words(g, 6)
        for x in g.nonterminals:
            enumerated = {box_of_word(a, w) for w in words[x]}
            assert enumerated <= sys_.fin_boxes(x)
            for box, witness in sys_.fin[x].items():
                assert box_of_word(a, witness) == box
                assert can_derive(g, x, witness)


def test_delta_witnesses_replay():
    rng = random.Random(29)
    for _ in range(10):
        a = random_nba(rng, max_states=3)
        g = random_grammar(rng, list(a.alphabet), max_nts=3)
        sys_ = solve_lvp_system(g, a)
        for (x, y), entries in sys_.inf.items():
            for box, witness in entries.items():
                assert box_of_word(a, witness) == box
                assert reaches_anchor(g, x, witness, y)


def test_lasso_pairs_match_oracle_on_fixpoint():
    rng = random.Random(31)
    for _ in range(20):
        a = random_nba(rng, max_states=3)
        if not a.finals:
            continue
        g = random_grammar(rng, list(a.alphabet), max_nts=3)
        sys_ = solve_lvp_system(g, a)
        q0 = a.state_index[a.initial]
        for x in g.nonterminals:
            for tau, u in sys_.inf[(g.start, x)].items():
                for rho, v in sys_.inf[(x, x)].items():
                    if not v:
                        continue  # identity loop cannot be iterated
                    expected = nba_accepts_up(a, UPWord(u, v))
                    assert is_lasso(tau, rho, q0) == expected, (u, v)


def test_monotone_growth_log(g_ex, a_ex):
    sys_ = solve_lvp_system(g_ex, a_ex, log_iterates=True)
    assert sys_.iterate_log is not None
    assert len(sys_.iterate_log) == sys_.stats["growth_events"]
    # replaying the log reconstructs the final solution exactly
    seen_fin = {x: set() for x in g_ex.nonterminals}
    seen_inf = {k: set() for k in sys_.inf}
    for entry in sys_.iterate_log:
        if entry[0] == "fin":
            seen_fin[entry[1]].add(entry[2])
        else:
            seen_inf[(entry[1], entry[2])].add(entry[3])
    assert {x: frozenset(s) for x, s in seen_fin.items()} == {
        x: sys_.fin_boxes(x) for x in g_ex.nonterminals
    }


def test_guard_bound_enforced(g_ex, a_ex):
    with pytest.raises(FixpointGuardError):
        solve_lvp_system(g_ex, a_ex, guard_bound=1)


def test_guard_bound_respected(g_ex, a_ex):
    sys_ = solve_lvp_system(g_ex, a_ex)
    assert sys_.stats["growth_events"] <= sys_.stats["guard_bound"]


def test_report_round_trips(g_ex, a_ex):
    verdict = check_inclusion(g_ex, a_ex)
    report = lvp_report(verdict)
    again = json.loads(json.dumps(report))
    assert again == report
    assert again["included"] is True
    assert again["counterexample"] is None
    assert again["stats"]["iterations"] >= 1


def test_alphabet_mismatch_rejected(g_ex):
    a = make_nba(["q0"], ["req"], "q0", ["q0"], [("q0", "req", "q0")])
    with pytest.raises(ValueError):
        check_inclusion(g_ex, a)
