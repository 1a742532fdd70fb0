import random

import pytest

from omegacfl.automata import UPWord, dpa_accepts_up, make_nba, nba_accepts_up, validate_dpa
from omegacfl.determinize import ResourceCapError, determinize

from .oracles import random_nba, random_up_word


def test_empty_language_rejects_everything():
    a = make_nba(["q0", "q1"], ["a", "b"], "q0", [], [("q0", "a", "q1"), ("q1", "b", "q0")])
    rep = determinize(a)
    rng = random.Random(0)
    for _ in range(100):
        w = random_up_word(rng, ["a", "b"])
        assert dpa_accepts_up(rep.dpa, w) is False


def test_universal_language_accepts_everything():
    a = make_nba(["q0"], ["a", "b"], "q0", ["q0"], [("q0", "a", "q0"), ("q0", "b", "q0")])
    rep = determinize(a)
    rng = random.Random(1)
    for _ in range(100):
        w = random_up_word(rng, ["a", "b"])
        assert dpa_accepts_up(rep.dpa, w) is True


def test_running_example_oracle_agreement(a_ex):
    rep = determinize(a_ex)
    assert validate_dpa(rep.dpa) == []
    assert dpa_accepts_up(rep.dpa, UPWord(("req",), ("s",))) is False
    assert dpa_accepts_up(rep.dpa, UPWord((), ("req", "ack"))) is True
    rng = random.Random(2)
    for _ in range(500):
        w = random_up_word(rng, list(a_ex.alphabet))
        assert dpa_accepts_up(rep.dpa, w) == nba_accepts_up(a_ex, w)


def test_priority_bound_and_totality():
    rng = random.Random(3)
    for _ in range(25):
        a = random_nba(rng)
        rep = determinize(a)
        assert validate_dpa(rep.dpa) == []
        n = rep.stats["nba_states"]
        assert rep.max_priority <= 2 * n + 2
        for q in rep.dpa.states:
            for c in rep.dpa.alphabet:
                assert (q, c) in rep.dpa.delta


def test_unreachable_states_pruned():
    a = make_nba(
        ["q0", "dead"],
        ["a"],
        "q0",
        ["q0"],
        [("q0", "a", "q0"), ("dead", "a", "dead")],
    )
    rep = determinize(a)
    assert rep.stats["nba_states"] == 1


def test_state_cap_enforced(a_ex):
    with pytest.raises(ResourceCapError):
        determinize(a_ex, state_cap=1)


def test_empty_alphabet_rejected():
    a = make_nba(["q0"], [], "q0", ["q0"], [])
    with pytest.raises(ValueError):
        determinize(a)


def test_debug_dump_present(a_ex):
    rep = determinize(a_ex, debug=True)
    assert rep.debug is not None
    assert set(rep.debug) == set(rep.dpa.states)
