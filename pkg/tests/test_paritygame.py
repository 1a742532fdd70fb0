import random

import pytest

from omegacfl.grammar import PROVER, REFUTER
from omegacfl.paritygame import DeadlockError, make_game, solve, verify_strategy

from .oracles import brute_force_prover_region, random_parity_game


def test_even_self_loop_prover_wins():
    pg = make_game({0: PROVER}, {0: 0}, [(0, 0)])
    sol = solve(pg)
    assert sol.win_prover == {0}
    assert sol.strat_prover == {0: 0}


def test_odd_self_loop_refuter_wins():
    pg = make_game({0: PROVER}, {0: 1}, [(0, 0)])
    sol = solve(pg)
    assert sol.win_refuter == {0}


def test_deadlock_reported_with_vertex():
    pg = make_game({0: PROVER, 1: REFUTER}, {0: 0, 1: 0}, [(0, 1)])
    with pytest.raises(DeadlockError) as exc:
        solve(pg)
    assert "1" in str(exc.value)


def test_choice_matters():
    # prover at 0 must escape the odd loop by moving to the even one
    pg = make_game(
        {0: PROVER, 1: REFUTER, 2: REFUTER},
        {0: 1, 1: 0, 2: 1},
        [(0, 1), (0, 2), (1, 1), (2, 2)],
    )
    sol = solve(pg)
    assert 0 in sol.win_prover and 1 in sol.win_prover
    assert 2 in sol.win_refuter
    assert sol.strat_prover[0] == 1


def test_regions_match_brute_force():
    rng = random.Random(77)
    for i in range(200):
        pg = random_parity_game(rng)
        sol = solve(pg)
        expected = brute_force_prover_region(pg)
        assert set(sol.win_prover) == expected, i
        assert set(sol.win_prover) | set(sol.win_refuter) == set(pg.owner)
        assert not set(sol.win_prover) & set(sol.win_refuter)


def test_solver_strategies_verify():
    rng = random.Random(78)
    for i in range(120):
        pg = random_parity_game(rng)
        sol = solve(pg)
        assert verify_strategy(pg, sol.strat_prover, PROVER, sol.win_prover), i
        assert verify_strategy(pg, sol.strat_refuter, REFUTER, sol.win_refuter), i


def test_bad_strategy_rejected():
    # prover choosing the odd self-loop is losing and must not verify
    pg = make_game(
        {0: PROVER, 1: REFUTER},
        {0: 1, 1: 0},
        [(0, 0), (0, 1), (1, 1)],
    )
    assert verify_strategy(pg, {0: 0}, PROVER, {0, 1}) is False
    assert verify_strategy(pg, {0: 1}, PROVER, {0, 1}) is True


def test_empty_region_verifies():
    pg = make_game({0: PROVER}, {0: 1}, [(0, 0)])
    assert verify_strategy(pg, {}, PROVER, set()) is True


def test_duality_under_swap():
    # swapping ownership and shifting priorities by one swaps the winner
    rng = random.Random(79)
    for _ in range(60):
        pg = random_parity_game(rng)
        swapped = make_game(
            {v: (REFUTER if pg.owner[v] == PROVER else PROVER) for v in pg.owner},
            {v: pg.priority[v] + 1 for v in pg.owner},
            [(v, w) for v in pg.owner for w in pg.succ[v]],
        )
        sol = solve(pg)
        dual = solve(swapped)
        assert set(sol.win_prover) == set(dual.win_refuter)
        assert set(sol.win_refuter) == set(dual.win_prover)
