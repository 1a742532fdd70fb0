import pytest

from omegacfl.automata import make_nba
from omegacfl.grammar import make_grammar


@pytest.fixture
def g_ex():
    """Request/acknowledge grammar: X -> req Y ack | X X ; Y -> s Y t | eps."""
    return make_grammar(
        nonterminals=["X", "Y"],
        terminals=["req", "ack", "s", "t"],
        rules=[
            ("X", ("req", "Y", "ack")),
            ("X", ("X", "X")),
            ("Y", ("s", "Y", "t")),
            ("Y", ()),
        ],
        start="X",
    )


@pytest.fixture
def a_ex():
    """Two-state automaton accepting the words where every request is
    eventually acknowledged."""
    return make_nba(
        states=["q0", "q1"],
        alphabet=["req", "ack", "s", "t"],
        initial="q0",
        finals=["q0"],
        transitions=[
            ("q0", "req", "q1"),
            ("q0", "ack", "q0"),
            ("q0", "s", "q0"),
            ("q0", "t", "q0"),
            ("q1", "req", "q1"),
            ("q1", "s", "q1"),
            ("q1", "t", "q1"),
            ("q1", "ack", "q0"),
        ],
    )
