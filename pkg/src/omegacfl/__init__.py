"""Verification and synthesis for omega-context-free languages against
omega-regular specifications: inclusion checking via procedure summaries over
a Buechi automaton's transition monoid, and game solving via formula
summaries, determinization, and a derived finite parity game."""

__version__ = "0.1.0"

from .automata import DPA, NBA, UPWord, make_nba, parse_dpa, parse_nba
from .boxes import ID, Box, box_of_word, compose, is_lasso, letter_box
from .determinize import DeterminizationReport, determinize
from .formulas import FALSE, TRUE, Cnf, cnf
from .grammar import Grammar, Rule, make_grammar, parse_grammar
from .lsp import LspSystem, build_parity_game, extend_solution, solve_lsp_system
from .lvp import LvpSystem, LvpVerdict, check_inclusion, solve_lvp_system
from .paritygame import ParityGameSpec, Solution, make_game, solve, verify_strategy
from .strategy import (
    PlayTrace,
    SynthesizedStrategy,
    level_less,
    make_adversary,
    simulate,
    synthesize,
    synthesize_from_dpa,
)

__all__ = [
    "DPA",
    "NBA",
    "UPWord",
    "make_nba",
    "parse_dpa",
    "parse_nba",
    "ID",
    "Box",
    "box_of_word",
    "compose",
    "is_lasso",
    "letter_box",
    "DeterminizationReport",
    "determinize",
    "FALSE",
    "TRUE",
    "Cnf",
    "cnf",
    "Grammar",
    "Rule",
    "make_grammar",
    "parse_grammar",
    "LspSystem",
    "build_parity_game",
    "extend_solution",
    "solve_lsp_system",
    "LvpSystem",
    "LvpVerdict",
    "check_inclusion",
    "solve_lvp_system",
    "ParityGameSpec",
    "Solution",
    "make_game",
    "solve",
    "verify_strategy",
    "PlayTrace",
    "SynthesizedStrategy",
    "level_less",
    "make_adversary",
    "simulate",
    "synthesize",
    "synthesize_from_dpa",
]
