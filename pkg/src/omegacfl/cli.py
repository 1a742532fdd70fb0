"""Command-line front end tying the pipeline together.

Exit codes: 0 = inclusion holds / prover wins, 1 = inclusion fails / refuter
wins, 2 = input error, 3 = a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .automata import format_dpa, format_nba, parse_nba
from .determinize import ResourceCapError, determinize
from .grammar import GrammarFormatError, lift_finite_game, parse_grammar, format_grammar
from .lsp import dump_parity_game, parity_game_json
from .lvp import check_inclusion, lvp_report
from .strategy import make_adversary, simulate, synthesize

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3

SCHEMAS = {
    "lvp": {
        "included": "bool",
        "counterexample": {"nonterminal": "str", "stem": ["str"], "loop": ["str"]},
        "stats": {"iterations": "int", "boxes": "int"},
    },
    "lsp": {
        "winner": "prover|refuter",
        "stats": {
            "dpa_states": "int",
            "max_priority": "int",
            "rounds": "int",
            "game_vertices": "int",
        },
    },
    "simulate": {
        "winner": "prover|refuter",
        "outcome": "str",
        "window": "int",
        "window_max": "int|null",
        "all_segments_terminated": "bool",
        "segments": [
            {
                "rules": ["str"],
                "emitted": ["str"],
                "state": "str",
                "priority": "int",
                "target": "str|null",
                "terminated": "bool",
            }
        ],
    },
}


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(report: dict, json_path: str | None) -> None:
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")


def _load_inputs(args):
    g = parse_grammar(_read(args.grammar))
    a = parse_nba(_read(args.automaton))
    return g, a


def cmd_lvp(args) -> int:
    g, a = _load_inputs(args)
    verdict = check_inclusion(g, a)
    report = lvp_report(verdict)
    _emit(report, args.json)
    if verdict.included:
        print("included")
        return EXIT_OK
    cex = verdict.counterexample
    print("not included")
    if args.witness and cex is not None:
        stem = " ".join(cex.stem)
        loop = " ".join(cex.loop)
        print(f"counterexample: ({stem}) ({loop})^w via nonterminal {cex.nonterminal}")
    return EXIT_NEGATIVE


def cmd_lsp(args) -> int:
    g, a = _load_inputs(args)
    strat = synthesize(g, a, state_cap=args.state_cap)
    report = {
        "winner": strat.winner,
        "stats": {
            "dpa_states": len(strat.dpa.states),
            "max_priority": strat.dpa.max_priority,
            "rounds": strat.system.stats["rounds"],
            "game_vertices": len(strat.game.owner),
        },
    }
    _emit(report, args.json)
    print(f"winner: {strat.winner}")
    if args.dpa_dump:
        sys.stdout.write(dump_parity_game(strat.game))
    return EXIT_OK if strat.winner == "prover" else EXIT_NEGATIVE


def cmd_determinize(args) -> int:
    a = parse_nba(_read(args.automaton))
    report = determinize(a, state_cap=args.state_cap, debug=args.dpa_dump)
    text = format_dpa(report.dpa)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _emit({"stats": report.stats}, args.json)
    print(
        f"states: {report.state_count}  max priority: {report.max_priority}"
        f"  (bound {report.stats['priority_bound']})",
        file=sys.stderr,
    )
    if args.dpa_dump and report.debug:
        for name, desc in report.debug.items():
            print(f"{name}: {desc}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    g, a = _load_inputs(args)
    strat = synthesize(g, a, state_cap=args.state_cap)
    adversary = make_adversary("random", seed=args.seed)
    trace = simulate(strat, adversary, max_segments=args.max_segments)
    report = trace.to_json()
    _emit(report, args.json)
    print(f"winner: {strat.winner}")
    print(f"outcome: {trace.outcome}  window max priority: {trace.window_max}")
    return EXIT_OK if strat.winner == "prover" else EXIT_NEGATIVE


def cmd_lift(args) -> int:
    g, a = _load_inputs(args)
    lg, la = lift_finite_game(g, a)
    with open(args.out_grammar, "w", encoding="utf-8") as fh:
        fh.write(format_grammar(lg))
    with open(args.out_automaton, "w", encoding="utf-8") as fh:
        fh.write(format_nba(la))
    print(f"wrote {args.out_grammar} and {args.out_automaton}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omegacfl",
        description="Inclusion checking and strategy synthesis for "
        "omega-context-free languages against Buechi specifications.",
    )
    parser.add_argument("--version", action="version", version=f"omegacfl {__version__}")
    parser.add_argument(
        "--schema",
        action="store_true",
        help="print the JSON report schemas and exit",
    )
    sub = parser.add_subparsers(dest="command")

    def add_common(p, *, automaton_only=False):
        if not automaton_only:
            p.add_argument("-g", "--grammar", required=True, help="grammar file")
        p.add_argument("-a", "--automaton", required=True, help="Buechi automaton file")
        p.add_argument("--json", help="write a JSON report to this path")
        p.add_argument("--state-cap", type=int, default=100_000, help="determinization state cap")

    p_lvp = sub.add_parser("lvp", help="check omega-language inclusion")
    add_common(p_lvp)
    p_lvp.add_argument("--witness", action="store_true", help="print the counterexample word")
    p_lvp.set_defaults(func=cmd_lvp)

    p_lsp = sub.add_parser("lsp", help="solve the synthesis game")
    add_common(p_lsp)
    p_lsp.add_argument("--dpa-dump", action="store_true", help="dump the parity game")
    p_lsp.set_defaults(func=cmd_lsp)

    p_det = sub.add_parser("determinize", help="determinize a Buechi automaton")
    add_common(p_det, automaton_only=True)
    p_det.add_argument("-o", "--output", help="write the parity automaton here")
    p_det.add_argument("--dpa-dump", action="store_true", help="dump per-state debug info")
    p_det.set_defaults(func=cmd_determinize)

    p_sim = sub.add_parser("simulate", help="synthesize and simulate plays")
    add_common(p_sim)
    p_sim.add_argument("--seed", type=int, default=0, help="adversary random seed")
    p_sim.add_argument("--max-segments", type=int, default=50)
    p_sim.set_defaults(func=cmd_simulate)

    p_lift = sub.add_parser("lift", help="lift a finite-word game to an infinite one")
    p_lift.add_argument("-g", "--grammar", required=True)
    p_lift.add_argument("-a", "--automaton", required=True)
    p_lift.add_argument("-og", "--out-grammar", required=True)
    p_lift.add_argument("-oa", "--out-automaton", required=True)
    p_lift.set_defaults(func=cmd_lift)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        json.dump(SCHEMAS, sys.stdout, indent=2)
        print()
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_INPUT
    try:
        return args.func(args)
    except GrammarFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
