"""Command-line front end.

    choicegames derive-pairwise --input PROFILE
    choicegames vote {plurality,condorcet,agenda,bracket,league,league-eliminate} --input FILE
    choicegames stable-sets --input PAIRWISE
    choicegames game {solve,expand,envelope} --input GAME

``--input @name`` loads a bundled fixture (table1_printed, table1_reconciled,
table2, matrix1, matrix2).  Exit codes: 0 success, 1 bad input, 2 the
computation halted (tie under ``--tie-rule error``, no convergence).
"""

from __future__ import annotations

import argparse
import json
import platform
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import games as G
from . import serialize as S
from . import stable_sets as SS
from . import voting as V
from .core import HALF, ValidationError, as_fraction, validate

EXIT_OK, EXIT_INPUT, EXIT_HALT = 0, 1, 2


class InputError(Exception):
    pass


class Halt(Exception):
    """Computation stopped by design; carries the partial report."""

    def __init__(self, report: S.RunReport, message: str):
        self.report = report
        super().__init__(message)


def _load(path: str, parser):
    try:
        doc = S.read_json(path)
        return doc, parser(doc)
    except S.SchemaError as exc:
        if exc.line is not None:
            raise InputError(f"{path}:{exc.line}:{exc.column}: {exc}") from None
        raise InputError(f"{path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _checked(obj, path: str):
    problems = validate(obj)
    if problems:
        raise InputError(f"{path}: " + "; ".join(problems))
    return obj


def parse_id_list(text: str) -> list[str]:
    items = [t.strip() for t in text.split(",")]
    if any(not t for t in items):
        raise InputError(f"malformed id list {text!r}")
    return items


def parse_bracket(text: str) -> V.Bracket:
    """Parse ``((A1,A2),(M1,M2))`` or the JSON form ``[["A1","A2"],["M1","M2"]]``."""
    text = text.strip()
    if text.startswith("["):
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bracket: {exc.msg}") from None
    else:
        tokens = re.findall(r"[(),]|[^\s(),]+", text)
        pos = 0

        def node():
            nonlocal pos
            if pos >= len(tokens):
                raise InputError("bracket: unexpected end")
            tok = tokens[pos]
            pos += 1
            if tok != "(":
                if tok in "),":
                    raise InputError(f"bracket: unexpected {tok!r}")
                return tok
            left = node()
            if pos >= len(tokens) or tokens[pos] != ",":
                raise InputError("bracket: expected ','")
            pos += 1
            right = node()
            if pos >= len(tokens) or tokens[pos] != ")":
                raise InputError("bracket: expected ')'")
            pos += 1
            return [left, right]

        tree = node()
        if pos != len(tokens):
            raise InputError("bracket: trailing input")

    def check(t):
        if isinstance(t, str):
            return t
        if isinstance(t, list) and len(t) == 2:
            return [check(t[0]), check(t[1])]
        raise InputError("bracket: every node needs exactly two children")

    return check(tree)


def _meta(args) -> Optional[dict]:
    if args.no_meta:
        return None
    return {"tool": "choicegames", "version": __version__, "python": platform.python_version()}


# -- commands ---------------------------------------------------------------

def cmd_derive_pairwise(args) -> S.RunReport:
    doc, profile = _load(args.input, S.parse_profile)
    _checked(profile, args.input)
    matrix = V.derive_pairwise(profile)
    result = {"pairwise": S.pairwise_doc(matrix)}
    warnings = []
    ref_path = args.reference
    if ref_path is None:
        _, table2 = _load("@table2", S.parse_pairwise)
        if set(table2.ids) == set(matrix.ids):
            ref_path = "@table2"
    if ref_path is not None:
        _, reference = _load(ref_path, S.parse_pairwise)
        _checked(reference, ref_path)
        try:
            diffs = V.compare_pairwise(matrix, reference)
        except ValueError as exc:
            raise InputError(f"{ref_path}: {exc}") from None
        result["reference"] = ref_path
        result["differences"] = [
            {"x": x, "y": y, "derived": S.fx(d), "reference": S.fx(r)} for x, y, d, r in diffs
        ]
        if diffs:
            cells = ", ".join(f"{x} over {y}: {d} vs {r}" for x, y, d, r in diffs)
            warnings.append(
                f"derived matrix differs from reference {ref_path} in {len(diffs)} "
                f"cell{'s' if len(diffs) != 1 else ''} ({cells})"
            )
    inputs = {"profile": S.profile_doc(profile)}
    if args.reference:
        inputs["reference"] = args.reference
    return S.RunReport("derive-pairwise", inputs, result, warnings, _meta(args))


def cmd_vote(args) -> S.RunReport:
    method = args.method
    command = f"vote {method}"
    flags = {}
    if method == "plurality":
        _, profile = _load(args.input, S.parse_profile)
        _checked(profile, args.input)
        inputs = {"profile": S.profile_doc(profile)}
        return S.RunReport(command, inputs, S.tally_doc(V.plurality(profile)), [], _meta(args))

    _, matrix = _load(args.input, S.parse_pairwise)
    _checked(matrix, args.input)
    inputs = {"pairwise": S.pairwise_doc(matrix)}
    try:
        if method == "condorcet":
            winner, cycle = V.condorcet_analysis(matrix)
            edges = []
            if cycle:
                for x, y in zip(cycle, cycle[1:] + cycle[:1]):
                    edges.append({"from": x, "to": y, "support": S.fx(matrix[(x, y)])})
            result = {"condorcet_winner": winner, "majority_cycle": cycle, "cycle_edges": edges}
        elif method == "league":
            field = parse_id_list(args.field) if args.field else list(matrix.ids)
            flags["field"] = field
            result = S.tally_doc(V.league_scores(matrix, field))
        elif method == "league-eliminate":
            result = S.elimination_doc(V.iterated_league_elimination(matrix))
        else:
            flags["tie_rule"] = args.tie_rule
            if method == "agenda":
                if not args.agenda:
                    raise InputError("vote agenda requires --agenda")
                agenda = parse_id_list(args.agenda)
                flags["agenda"] = agenda
                run = lambda: V.agenda_elimination(matrix, agenda, args.tie_rule)  # noqa: E731
            else:
                if not args.bracket:
                    raise InputError("vote bracket requires --bracket")
                bracket = parse_bracket(args.bracket)
                flags["bracket"] = bracket
                run = lambda: V.bracket_elimination(matrix, bracket, args.tie_rule)  # noqa: E731
            try:
                result = S.elimination_doc(run())
            except V.TieError as exc:
                result = S.elimination_doc(exc.report)
                result["halted"] = {"reason": str(exc), "match": S.match_doc(exc.match)}
                inputs["flags"] = flags
                raise Halt(S.RunReport(command, inputs, result, [], _meta(args)), str(exc)) from None
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc).strip("'\"")) from None
    if flags:
        inputs["flags"] = flags
    return S.RunReport(command, inputs, result, [], _meta(args))


def cmd_stable_sets(args) -> S.RunReport:
    _, matrix = _load(args.input, S.parse_pairwise)
    _checked(matrix, args.input)
    try:
        threshold = as_fraction(args.threshold)
        rel = SS.dominance_from_pairwise(matrix, threshold)
        res = SS.enumerate_stable_sets(rel, args.max_alternatives)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    inputs = {"pairwise": S.pairwise_doc(matrix), "flags": {"threshold": S.fx(threshold)}}
    return S.RunReport("stable-sets", inputs, S.stable_sets_doc(res, matrix, threshold), [], _meta(args))


def cmd_game(args) -> S.RunReport:
    _, game = _load(args.input, S.parse_game)
    _checked(game, args.input)
    inputs = {"game": S.game_doc(game)}
    sub = args.sub
    try:
        if sub == "solve":
            config = G.SolverConfig(as_fraction(args.tolerance), args.max_iter)
            inputs["flags"] = {"mode": args.mode, "tolerance": S.fx(config.tolerance), "max_iter": args.max_iter}
            analysis = S.pure_analysis_doc(G.pure_analysis(game), game)
            try:
                solution = G.solve(game, args.mode, config)
            except G.ConvergenceError as exc:
                result = {
                    "pure_analysis": analysis,
                    "solution": None,
                    "halted": {
                        "reason": str(exc),
                        "lower": S.fx(exc.lower),
                        "upper": S.fx(exc.upper),
                        "iterations": exc.iterations,
                    },
                }
                raise Halt(S.RunReport("game solve", inputs, result, [], _meta(args)), str(exc)) from None
            result = {"pure_analysis": analysis, "solution": S.solution_doc(solution)}
            return S.RunReport("game solve", inputs, result, [], _meta(args))
        if sub == "expand":
            inputs["flags"] = {"informed": args.informed}
            exp = G.expand_one_sided_information(game, args.informed, args.max_strategies)
            return S.RunReport("game expand", inputs, S.expansion_doc(exp), [], _meta(args))
        inputs["flags"] = {"player": args.player, "samples": args.samples, "decimal": args.decimal}
        points = G.payoff_envelope(game, args.player, args.samples)
        result = S.envelope_doc(points, args.player)
        if args.csv_out:
            Path(args.csv_out).write_text(S.envelope_csv(result, args.decimal), encoding="utf-8")
        return S.RunReport("game envelope", inputs, result, [], _meta(args))
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


# -- parser -----------------------------------------------------------------

def _common_parser(formats: tuple[str, ...]) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", required=True, metavar="PATH", help="input JSON file or @fixture")
    common.add_argument("--format", choices=formats, default="json")
    common.add_argument("--output", "-o", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--no-meta", action="store_true", help="omit the environment block")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser(("json", "markdown"))

    parser = argparse.ArgumentParser(prog="choicegames", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("derive-pairwise", parents=[common], help="pairwise support from a profile")
    p.add_argument("--reference", metavar="PATH", help="pairwise matrix to compare against")
    p.set_defaults(func=cmd_derive_pairwise)

    p = commands.add_parser("vote", parents=[common], help="run a voting procedure")
    p.add_argument("method", choices=("plurality", "condorcet", "agenda", "bracket", "league", "league-eliminate"))
    p.add_argument("--agenda", help="comma-separated order, e.g. M1,A2,A1,M2")
    p.add_argument("--bracket", help="binary tree, e.g. '((A1,A2),(M1,M2))'")
    p.add_argument("--tie-rule", choices=V.TIE_RULES, default=V.TIE_ERROR)
    p.add_argument("--field", help="comma-separated subset for league scoring")
    p.set_defaults(func=cmd_vote)

    p = commands.add_parser("stable-sets", parents=[common], help="von Neumann-Morgenstern stable sets")
    p.add_argument("--threshold", default=str(HALF), help="dominance needs support above this (default 50)")
    p.add_argument("--max-alternatives", type=int, default=SS.DEFAULT_MAX_ALTERNATIVES)
    p.set_defaults(func=cmd_stable_sets)

    game = commands.add_parser("game", help="matrix game analysis")
    game_sub = game.add_subparsers(dest="sub", required=True)
    p = game_sub.add_parser("solve", parents=[common])
    p.add_argument("--mode", choices=G.SOLVE_MODES, default="auto")
    p.add_argument("--tolerance", default=str(G.DEFAULT_TOLERANCE))
    p.add_argument("--max-iter", type=int, default=G.DEFAULT_MAX_ITERATIONS)
    p = game_sub.add_parser("expand", parents=[common])
    p.add_argument("--informed", choices=(G.ROW, G.COLUMN), default=G.COLUMN)
    p.add_argument("--max-strategies", type=int, default=G.DEFAULT_EXPANSION_CAP)
    p = game_sub.add_parser("envelope", parents=[_common_parser(("json", "markdown", "csv"))])
    p.add_argument("--player", choices=(G.ROW, G.COLUMN), default=G.ROW)
    p.add_argument("--samples", type=int, default=10, help="grid intervals on [0, 1]")
    p.add_argument("--csv-out", metavar="PATH", help="also write the envelope as CSV")
    p.add_argument("--decimal", action="store_true", help="CSV numbers as decimals instead of fractions")
    game.set_defaults(func=cmd_game)
    return parser


def _render(report: S.RunReport, fmt: str) -> str:
    if fmt == "markdown":
        return S.render_markdown(report)
    if fmt == "csv":
        return S.envelope_csv(report.result, report.inputs["flags"].get("decimal", False))
    return report.to_json()


def _emit(report: S.RunReport, args) -> None:
    text = _render(report, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except Halt as halt:
        _emit(halt.report, args)
        print(f"error: {halt}", file=sys.stderr)
        return EXIT_HALT
    except (InputError, ValidationError, SS.InstanceTooLarge, G.ExpansionTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
